//! Discrete dispersion relations of the FDTD(2,2) and FDTD(2,4) schemes.
//!
//! Both schemes share the leapfrog time discretisation, so their dispersion
//! relations have the same left-hand side
//!
//! ```text
//! [ sin(ω Δt / 2) / (c Δt) ]²
//! ```
//!
//! and differ only in the per-axis spatial symbol on the right-hand side:
//! `sin(x)` for the two-point stencil and `(27 sin x − sin 3x) / 24` for the
//! four-point stencil, with `x = k̃_ξ Δξ / 2`.  The numerical wavenumber `k̃`
//! has no closed form away from one-dimensional grids and is obtained by a
//! bracketed root search on the physical (smallest positive) branch.

mod lemmas;
mod optimize;
mod relation;
mod scan;
mod solve;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::C0;

pub use lemmas::{
    lemma_monotonicity_check, lhs_diagnostics, p_factor, p_terms, q_factor, LhsDiagnostics,
    PTerms,
};
pub use optimize::{
    golden_section, optimal_courant_24, remark2_crossing, CrossingSide, OptimalCourant,
    DEFAULT_SEARCH_TOL, S_SEARCH_MIN,
};
pub use relation::{cfl_max_dt, dispersion_lhs, dispersion_rhs, stencil_symbol, time_step};
pub use scan::{max_knum_over_angles, scan_angles, AngleScan, ScanPoint};
pub use solve::{solve_knum, DEFAULT_TOL, MAX_ITERATIONS, NO_ROOT_SLACK};

/// Relative slack when validating medium parameters against vacuum.
const MEDIUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispersionError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid under-resolves the wave: {cells_per_wavelength} cells per wavelength (need >= 2)")]
    UnderResolved { cells_per_wavelength: f64 },
    #[error("no propagating numerical mode: lhs {lhs:e} exceeds branch maximum {rhs_max:e}")]
    NoRealRoot { lhs: f64, rhs_max: f64 },
    #[error("root finder did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("every point of the angle scan failed")]
    AllPointsFailed,
    #[error("p-factor domain violated: pi*a/N = {value} is outside (0, pi/2)")]
    DomainViolation { value: f64 },
    #[error("k_num - k does not change sign on (0, 1]; k_num stays {side}")]
    NoCrossing { side: CrossingSide },
    #[error("{failed} of {total} quadrature points failed to solve")]
    TooManyFailures { failed: usize, total: usize },
    #[error("{0}")]
    UnsupportedScheme(String),
}

pub type Result<T, E = DispersionError> = std::result::Result<T, E>;

/// Spatial differencing scheme. Both use second-order leapfrog in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Two-point staggered difference (classic Yee).
    Fdtd22,
    /// Four-point staggered difference with weights 27/24 and -1/24.
    Fdtd24,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Fdtd22, Scheme::Fdtd24];

    /// Ratio of this scheme's CFL limit to the FDTD(2,2) limit.
    pub fn cfl_factor(self) -> f64 {
        match self {
            Scheme::Fdtd22 => 1.0,
            Scheme::Fdtd24 => 6.0 / 7.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fdtd22 => "fdtd22",
            Scheme::Fdtd24 => "fdtd24",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = DispersionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['(', ')', ',', '-', '_'], "").as_str() {
            "fdtd22" => Ok(Scheme::Fdtd22),
            "fdtd24" => Ok(Scheme::Fdtd24),
            other => Err(DispersionError::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Uniform (per-axis) mesh and a homogeneous, lossless, isotropic medium.
///
/// Axes beyond `dim` do not take part in any sum; by convention their
/// spacing equals `dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Mesh sizes `[dx, dy, dz]` in meters.
    pub spacing: [f64; 3],
    pub dim: usize,
    pub eps_r: f64,
    pub mu_r: f64,
}

impl GridSpec {
    pub fn new(dim: usize, spacing: [f64; 3], eps_r: f64, mu_r: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(DispersionError::InvalidInput(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        for (axis, d) in spacing.iter().enumerate().take(dim) {
            if !(d.is_finite() && *d > 0.0) {
                return Err(DispersionError::InvalidInput(format!(
                    "mesh size along axis {axis} must be positive, got {d}"
                )));
            }
        }
        for (name, v) in [("eps_r", eps_r), ("mu_r", mu_r)] {
            if !(v.is_finite() && v >= 1.0 - MEDIUM_TOL) {
                return Err(DispersionError::InvalidInput(format!("{name} must be >= 1, got {v}")));
            }
        }
        let mut spacing = spacing;
        for axis in dim..3 {
            spacing[axis] = spacing[0];
        }
        Ok(Self { spacing, dim, eps_r, mu_r })
    }

    /// Cubic mesh of size `delta` in vacuum.
    pub fn uniform(dim: usize, delta: f64) -> Result<Self> {
        Self::new(dim, [delta; 3], 1.0, 1.0)
    }

    pub fn dx(&self) -> f64 {
        self.spacing[0]
    }

    /// Mesh sizes of the axes that take part in the discretisation.
    pub fn active_spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    /// Largest active mesh size.
    pub fn max_spacing(&self) -> f64 {
        self.active_spacing().iter().copied().fold(0.0, f64::max)
    }

    /// Phase velocity of the medium, m/s.
    pub fn wave_speed(&self) -> f64 {
        C0 / (self.eps_r * self.mu_r).sqrt()
    }

    /// Refractive index `sqrt(eps_r mu_r)`.
    pub fn index(&self) -> f64 {
        (self.eps_r * self.mu_r).sqrt()
    }
}

/// A monochromatic wave, described by its frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSpec {
    pub frequency: f64,
}

impl WaveSpec {
    pub fn new(frequency: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(DispersionError::InvalidInput(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        Ok(Self { frequency })
    }

    /// The wave whose wavelength in `grid`'s medium spans `n` of the largest
    /// active cells.
    pub fn from_cells_per_wavelength(grid: &GridSpec, n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(DispersionError::InvalidInput(format!(
                "cells per wavelength must be positive, got {n}"
            )));
        }
        Self::new(grid.wave_speed() / (n * grid.max_spacing()))
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    /// Wavelength in the grid's medium, m.
    pub fn wavelength(&self, grid: &GridSpec) -> f64 {
        grid.wave_speed() / self.frequency
    }

    /// Exact (continuum) wavenumber in the grid's medium, rad/m.
    pub fn k_exact(&self, grid: &GridSpec) -> f64 {
        self.angular_frequency() / grid.wave_speed()
    }

    /// `N = λ / Δ`, measured against the largest active mesh size.
    pub fn cells_per_wavelength(&self, grid: &GridSpec) -> f64 {
        self.wavelength(grid) / grid.max_spacing()
    }

    pub(crate) fn check_resolved(&self, grid: &GridSpec) -> Result<()> {
        let n = self.cells_per_wavelength(grid);
        // Allow rounding at exactly two cells per wavelength.
        if n < 2.0 * (1.0 - 1e-12) {
            return Err(DispersionError::UnderResolved { cells_per_wavelength: n });
        }
        Ok(())
    }
}

/// Propagation direction in spherical angles.
///
/// `theta` is measured from the z axis and `phi` from the x axis in the
/// xy-plane.  One-dimensional grids always propagate along x; two-dimensional
/// grids stay in the xy-plane (`theta = pi/2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationAngle {
    pub theta: f64,
    pub phi: f64,
}

impl PropagationAngle {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let eps = 1e-12;
        if !(theta.is_finite() && (-eps..=PI + eps).contains(&theta)) {
            return Err(DispersionError::InvalidInput(format!("theta {theta} outside [0, pi]")));
        }
        if !(phi.is_finite() && (-eps..=2.0 * PI + eps).contains(&phi)) {
            return Err(DispersionError::InvalidInput(format!("phi {phi} outside [0, 2 pi]")));
        }
        Ok(Self { theta, phi })
    }

    /// Direction along the x axis.
    pub fn axis() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// The angle actually used on a grid of dimension `dim`.
    pub fn effective(&self, dim: usize) -> Self {
        match dim {
            1 => Self::axis(),
            2 => Self { theta: PI / 2.0, phi: self.phi },
            _ => *self,
        }
    }

    /// Direction cosines `(sinθ cosφ, sinθ sinφ, cosθ)` after applying the
    /// dimensional restriction.
    pub fn direction(&self, dim: usize) -> [f64; 3] {
        match dim {
            1 => [1.0, 0.0, 0.0],
            2 => [self.phi.cos(), self.phi.sin(), 0.0],
            _ => {
                let (st, ct) = self.theta.sin_cos();
                let (sp, cp) = self.phi.sin_cos();
                [st * cp, st * sp, ct]
            }
        }
    }
}

/// Time step relative to a scheme's own CFL limit, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CourantFraction(f64);

impl CourantFraction {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 && s <= 1.0 {
            Ok(Self(s))
        } else {
            Err(DispersionError::InvalidInput(format!("Courant fraction {s} outside (0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CourantFraction {
    type Error = DispersionError;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<CourantFraction> for f64 {
    fn from(s: CourantFraction) -> f64 {
        s.0
    }
}

/// Exact and numerical wavenumber for one (frequency, time step, direction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    /// Continuum wavenumber, rad/m.
    pub k_exact: f64,
    /// Numerical wavenumber, rad/m.
    pub k_num: f64,
    /// Numerical over physical phase velocity, `k_exact / k_num`.
    pub vp_ratio: f64,
    /// Numerical dispersion error `|k_num - k_exact| / k_exact`.
    pub nde: f64,
}

impl DispersionPoint {
    pub fn new(k_exact: f64, k_num: f64) -> Self {
        Self {
            k_exact,
            k_num,
            vp_ratio: k_exact / k_num,
            nde: (k_num - k_exact).abs() / k_exact,
        }
    }

    /// Signed `k_num - k_exact`.
    pub fn k_error(&self) -> f64 {
        self.k_num - self.k_exact
    }
}
