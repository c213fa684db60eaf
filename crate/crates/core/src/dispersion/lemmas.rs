//! Numerical checks of the monotonicity of `k̃` in the Courant fraction and
//! of the sign factors that appear when differentiating the dispersion
//! relation implicitly.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::relation::dispersion_lhs;
use super::solve::{solve_knum, DEFAULT_TOL};
use super::{
    CourantFraction, DispersionError, GridSpec, PropagationAngle, Result, Scheme, WaveSpec,
};

/// Central finite-difference estimates of `dk̃/dS` at each Courant fraction.
///
/// Points whose forward neighbour `s + fd_step` would leave `(0, 1]` fall
/// back to the second-order backward difference
/// `(3k(s) - 4k(s-h) + k(s-2h)) / 2h`, so the CFL limit itself can be
/// checked.
pub fn lemma_monotonicity_check(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    angle: &PropagationAngle,
    s_grid: &[f64],
    fd_step: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(DispersionError::InvalidInput(format!("fd_step must be positive, got {fd_step}")));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DispersionError::InvalidInput("s_grid must be strictly increasing".into()));
    }
    let k_at = |s: f64| -> Result<f64> {
        Ok(solve_knum(scheme, grid, wave, CourantFraction::new(s)?, angle, DEFAULT_TOL)?.k_num)
    };
    s_grid
        .iter()
        .map(|&s| {
            CourantFraction::new(s)?;
            let h = fd_step;
            let slope = if s + h <= 1.0 {
                if s - h <= 0.0 {
                    return Err(DispersionError::InvalidInput(format!(
                        "s = {s} is too close to 0 for fd_step {h}"
                    )));
                }
                (k_at(s + h)? - k_at(s - h)?) / (2.0 * h)
            } else {
                if s - 2.0 * h <= 0.0 {
                    return Err(DispersionError::InvalidInput(format!(
                        "fd_step {h} too large for backward difference at s = {s}"
                    )));
                }
                (3.0 * k_at(s)? - 4.0 * k_at(s - h)? + k_at(s - 2.0 * h)?) / (2.0 * h)
            };
            Ok((s, slope))
        })
        .collect()
}

/// `Q = πS cos(πS/(√3 N)) − √3 N sin(πS/(√3 N))` for a uniform cubic mesh.
///
/// `d(LHS)/dS` is a positive multiple of `Q`, so `Q < 0` on `(0, 1]` means the
/// left side shrinks as the time step grows.
pub fn q_factor(cells_per_wavelength: f64, s: CourantFraction) -> Result<f64> {
    let n = cells_per_wavelength;
    if !(n.is_finite() && n >= 2.0) {
        return Err(DispersionError::UnderResolved { cells_per_wavelength: n });
    }
    let s = s.value();
    let root3n = 3f64.sqrt() * n;
    let arg = PI * s / root3n;
    Ok(PI * s * arg.cos() - root3n * arg.sin())
}

/// The three direction-weighted terms of the angular factor `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PTerms {
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
}

impl PTerms {
    pub fn total(&self) -> f64 {
        self.term1 + self.term2 + self.term3
    }
}

/// Terms of `P` with `a = c / ṽ_p = 1 / vp_ratio`.
///
/// Each axis contributes `d_ξ sin(π a d_ξ / N) cos(π a d_ξ / N)` where `d_ξ`
/// is that axis' direction cosine; the x term is `term1`, y `term2`, z
/// `term3`.  Requires `π a / N ∈ (0, π/2)`.
pub fn p_terms(
    grid: &GridSpec,
    wave: &WaveSpec,
    angle: &PropagationAngle,
    vp_ratio: f64,
) -> Result<PTerms> {
    let n = wave.cells_per_wavelength(grid);
    let a = 1.0 / vp_ratio;
    let scale = PI * a / n;
    if !(scale.is_finite() && scale > 0.0 && scale < FRAC_PI_2) {
        return Err(DispersionError::DomainViolation { value: scale });
    }
    let dir = angle.direction(grid.dim);
    let term = |c: f64| {
        let m = scale * c;
        c * m.sin() * m.cos()
    };
    Ok(PTerms { term1: term(dir[0]), term2: term(dir[1]), term3: term(dir[2]) })
}

pub fn p_factor(
    grid: &GridSpec,
    wave: &WaveSpec,
    angle: &PropagationAngle,
    vp_ratio: f64,
) -> Result<f64> {
    p_terms(grid, wave, angle, vp_ratio).map(|t| t.total())
}

/// Left side together with its sign factors at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhsDiagnostics {
    pub lhs: f64,
    pub q: f64,
    pub p: f64,
}

pub fn lhs_diagnostics(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    s: CourantFraction,
    angle: &PropagationAngle,
    vp_ratio: f64,
) -> Result<LhsDiagnostics> {
    Ok(LhsDiagnostics {
        lhs: dispersion_lhs(scheme, grid, wave, s),
        q: q_factor(wave.cells_per_wavelength(grid), s)?,
        p: p_factor(grid, wave, angle, vp_ratio)?,
    })
}
