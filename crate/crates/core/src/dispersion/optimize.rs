//! Dispersion-optimal time steps for the four-point scheme.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scan::uniform_nodes;
use super::solve::{solve_knum, DEFAULT_TOL};
use super::{
    cfl_max_dt, CourantFraction, DispersionError, GridSpec, PropagationAngle, Result, Scheme,
    WaveSpec,
};

/// Lower end of the Courant-fraction search interval.
pub const S_SEARCH_MIN: f64 = 1e-3;

pub const DEFAULT_SEARCH_TOL: f64 = 1e-4;

/// Largest fraction of failed quadrature points that is tolerated.
const MAX_FAILURE_FRACTION: f64 = 0.01;

/// Which side of the physical wavenumber `k̃` stays on when no crossing exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingSide {
    Above,
    Below,
}

impl fmt::Display for CrossingSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossingSide::Above => "above k",
            CrossingSide::Below => "below k",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCourant {
    pub s_opt: f64,
    /// Time step at `s_opt`, seconds.
    pub dt_opt: f64,
    /// Quadrature of `|k̃ - k|` over the angle grid at `s_opt`.
    pub objective: f64,
    /// Quadrature points dropped because the solver failed at `s_opt`.
    pub failed_points: usize,
    /// Every `(s, objective)` evaluated by the search, in call order.
    pub trace: Vec<(f64, f64)>,
}

/// Golden-section minimisation of `f` on `[a, b]` down to an interval of
/// width `tol`.
///
/// Returns the best evaluated point and the full evaluation trace.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64, Vec<(f64, f64)>)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b && tol > 0.0) {
        return Err(DispersionError::InvalidInput(format!(
            "golden section needs a < b and tol > 0, got [{a}, {b}], tol {tol}"
        )));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut trace = Vec::new();
    let mut eval = |x: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let y = f(x)?;
        trace.push((x, y));
        Ok(y)
    };
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1, &mut trace)?;
    let mut f2 = eval(x2, &mut trace)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1, &mut trace)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2, &mut trace)?;
        }
    }
    let (x, y) = trace
        .iter()
        .copied()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("at least two evaluations");
    Ok((x, y, trace))
}

/// Trapezoid weights for `n` uniform nodes on an interval of length `len`.
fn trapezoid_weights(n: usize, len: f64) -> Vec<f64> {
    let h = len / (n - 1) as f64;
    (0..n).map(|i| if i == 0 || i + 1 == n { 0.5 * h } else { h }).collect()
}

/// Quadrature of `|k̃ - k|` over the propagation angles available on the
/// grid: the full `(θ, φ)` rectangle in 3D, `φ` alone in 2D and the single
/// axis direction in 1D.  Returns the value and the number of failed points.
pub(crate) fn angular_objective(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    s: CourantFraction,
    n_theta: usize,
    n_phi: usize,
) -> Result<(f64, usize)> {
    let (thetas, w_theta) = match grid.dim {
        3 => (uniform_nodes(0.0, PI, n_theta), trapezoid_weights(n_theta, PI)),
        _ => (vec![PI / 2.0], vec![1.0]),
    };
    let (phis, w_phi) = match grid.dim {
        1 => (vec![0.0], vec![1.0]),
        _ => (uniform_nodes(0.0, 2.0 * PI, n_phi), trapezoid_weights(n_phi, 2.0 * PI)),
    };
    let mut total = 0.0;
    let mut failed = 0;
    for (theta, wt) in thetas.iter().zip(&w_theta) {
        for (phi, wp) in phis.iter().zip(&w_phi) {
            let angle = PropagationAngle { theta: *theta, phi: *phi };
            match solve_knum(scheme, grid, wave, s, &angle, DEFAULT_TOL) {
                Ok(p) => total += wt * wp * p.k_error().abs(),
                Err(DispersionError::InvalidInput(msg)) => {
                    return Err(DispersionError::InvalidInput(msg))
                }
                Err(_) => failed += 1,
            }
        }
    }
    let count = thetas.len() * phis.len();
    if failed as f64 > MAX_FAILURE_FRACTION * count as f64 {
        return Err(DispersionError::TooManyFailures { failed, total: count });
    }
    Ok((total, failed))
}

/// Courant fraction minimising the angular integral of `|k̃ - k|` for the
/// four-point scheme.
///
/// The FDTD(2,2) objective decreases monotonically in `S` (its optimum is
/// always the CFL limit), so that scheme is rejected.
pub fn optimal_courant_24(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    n_theta: usize,
    n_phi: usize,
    search_tol: f64,
) -> Result<OptimalCourant> {
    if scheme == Scheme::Fdtd22 {
        return Err(DispersionError::UnsupportedScheme(
            "FDTD(2,2): k_num decreases monotonically towards k as S grows, so the dispersion \
             error is smallest at the CFL limit S = 1; no search is needed"
                .into(),
        ));
    }
    if n_theta < 2 || n_phi < 2 {
        return Err(DispersionError::InvalidInput(format!(
            "quadrature grid must be at least 2x2, got {n_theta}x{n_phi}"
        )));
    }
    wave.check_resolved(grid)?;
    let objective = |s: f64| -> Result<f64> {
        angular_objective(scheme, grid, wave, CourantFraction::new(s)?, n_theta, n_phi).map(|r| r.0)
    };
    let (s_opt, _, trace) = golden_section(objective, S_SEARCH_MIN, 1.0, search_tol)?;
    let s_frac = CourantFraction::new(s_opt)?;
    let (value, failed_points) = angular_objective(scheme, grid, wave, s_frac, n_theta, n_phi)?;
    Ok(OptimalCourant {
        s_opt,
        dt_opt: s_opt * cfl_max_dt(scheme, grid),
        objective: value,
        failed_points,
        trace,
    })
}

/// Courant fraction at which `k̃ - k` changes sign along `angle` for the
/// four-point scheme, located by bisection to width `tol`.
pub fn remark2_crossing(
    grid: &GridSpec,
    wave: &WaveSpec,
    angle: &PropagationAngle,
    tol: f64,
) -> Result<f64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(DispersionError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let diff = |s: f64| -> Result<f64> {
        let p = solve_knum(Scheme::Fdtd24, grid, wave, CourantFraction::new(s)?, angle, DEFAULT_TOL)?;
        Ok(p.k_error())
    };
    let (mut lo, mut hi) = (S_SEARCH_MIN, 1.0);
    let d_lo = diff(lo)?;
    let d_hi = diff(hi)?;
    if d_hi >= 0.0 {
        return Err(DispersionError::NoCrossing { side: CrossingSide::Above });
    }
    if d_lo <= 0.0 {
        return Err(DispersionError::NoCrossing { side: CrossingSide::Below });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if diff(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
