use std::f64::consts::PI;

use rayon::prelude::*;

use super::solve::{solve_knum, DEFAULT_TOL};
use super::{
    CourantFraction, DispersionError, DispersionPoint, GridSpec, PropagationAngle, Result, Scheme,
    WaveSpec,
};

/// One entry of an angle scan. Solver failures are kept, not propagated.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub angle: PropagationAngle,
    pub result: Result<DispersionPoint>,
}

/// Dense `n_theta × n_phi` table of dispersion points, theta-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleScan {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub points: Vec<ScanPoint>,
}

impl AngleScan {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> &ScanPoint {
        &self.points[i_theta * self.phis.len() + i_phi]
    }

    pub fn solved(&self) -> impl Iterator<Item = (&PropagationAngle, &DispersionPoint)> {
        self.points.iter().filter_map(|p| p.result.as_ref().ok().map(|d| (&p.angle, d)))
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.result.is_err()).count()
    }
}

pub(crate) fn uniform_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Solve on uniform grids `theta ∈ [0, π]`, `phi ∈ [0, 2π]`.
pub fn scan_angles(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    s: CourantFraction,
    n_theta: usize,
    n_phi: usize,
) -> Result<AngleScan> {
    if n_theta < 2 || n_phi < 2 {
        return Err(DispersionError::InvalidInput(format!(
            "angle grid must be at least 2x2, got {n_theta}x{n_phi}"
        )));
    }
    wave.check_resolved(grid)?;
    let thetas = uniform_nodes(0.0, PI, n_theta);
    let phis = uniform_nodes(0.0, 2.0 * PI, n_phi);
    let points = (0..n_theta * n_phi)
        .into_par_iter()
        .map(|idx| {
            let angle = PropagationAngle { theta: thetas[idx / n_phi], phi: phis[idx % n_phi] };
            let result = solve_knum(scheme, grid, wave, s, &angle, DEFAULT_TOL);
            ScanPoint { angle, result }
        })
        .collect();
    Ok(AngleScan { thetas, phis, points })
}

/// Scan point with the largest numerical wavenumber.
pub fn max_knum_over_angles(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    s: CourantFraction,
    n_theta: usize,
    n_phi: usize,
) -> Result<(PropagationAngle, DispersionPoint)> {
    let scan = scan_angles(scheme, grid, wave, s, n_theta, n_phi)?;
    scan.solved()
        .fold(None::<(PropagationAngle, DispersionPoint)>, |best, (a, p)| match best {
            Some((_, b)) if b.k_num >= p.k_num => best,
            _ => Some((*a, *p)),
        })
        .ok_or(DispersionError::AllPointsFailed)
}
