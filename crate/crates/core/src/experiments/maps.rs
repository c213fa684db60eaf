use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{
    scan_angles, solve_knum, CourantFraction, GridSpec, PropagationAngle, Scheme, WaveSpec, DEFAULT_TOL,
};

use super::{ExperimentError, Result};

/// One family of dispersion evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSlice {
    /// Sweep `(S, φ)` at fixed polar angle.
    FixedTheta { theta: f64, s_values: Vec<f64>, n_phi: usize },
    /// Sweep `(S, θ)` at fixed azimuth.
    FixedPhi { phi: f64, s_values: Vec<f64>, n_theta: usize },
    /// Full `(θ, φ)` surface at one Courant fraction.
    Surface { s: f64, n_theta: usize, n_phi: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub s: f64,
    pub theta_rad: f64,
    pub phi_rad: f64,
    pub k_exact: f64,
    pub k_num: f64,
    pub vp_ratio: f64,
    pub nde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionMap {
    pub slice: MapSlice,
    /// Solved points in sweep order (S-major, then angle).
    pub rows: Vec<MapRow>,
    /// Points where the solver failed; they are left out of `rows`.
    pub failures: usize,
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn sweep(scheme: Scheme, grid: &GridSpec, wave: &WaveSpec, s_values: &[f64], angles: &[PropagationAngle]) -> Result<(Vec<MapRow>, usize)> {
    let fracs = s_values.iter().map(|&s| CourantFraction::new(s)).collect::<Result<Vec<_>, _>>()?;
    let per_s: Vec<(Vec<MapRow>, usize)> = fracs
        .par_iter()
        .map(|&s| {
            let mut rows = Vec::with_capacity(angles.len());
            let mut failed = 0;
            for a in angles {
                match solve_knum(scheme, grid, wave, s, a, DEFAULT_TOL) {
                    Ok(p) => rows.push(MapRow {
                        s: s.value(),
                        theta_rad: a.theta,
                        phi_rad: a.phi,
                        k_exact: p.k_exact,
                        k_num: p.k_num,
                        vp_ratio: p.vp_ratio,
                        nde: p.nde,
                    }),
                    Err(_) => failed += 1,
                }
            }
            (rows, failed)
        })
        .collect();
    let failures = per_s.iter().map(|r| r.1).sum();
    Ok((per_s.into_iter().flat_map(|r| r.0).collect(), failures))
}

/// Evaluate every slice; the tables behind phase-velocity maps over angle
/// and Courant fraction.
pub fn exp_dispersion_maps(
    scheme: Scheme,
    grid: &GridSpec,
    wave: &WaveSpec,
    slices: &[MapSlice],
) -> Result<Vec<DispersionMap>> {
    slices
        .iter()
        .map(|slice| {
            let (rows, failures) = match slice {
                MapSlice::FixedTheta { theta, s_values, n_phi } => {
                    if *n_phi < 2 {
                        return Err(ExperimentError::InvalidInput("n_phi must be >= 2".into()));
                    }
                    let angles = nodes(0.0, 2.0 * PI, *n_phi)
                        .into_iter()
                        .map(|phi| PropagationAngle::new(*theta, phi))
                        .collect::<Result<Vec<_>, _>>()?;
                    sweep(scheme, grid, wave, s_values, &angles)?
                }
                MapSlice::FixedPhi { phi, s_values, n_theta } => {
                    if *n_theta < 2 {
                        return Err(ExperimentError::InvalidInput("n_theta must be >= 2".into()));
                    }
                    let angles = nodes(0.0, PI, *n_theta)
                        .into_iter()
                        .map(|theta| PropagationAngle::new(theta, *phi))
                        .collect::<Result<Vec<_>, _>>()?;
                    sweep(scheme, grid, wave, s_values, &angles)?
                }
                MapSlice::Surface { s, n_theta, n_phi } => {
                    let frac = CourantFraction::new(*s)?;
                    let scan = scan_angles(scheme, grid, wave, frac, *n_theta, *n_phi)?;
                    let rows = scan
                        .solved()
                        .map(|(a, p)| MapRow {
                            s: *s,
                            theta_rad: a.theta,
                            phi_rad: a.phi,
                            k_exact: p.k_exact,
                            k_num: p.k_num,
                            vp_ratio: p.vp_ratio,
                            nde: p.nde,
                        })
                        .collect();
                    (rows, scan.failures())
                }
            };
            Ok(DispersionMap { slice: slice.clone(), rows, failures })
        })
        .collect()
}
