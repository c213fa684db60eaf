//! Reproducible numerical studies built on the dispersion analyser, the Yee
//! engines and the spectral tools.
//!
//! Each study returns plain row structs that serialise straight to CSV.
//! Sweeps over the Courant fraction run in parallel and are assembled in
//! input order, so outputs are byte-identical between runs.

mod cavity;
mod maps;
mod phase;
mod propagation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::DispersionError;
use crate::spectral::SpectralError;
use crate::yee::SimError;

pub use cavity::{
    default_tracked_modes, exp_cavity_2d, exp_cavity_3d, CavityRow, CavityRun, CavitySetup, CavityStudy,
    Polarization,
};
pub use maps::{exp_dispersion_maps, DispersionMap, MapRow, MapSlice};
pub use phase::{measure_phase_velocity, PhaseVelocityCheck};
pub use propagation::{
    analytic_gaussian_at_probe, exp_1d_propagation, run_1d_propagation, Excitation, PropagationRow,
    PropagationRun, PropagationSetup,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid experiment input: {0}")]
    InvalidInput(String),
    #[error("simulation at S = {s} became unstable at step {step} (max |field| = {max_abs:e})")]
    Unstable { s: f64, step: usize, max_abs: f64 },
}

impl ExperimentError {
    /// Attach the Courant fraction to an instability reported by the engine.
    pub(crate) fn at_courant(s: f64) -> impl Fn(SimError) -> ExperimentError {
        move |e| match e {
            SimError::Instability { step, max_abs } => ExperimentError::Unstable { s, step, max_abs },
            other => other.into(),
        }
    }
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

/// Courant fractions above 1 are accepted so that runs past the stability
/// limit report [`ExperimentError::Unstable`] instead of being refused.
pub(crate) fn check_courant(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(ExperimentError::InvalidInput(format!("Courant fraction must be positive, got {s}")))
    }
}

/// Three-point running median; the end points are kept as they are.
pub fn median3(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                values[i]
            } else {
                let mut w = [values[i - 1], values[i], values[i + 1]];
                w.sort_by(f64::total_cmp);
                w[1]
            }
        })
        .collect()
}

/// Whether every step of `values` rises by at most `noise`.
pub fn is_non_increasing(values: &[f64], noise: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + noise)
}

/// Whether `values` falls to an interior minimum, rises after it, and ends
/// below where it started.
pub fn is_dip_then_rise(values: &[f64]) -> bool {
    let n = values.len();
    if n < 3 {
        return false;
    }
    let (i_min, v_min) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    i_min > 0 && i_min + 1 < n && values[n - 1] > v_min && values[0] > values[n - 1]
}

/// Courant fractions `start, start + step, …` up to and including `stop`.
pub fn s_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
}

/// Reproducibility record written next to experiment outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Manifest {
    pub fn new(experiment: impl Into<String>, config: serde_json::Value, seed: Option<u64>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            experiment: experiment.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }
}
