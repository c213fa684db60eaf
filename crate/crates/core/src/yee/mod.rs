//! Explicit leapfrog FDTD engines on staggered Yee grids.
//!
//! Magnetic fields are advanced first, then electric fields, each from the
//! discrete curl of the other.  Every spatial derivative uses either the
//! two-point stencil `(f[i+1/2] - f[i-1/2]) / Δ` or the four-point stencil
//! `(27 (f[i+1/2] - f[i-1/2]) - (f[i+3/2] - f[i-3/2])) / (24 Δ)`.
//!
//! Boxes are closed by perfect electric conductors or wrapped periodically.
//! Near PEC walls the four-point stencil reads ghost values from the odd
//! image of tangential E and the even image of normal H.

mod field;
mod sim;
mod source;
mod stencil;
mod update;

use thiserror::Error;

use crate::dispersion::DispersionError;

pub use field::{Boundary, Component, FieldArray, FieldState, Layout, Stagger};
pub use sim::{initial_state, run_sim, run_sim_with, FieldFn, InitialCondition, SimConfig, SimOutput};
pub use source::{inject_source, InjectionStyle, ProbeSeries, ProbeSpec, SourceSpec, Waveform};
pub use update::{apply_pec, step, INSTABILITY_FACTOR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("instability at step {step}: field magnitude {max_abs:e}")]
    Instability { step: usize, max_abs: f64 },
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
}
