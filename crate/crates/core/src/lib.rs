//! Numerical-dispersion laboratory for explicit FDTD schemes.
//!
//! The crate has four layers:
//!
//! * [`dispersion`] evaluates and inverts the discrete dispersion relations of
//!   the second-order (FDTD(2,2)) and fourth-order-in-space (FDTD(2,4)) Yee
//!   schemes, scans propagation angles and Courant fractions, and searches
//!   for dispersion-optimal time steps.
//! * [`yee`] holds the explicit leapfrog engines in one, two and three
//!   dimensions that the analytical results are checked against.
//! * [`spectral`] turns probe time series into spectra and matches measured
//!   peaks to analytic cavity resonances.
//! * [`experiments`] strings the above together into reproducible studies
//!   with CSV output.

pub mod constants;
pub mod dispersion;
pub mod experiments;
pub mod output;
pub mod spectral;
pub mod yee;

pub use dispersion::{
    CourantFraction, DispersionError, DispersionPoint, GridSpec, PropagationAngle, Scheme,
    WaveSpec,
};
