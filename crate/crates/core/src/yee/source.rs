use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::C0;

use super::field::{Component, FieldState};
use super::SimError;

/// Time-domain excitation shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Waveform {
    /// `exp(-coefficient · (offset - c t)²)` with the offset in metres and
    /// the coefficient in m⁻².
    GaussianPulse { coefficient: f64, offset: f64 },
}

impl Waveform {
    /// The pulse used for one-dimensional propagation runs.
    pub const STANDARD_PULSE: Waveform = Waveform::GaussianPulse { coefficient: 16.0, offset: 0.7 };

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Waveform::GaussianPulse { coefficient, offset } => {
                let u = offset - C0 * t;
                (-coefficient * u * u).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InjectionStyle {
    /// Overwrite the field sample.
    Hard,
    /// Add to the field sample.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub component: Component,
    pub site: [usize; 3],
    pub amplitude: f64,
    pub waveform: Waveform,
    pub style: InjectionStyle,
}

impl SourceSpec {
    pub fn gaussian(component: Component, site: [usize; 3], amplitude: f64, style: InjectionStyle) -> Self {
        Self { component, site, amplitude, waveform: Waveform::STANDARD_PULSE, style }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * self.waveform.value(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub component: Component,
    pub site: [usize; 3],
}

/// Samples recorded by one probe, one per executed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub probe: ProbeSpec,
    pub dt: f64,
    /// Time of the first sample, seconds.
    pub t0: f64,
    pub values: Vec<f64>,
}

impl ProbeSeries {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.time(i)).collect()
    }

    /// Write `t_seconds,value` rows with a header line.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let rows: Vec<(f64, f64)> = self.values.iter().enumerate().map(|(i, v)| (self.time(i), *v)).collect();
        crate::output::write_csv_with_header(path.as_ref(), &["t_seconds", "value"], &rows)
    }
}

/// Check that `site` is an interior sample of `component`.
pub(crate) fn check_site(state: &FieldState, component: Component, site: [usize; 3]) -> Result<(), SimError> {
    let field = state.field(component).ok_or_else(|| {
        SimError::InvalidConfig(format!("{component} is not part of the {:?} layout", state.layout))
    })?;
    let dim = state.layout.dim();
    let inside = (0..3).all(|a| {
        let n = field.shape[a];
        if a >= dim {
            site[a] == 0
        } else {
            site[a] < n && (state.boundary == super::Boundary::Periodic || (site[a] > 0 && site[a] + 1 < n))
        }
    });
    if inside {
        Ok(())
    } else {
        Err(SimError::InvalidConfig(format!(
            "site {site:?} is not interior to {component} with shape {:?}",
            field.shape
        )))
    }
}

/// Drive `source` at time `t` (seconds).
pub fn inject_source(state: &mut FieldState, source: &SourceSpec, t: f64) -> Result<(), SimError> {
    if !(t >= 0.0) {
        return Err(SimError::InvalidConfig(format!("source time must be >= 0, got {t}")));
    }
    check_site(state, source.component, source.site)?;
    let v = source.value(t);
    let field = state.field_mut(source.component).expect("checked above");
    let o = field.offset(source.site);
    match source.style {
        InjectionStyle::Hard => field.data[o] = v,
        InjectionStyle::Soft => field.data[o] += v,
    }
    Ok(())
}
