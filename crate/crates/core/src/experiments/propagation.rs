use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{C0, ETA0};
use crate::dispersion::{GridSpec, Scheme};
use crate::yee::{
    run_sim, Component, InitialCondition, InjectionStyle, Layout, ProbeSpec, SimConfig, SourceSpec,
};

use super::{ExperimentError, Result};

/// How the Gaussian pulse enters the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Excitation {
    /// The exact right-going pulse is loaded as the initial field, so the
    /// reading at the source point is the waveform for every `t >= 0`.
    #[default]
    InitialPulse,
    /// The waveform overwrites `Ez` at the source node each step from
    /// `t = dt` on.  The comparison window then starts once the first
    /// injected value can have arrived, `t > d / c`.
    HardSource,
}

/// One-dimensional propagation setup; lengths in cells of size `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationSetup {
    /// Cell size, m.
    pub delta: f64,
    /// Simulated time, s.
    pub total_time: f64,
    /// Cells between the left wall and the source point.
    pub source_cells: usize,
    /// Cells between the source point and the probe.
    pub probe_cells: usize,
    /// Cells between the probe and the right wall.
    pub tail_cells: usize,
    pub amplitude: f64,
    pub excitation: Excitation,
}

impl Default for PropagationSetup {
    /// Δ = 5 cm, t = 36.685 ns, probe 9 m downstream.  The walls are far
    /// enough away that no reflection reaches the probe before the run ends.
    fn default() -> Self {
        Self {
            delta: 5e-2,
            total_time: 3.6685e-8,
            source_cells: 60,
            probe_cells: 180,
            tail_cells: 60,
            amplitude: 1.0,
            excitation: Excitation::InitialPulse,
        }
    }
}

impl PropagationSetup {
    pub fn probe_distance(&self) -> f64 {
        self.probe_cells as f64 * self.delta
    }

    fn source(&self) -> SourceSpec {
        SourceSpec::gaussian(Component::Ez, [self.source_cells, 0, 0], self.amplitude, InjectionStyle::Hard)
    }

    fn config(&self, scheme: Scheme, s: f64) -> Result<SimConfig> {
        let grid = GridSpec::uniform(1, self.delta)?;
        let cells = self.source_cells + self.probe_cells + self.tail_cells;
        let mut cfg = SimConfig::new(scheme, grid, Layout::Line, [cells, 1, 1], s, self.total_time);
        cfg.probes.push(ProbeSpec { component: Component::Ez, site: [self.source_cells + self.probe_cells, 0, 0] });
        let source = self.source();
        match self.excitation {
            Excitation::HardSource => cfg.sources.push(source),
            Excitation::InitialPulse => {
                let x0 = self.source_cells as f64 * self.delta;
                cfg.initial = InitialCondition::Function(Arc::new(move |c, pos, t| {
                    // Field of the pulse that reads waveform(t) at x0.
                    let e = source.value(t - (pos[0] - x0) / C0);
                    match c {
                        Component::Ez => e,
                        _ => -e / ETA0,
                    }
                }));
            }
        }
        Ok(cfg)
    }
}

/// Exact field at distance `distance` (m) downstream of `source` at time `t`
/// (s): the source waveform delayed by `distance / c`.
pub fn analytic_gaussian_at_probe(source: &SourceSpec, distance: f64, t: f64) -> f64 {
    source.value(t - distance / C0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationRow {
    pub s: f64,
    /// `‖num − ref‖₂ / ‖ref‖₂` over the comparison window.
    pub l2: f64,
    /// `max |num − ref| / amplitude` over the comparison window.
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationRun {
    pub row: PropagationRow,
    pub dt: f64,
    pub times: Vec<f64>,
    pub numerical: Vec<f64>,
    pub analytic: Vec<f64>,
}

/// Propagate the pulse at one Courant fraction and compare the probe
/// reading with the delayed waveform.
pub fn run_1d_propagation(scheme: Scheme, s: f64, setup: &PropagationSetup) -> Result<PropagationRun> {
    super::check_courant(s)?;
    let cfg = setup.config(scheme, s)?;
    let out = run_sim(&cfg).map_err(ExperimentError::at_courant(s))?;
    let probe = &out.probes[0];
    let d = setup.probe_distance();
    let source = setup.source();
    let start = match setup.excitation {
        Excitation::InitialPulse => f64::NEG_INFINITY,
        Excitation::HardSource => d / C0 + 0.5 * cfg.dt(),
    };
    let mut times = Vec::new();
    let mut numerical = Vec::new();
    let mut analytic = Vec::new();
    for (i, &v) in probe.values.iter().enumerate() {
        let t = probe.time(i);
        if t >= start {
            times.push(t);
            numerical.push(v);
            analytic.push(analytic_gaussian_at_probe(&source, d, t));
        }
    }
    let (mut err2, mut ref2, mut linf) = (0.0, 0.0, 0.0f64);
    for (n, a) in numerical.iter().zip(&analytic) {
        err2 += (n - a) * (n - a);
        ref2 += a * a;
        linf = linf.max((n - a).abs());
    }
    let l2 = if ref2 > 0.0 { (err2 / ref2).sqrt() } else { err2.sqrt() };
    let amp = setup.amplitude.abs();
    let linf = if amp > 0.0 { linf / amp } else { linf };
    Ok(PropagationRun { row: PropagationRow { s, l2, linf }, dt: cfg.dt(), times, numerical, analytic })
}

/// Waveform errors for every Courant fraction in `s_values`, in input order.
pub fn exp_1d_propagation(scheme: Scheme, s_values: &[f64], setup: &PropagationSetup) -> Result<Vec<PropagationRow>> {
    s_values
        .par_iter()
        .map(|&s| run_1d_propagation(scheme, s, setup).map(|r| r.row))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        let src = SourceSpec::gaussian(Component::Ez, [1, 0, 0], 2.5, InjectionStyle::Hard);
        let d = 9.0;
        assert!((analytic_gaussian_at_probe(&src, d, d / C0 + 0.7 / C0) - 2.5).abs() < 1e-14);
        let t0 = analytic_gaussian_at_probe(&src, 1.3, 0.0);
        assert_eq!(t0, 2.5 * (-16.0 * (0.7f64 + 1.3).powi(2)).exp());
        assert!(analytic_gaussian_at_probe(&src, 1.0, 0.0) < 1e-11);
        for t in [0.0, 1e-9, 3e-9] {
            assert_eq!(analytic_gaussian_at_probe(&src, 0.0, t), src.value(t));
        }
    }

    #[test]
    fn magic_step_matches_to_machine_precision() {
        for excitation in [Excitation::InitialPulse, Excitation::HardSource] {
            let setup = PropagationSetup { excitation, ..Default::default() };
            let run = run_1d_propagation(Scheme::Fdtd22, 1.0, &setup).unwrap();
            assert!(run.row.linf < 1e-10, "{excitation:?}: {}", run.row.linf);
            // The pulse peak passes the probe inside the window.
            assert!(run.analytic.iter().cloned().fold(0.0, f64::max) > 0.99);
        }
    }

    #[test]
    fn smaller_steps_distort_more() {
        let rows = exp_1d_propagation(Scheme::Fdtd22, &[0.5, 0.7, 1.0], &PropagationSetup::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.s).collect::<Vec<_>>(), vec![0.5, 0.7, 1.0]);
        assert!(rows[0].l2 > rows[1].l2 && rows[1].l2 > rows[2].l2);
    }

    #[test]
    fn past_the_limit_is_unstable() {
        let err = run_1d_propagation(Scheme::Fdtd22, 1.2, &PropagationSetup::default()).unwrap_err();
        assert!(matches!(err, ExperimentError::Unstable { s, .. } if s == 1.2), "{err:?}");
        assert!(run_1d_propagation(Scheme::Fdtd22, 0.0, &PropagationSetup::default()).is_err());
    }
}
