use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::C0;
use crate::dispersion::{solve_knum, CourantFraction, GridSpec, PropagationAngle, Scheme, WaveSpec, DEFAULT_TOL};
use crate::yee::{run_sim_with, Boundary, Component, InitialCondition, Layout, SimConfig};

use super::{ExperimentError, Result};

const CELL: f64 = 1e-2;
const WAVELENGTHS: usize = 3;
const STEPS: usize = 200;

/// Phase velocity of a simulated standing wave against the analyser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVelocityCheck {
    pub scheme: crate::dispersion::Scheme,
    pub cells_per_wavelength: usize,
    pub s: f64,
    /// Angular frequency fitted from the simulation, rad/s.
    pub omega: f64,
    /// `ω̃ / (c k)` measured on the grid.
    pub vp_measured: f64,
    /// `ṽ_p / c` from the dispersion relation at the fitted frequency.
    pub vp_predicted: f64,
    pub rel_diff: f64,
}

/// March `cos(k x)` on a periodic line of `cells_per_wavelength` cells per
/// wavelength and fit its temporal frequency from the leapfrog recurrence
/// `P(n+1) + P(n-1) = 2 cos(ω̃ Δt) P(n)` of its modal amplitude.
pub fn measure_phase_velocity(scheme: Scheme, cells_per_wavelength: usize, s: f64) -> Result<PhaseVelocityCheck> {
    if cells_per_wavelength < 3 {
        return Err(ExperimentError::InvalidInput(format!(
            "need at least 3 cells per wavelength, got {cells_per_wavelength}"
        )));
    }
    let s_frac = CourantFraction::new(s)?;
    let grid = GridSpec::uniform(1, CELL)?;
    let cells = cells_per_wavelength * WAVELENGTHS;
    let k = 2.0 * PI / (cells_per_wavelength as f64 * CELL);
    let mut cfg = SimConfig::new(scheme, grid, Layout::Line, [cells, 1, 1], s, 0.0);
    cfg.boundary = Boundary::Periodic;
    cfg.total_time = STEPS as f64 * cfg.dt();
    cfg.initial = InitialCondition::Function(Arc::new(move |c, pos, _| match c {
        Component::Ez => (k * pos[0]).cos(),
        _ => 0.0,
    }));
    let basis: Vec<f64> = (0..cells).map(|i| (k * i as f64 * CELL).cos()).collect();
    let project = |e: &[f64]| e.iter().zip(&basis).map(|(a, b)| a * b).sum::<f64>();

    let initial = crate::yee::initial_state(&cfg)?;
    let mut amps = vec![project(&initial.field(Component::Ez).expect("line layout").data)];
    run_sim_with(&cfg, |st| amps.push(project(&st.field(Component::Ez).expect("line layout").data)))?;

    let (mut num, mut den) = (0.0, 0.0);
    for w in amps.windows(3) {
        num += (w[0] + w[2]) * w[1];
        den += 2.0 * w[1] * w[1];
    }
    let dt = cfg.dt();
    let omega = (num / den).clamp(-1.0, 1.0).acos() / dt;
    let vp_measured = omega / (C0 * k);
    let wave = WaveSpec::new(omega / (2.0 * PI))?;
    let p = solve_knum(scheme, &grid, &wave, s_frac, &PropagationAngle::axis(), DEFAULT_TOL)?;
    let vp_predicted = p.vp_ratio;
    Ok(PhaseVelocityCheck {
        scheme,
        cells_per_wavelength,
        s,
        omega,
        vp_measured,
        vp_predicted,
        rel_diff: (vp_measured - vp_predicted).abs() / vp_predicted,
    })
}
