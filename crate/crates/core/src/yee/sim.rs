use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dispersion::{cfl_max_dt, GridSpec, Scheme};

use super::field::{Boundary, Component, FieldState, Layout};
use super::source::{check_site, inject_source, ProbeSeries, ProbeSpec, SourceSpec};
use super::update::{apply_pec, check_stability, step};
use super::SimError;

/// Field value as a function of component, position (m) and time (s).
pub type FieldFn = Arc<dyn Fn(Component, [f64; 3], f64) -> f64 + Send + Sync>;

/// Initial field state.
#[derive(Clone, Default)]
pub enum InitialCondition {
    #[default]
    Zero,
    /// Uniform random electric field in `[-amplitude, amplitude]` at every
    /// interior sample, zero magnetic field.
    RandomE { seed: u64, amplitude: f64 },
    /// Sampled at each component's own position; E at `t = 0`, H at
    /// `t = -dt/2`.
    Function(FieldFn),
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Zero => f.write_str("Zero"),
            InitialCondition::RandomE { seed, amplitude } => {
                f.debug_struct("RandomE").field("seed", seed).field("amplitude", amplitude).finish()
            }
            InitialCondition::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub grid: GridSpec,
    pub layout: Layout,
    /// Cells per axis; entries beyond the layout dimension are ignored.
    pub cells: [usize; 3],
    pub boundary: Boundary,
    /// Courant fraction of the scheme's own stability limit.  Values above 1
    /// are accepted so that unstable runs can be studied.
    pub s: f64,
    /// Simulated time, seconds.
    pub total_time: f64,
    pub sources: Vec<SourceSpec>,
    pub probes: Vec<ProbeSpec>,
    pub initial: InitialCondition,
}

impl SimConfig {
    /// Bare configuration with no sources, probes or initial field.
    pub fn new(scheme: Scheme, grid: GridSpec, layout: Layout, cells: [usize; 3], s: f64, total_time: f64) -> Self {
        Self {
            scheme,
            grid,
            layout,
            cells,
            boundary: Boundary::Pec,
            s,
            total_time,
            sources: Vec::new(),
            probes: Vec::new(),
            initial: InitialCondition::Zero,
        }
    }

    pub fn dt(&self) -> f64 {
        self.s * cfl_max_dt(self.scheme, &self.grid)
    }

    /// `ceil(total_time / dt)`, ignoring round-off just above an integer.
    pub fn steps(&self) -> usize {
        let ratio = self.total_time / self.dt();
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as usize
        } else {
            ratio.ceil() as usize
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(SimError::InvalidConfig(format!("Courant fraction must be positive, got {}", self.s)));
        }
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "total time must be finite and >= 0, got {}",
                self.total_time
            )));
        }
        if self.grid.dim != self.layout.dim() {
            return Err(SimError::InvalidConfig(format!(
                "grid is {}-dimensional but the {:?} layout needs {}",
                self.grid.dim,
                self.layout,
                self.layout.dim()
            )));
        }
        if let InitialCondition::RandomE { amplitude, .. } = self.initial {
            if !amplitude.is_finite() {
                return Err(SimError::InvalidConfig(format!("random amplitude must be finite, got {amplitude}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub state: FieldState,
    pub probes: Vec<ProbeSeries>,
}

/// Build the initial state of `config` without stepping it.
pub fn initial_state(config: &SimConfig) -> Result<FieldState, SimError> {
    config.validate()?;
    let dt = config.dt();
    let mut state = FieldState::new(config.layout, config.boundary, config.cells, dt)?;
    for src in &config.sources {
        check_site(&state, src.component, src.site)?;
    }
    for p in &config.probes {
        check_site(&state, p.component, p.site)?;
    }
    let spacing = config.grid.spacing;
    match &config.initial {
        InitialCondition::Zero => {}
        InitialCondition::RandomE { seed, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let skip: Vec<Vec<bool>> = state
                .fields
                .iter()
                .map(|f| (0..f.data.len()).map(|o| state.on_pec_face(f.component, f.index_of(o))).collect())
                .collect();
            for (f, skip) in state.fields.iter_mut().zip(skip) {
                if !f.component.is_electric() {
                    continue;
                }
                for (v, on_wall) in f.data.iter_mut().zip(skip) {
                    if !on_wall {
                        *v = amplitude * rng.gen_range(-1.0..=1.0);
                    }
                }
            }
        }
        InitialCondition::Function(g) => {
            let values: Vec<Vec<f64>> = state
                .fields
                .iter()
                .map(|f| {
                    let t = if f.component.is_electric() { 0.0 } else { -0.5 * dt };
                    (0..f.data.len())
                        .map(|o| g(f.component, state.position(f.component, f.index_of(o), spacing), t))
                        .collect()
                })
                .collect();
            for (f, v) in state.fields.iter_mut().zip(values) {
                f.data = v;
            }
        }
    }
    apply_pec(&mut state);
    let source_peak = config.sources.iter().map(|s| s.amplitude.abs()).fold(0.0, f64::max);
    state.reference_max = state.max_abs().max(source_peak);
    check_stability(&state)?;
    Ok(state)
}

/// Run `config` to completion, calling `observe` after every step.
pub fn run_sim_with<F>(config: &SimConfig, mut observe: F) -> Result<SimOutput, SimError>
where
    F: FnMut(&FieldState),
{
    let mut state = initial_state(config)?;
    let dt = state.dt;
    let steps = config.steps();
    let mut probes: Vec<ProbeSeries> = config
        .probes
        .iter()
        .map(|p| ProbeSeries {
            probe: p.clone(),
            dt,
            t0: if p.component.is_electric() { dt } else { 0.5 * dt },
            values: Vec::with_capacity(steps),
        })
        .collect();
    let offsets: Vec<(usize, usize)> = config
        .probes
        .iter()
        .map(|p| {
            let fi = state.fields.iter().position(|f| f.component == p.component).expect("validated");
            (fi, state.fields[fi].offset(p.site))
        })
        .collect();

    for _ in 0..steps {
        step(config.scheme, &mut state, &config.grid)?;
        let t = state.step as f64 * dt;
        for src in &config.sources {
            inject_source(&mut state, src, t)?;
        }
        for (series, &(fi, o)) in probes.iter_mut().zip(&offsets) {
            series.values.push(state.fields[fi].data[o]);
        }
        observe(&state);
    }
    Ok(SimOutput { state, probes })
}

/// Run `config` to completion.
pub fn run_sim(config: &SimConfig) -> Result<SimOutput, SimError> {
    run_sim_with(config, |_| {})
}
