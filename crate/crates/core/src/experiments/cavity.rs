use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{GridSpec, Scheme};
use crate::spectral::{
    enumerate_modes, find_peaks, group_degenerate, match_and_score, spectrum, CavityMode, ModeFamily,
    ModeGroup, ResonanceReport, Window, DEFAULT_PAD_FACTOR,
};
use crate::yee::{run_sim, Component, InitialCondition, Layout, ProbeSpec, SimConfig};

use super::{is_dip_then_rise, is_non_increasing, median3, ExperimentError, Result};

/// Relative tolerance for treating analytic frequencies as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Tm,
    Te,
}

impl Polarization {
    fn family(self) -> ModeFamily {
        match self {
            Polarization::Tm => ModeFamily::Tm2d,
            Polarization::Te => ModeFamily::Te2d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavitySetup {
    /// Side lengths, m.
    pub dimensions: Vec<f64>,
    /// Cell size, m.
    pub delta: f64,
    /// Run length in periods of the lowest tracked mode.  The same physical
    /// duration is used at every Courant fraction so that all spectra share
    /// one frequency resolution.
    pub periods: f64,
    /// Probe position as fractions of the side lengths.
    pub probe_fractions: [f64; 3],
    pub seed: u64,
    pub pad_factor: usize,
}

impl CavitySetup {
    /// 1 m × 2 m box meshed at 4 cm.
    pub fn rectangle_2d() -> Self {
        Self {
            dimensions: vec![1.0, 2.0],
            delta: 4e-2,
            periods: 500.0,
            probe_fractions: [0.31, 0.57, 0.43],
            seed: 20_240_601,
            pad_factor: DEFAULT_PAD_FACTOR,
        }
    }

    /// 1 m cube meshed at 4 cm.
    pub fn cube_3d() -> Self {
        Self { dimensions: vec![1.0; 3], periods: 300.0, ..Self::rectangle_2d() }
    }

    fn cells(&self) -> Result<[usize; 3]> {
        let mut cells = [1; 3];
        for (c, a) in cells.iter_mut().zip(&self.dimensions) {
            let n = a / self.delta;
            if (n - n.round()).abs() > 1e-9 * n || n.round() < 4.0 {
                return Err(ExperimentError::InvalidInput(format!(
                    "side {a} m is not a whole number (>= 4) of {} m cells",
                    self.delta
                )));
            }
            *c = n.round() as usize;
        }
        Ok(cells)
    }
}

/// One measurement of a tracked mode at one Courant fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityRow {
    pub s: f64,
    pub mode: String,
    pub degeneracy: usize,
    pub f_ref_hz: f64,
    pub f_meas_hz: Option<f64>,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityRun {
    pub s: f64,
    pub dt: f64,
    pub steps: usize,
    /// Report restricted to the tracked modes, in tracking order.
    pub report: ResonanceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityStudy {
    pub scheme: Scheme,
    pub family: ModeFamily,
    pub setup: CavitySetup,
    pub tracked: Vec<ModeGroup>,
    pub runs: Vec<CavityRun>,
}

impl CavityStudy {
    pub fn s_values(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.s).collect()
    }

    /// Relative error of tracked mode `i` at every S; `None` if unmatched.
    pub fn rel_errors(&self, i: usize) -> Vec<Option<f64>> {
        self.runs.iter().map(|r| r.report.entries[i].rel_error).collect()
    }

    /// Estimator resolution: the padded spectral bin width, Hz.
    pub fn bin_width(&self) -> Option<f64> {
        self.runs.first().and_then(|r| r.report.bin_width)
    }

    pub fn rows(&self) -> Vec<CavityRow> {
        self.runs
            .iter()
            .flat_map(|run| {
                run.report.entries.iter().zip(&self.tracked).map(move |(e, g)| CavityRow {
                    s: run.s,
                    mode: e.mode.label(),
                    degeneracy: g.modes.len(),
                    f_ref_hz: e.mode.frequency,
                    f_meas_hz: e.measured,
                    rel_error: e.rel_error,
                })
            })
            .collect()
    }

    /// Median-smoothed errors of tracked mode `i`, or `None` if any run
    /// failed to match it.
    pub fn smoothed(&self, i: usize) -> Option<Vec<f64>> {
        self.rel_errors(i).into_iter().collect::<Option<Vec<f64>>>().map(|v| median3(&v))
    }

    /// Whether the smoothed error of mode `i` never rises by more than
    /// `noise` from one S to the next.
    pub fn non_increasing(&self, i: usize, noise: f64) -> bool {
        self.smoothed(i).is_some_and(|v| is_non_increasing(&v, noise))
    }

    pub fn dip_then_rise(&self, i: usize) -> bool {
        self.smoothed(i).is_some_and(|v| is_dip_then_rise(&v))
    }
}

/// The three lowest modes to track: non-degenerate ones in 2D, the three
/// lowest degenerate groups in 3D (every low cube mode is degenerate).
pub fn default_tracked_modes(family: ModeFamily, dimensions: &[f64]) -> Result<Vec<Vec<u32>>> {
    let mut f_max = crate::constants::C0 / dimensions.iter().cloned().fold(f64::INFINITY, f64::min);
    loop {
        let modes = enumerate_modes(family, dimensions, 1.0, 1.0, f_max)?;
        let groups = group_degenerate(&modes, DEGENERACY_TOL);
        let picked: Vec<Vec<u32>> = groups
            .iter()
            .filter(|g| family == ModeFamily::Cavity3d || g.modes.len() == 1)
            .take(3)
            .map(|g| {
                let rep = representative(g);
                rep.indices[..family.dim()].to_vec()
            })
            .collect();
        if picked.len() == 3 {
            return Ok(picked);
        }
        f_max *= 1.5;
    }
}

/// Mode of a group with the largest indices (so `(1,1,0)` labels its
/// group rather than `(0,1,1)`).
fn representative(g: &ModeGroup) -> CavityMode {
    *g.modes.iter().max_by_key(|m| m.indices).expect("non-empty group")
}

fn probe_site(setup: &CavitySetup, cells: [usize; 3], dim: usize) -> [usize; 3] {
    let mut site = [0; 3];
    for a in 0..dim {
        let i = (setup.probe_fractions[a] * cells[a] as f64).floor() as usize;
        site[a] = i.clamp(1, cells[a] - 1);
    }
    site
}

fn run_cavity(
    scheme: Scheme,
    family: ModeFamily,
    layout: Layout,
    components: &[Component],
    tracked: &[ModeGroup],
    setup: &CavitySetup,
    s: f64,
) -> Result<CavityRun> {
    super::check_courant(s)?;
    let dim = family.dim();
    let cells = setup.cells()?;
    let grid = GridSpec::uniform(dim, setup.delta)?;
    let f_low = tracked.iter().map(|g| g.frequency).fold(f64::INFINITY, f64::min);
    let total_time = setup.periods / f_low;
    let mut cfg = SimConfig::new(scheme, grid, layout, cells, s, total_time);
    cfg.initial = InitialCondition::RandomE { seed: setup.seed, amplitude: 1.0 };
    let site = probe_site(setup, cells, dim);
    cfg.probes = components.iter().map(|&component| ProbeSpec { component, site }).collect();
    let out = run_sim(&cfg).map_err(ExperimentError::at_courant(s))?;

    let mut summed: Option<crate::spectral::Spectrum> = None;
    for p in &out.probes {
        let mean = p.values.iter().sum::<f64>() / p.values.len().max(1) as f64;
        let centred: Vec<f64> = p.values.iter().map(|v| v - mean).collect();
        let spec = spectrum(&centred, cfg.dt(), setup.pad_factor, Window::Hann)?;
        summed = Some(match summed {
            None => spec,
            Some(mut acc) => {
                acc.magnitudes.iter_mut().zip(&spec.magnitudes).for_each(|(a, b)| *a += b);
                acc
            }
        });
    }
    let mut spec = summed.ok_or_else(|| ExperimentError::InvalidInput("no probes".into()))?;

    // Match against every resonance near the tracked ones so that a
    // neighbouring mode's peak cannot be mistaken for a tracked mode.
    // Higher bands would only crowd the peak ranking.
    let f_top = tracked.iter().map(|g| g.frequency).fold(0.0, f64::max) * 1.2;
    let keep = spec.frequencies.iter().take_while(|&&f| f <= 1.1 * f_top).count();
    spec.frequencies.truncate(keep);
    spec.magnitudes.truncate(keep);
    let all = enumerate_modes(family, &setup.dimensions, 1.0, 1.0, f_top)?;
    let groups = group_degenerate(&all, DEGENERACY_TOL);
    let reps: Vec<CavityMode> = groups.iter().map(representative).collect();
    let found = find_peaks(&spec, 4 * reps.len() + 20, 2.0 * spec.native_resolution())?;
    let peaks: Vec<f64> = found.peaks.iter().map(|p| p.frequency).collect();
    let full = match_and_score(&peaks, &reps)?;
    let entries = tracked
        .iter()
        .map(|g| {
            let rep = representative(g);
            let mut e = full
                .entries
                .iter()
                .find(|e| e.mode.indices == rep.indices)
                .cloned()
                .expect("tracked modes are enumerated");
            e.mode = g.modes[0];
            e
        })
        .collect();
    Ok(CavityRun {
        s,
        dt: cfg.dt(),
        steps: cfg.steps(),
        report: ResonanceReport { entries, bin_width: Some(spec.bin_width) },
    })
}

fn tracked_groups(family: ModeFamily, dimensions: &[f64], modes: &[Vec<u32>]) -> Result<Vec<ModeGroup>> {
    if modes.is_empty() {
        return Err(ExperimentError::InvalidInput("no modes to track".into()));
    }
    modes
        .iter()
        .map(|idx| {
            let m = CavityMode::new(family, dimensions, idx, 1.0, 1.0)?;
            let near = enumerate_modes(family, dimensions, 1.0, 1.0, m.frequency * (1.0 + 1e-6))?;
            let mut group = group_degenerate(&near, DEGENERACY_TOL)
                .into_iter()
                .find(|g| g.modes.iter().any(|x| x.indices == m.indices))
                .expect("mode is enumerated");
            // Put the requested indices first so they label the group.
            group.modes.sort_by_key(|x| x.indices != m.indices);
            Ok(group)
        })
        .collect()
}

fn study(
    scheme: Scheme,
    family: ModeFamily,
    layout: Layout,
    components: &[Component],
    modes: &[Vec<u32>],
    s_values: &[f64],
    setup: &CavitySetup,
) -> Result<CavityStudy> {
    if setup.dimensions.len() != family.dim() {
        return Err(ExperimentError::InvalidInput(format!(
            "{family:?} needs {} side lengths, got {}",
            family.dim(),
            setup.dimensions.len()
        )));
    }
    let tracked = tracked_groups(family, &setup.dimensions, modes)?;
    let runs = s_values
        .par_iter()
        .map(|&s| run_cavity(scheme, family, layout, components, &tracked, setup, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(CavityStudy { scheme, family, setup: setup.clone(), tracked, runs })
}

/// Resonance errors of a 2D PEC box for each Courant fraction.
///
/// TM runs probe `Ez`, TE runs probe `Hz`.  The box starts from a seeded
/// random electric field and no source.
pub fn exp_cavity_2d(
    scheme: Scheme,
    polarization: Polarization,
    modes: &[Vec<u32>],
    s_values: &[f64],
    setup: &CavitySetup,
) -> Result<CavityStudy> {
    let (layout, probe) = match polarization {
        Polarization::Tm => (Layout::Tm2d, Component::Ez),
        Polarization::Te => (Layout::Te2d, Component::Hz),
    };
    study(scheme, polarization.family(), layout, &[probe], modes, s_values, setup)
}

/// Resonance errors of a 3D PEC box; the spectra of the three electric
/// probe components are summed.
pub fn exp_cavity_3d(scheme: Scheme, modes: &[Vec<u32>], s_values: &[f64], setup: &CavitySetup) -> Result<CavityStudy> {
    study(
        scheme,
        ModeFamily::Cavity3d,
        Layout::Full3d,
        &[Component::Ex, Component::Ey, Component::Ez],
        modes,
        s_values,
        setup,
    )
}
