//! `fdtd-lab`: dispersion maps, optimal time steps and the propagation and
//! cavity experiments, written as CSV with a JSON manifest alongside.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 solver failure,
//! 4 numerical instability.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fdtd_dispersion::dispersion::{optimal_courant_24, DispersionError, DEFAULT_SEARCH_TOL};
use fdtd_dispersion::experiments::{
    default_tracked_modes, exp_cavity_2d, exp_cavity_3d, exp_dispersion_maps, run_1d_propagation, s_range,
    CavitySetup, CavityStudy, Excitation, ExperimentError, Manifest, MapSlice, Polarization, PropagationSetup,
};
use fdtd_dispersion::output::{write_csv, write_csv_with_header, write_json};
use fdtd_dispersion::spectral::ModeFamily;
use fdtd_dispersion::yee::SimError;
use fdtd_dispersion::{GridSpec, Scheme, WaveSpec};

#[derive(Parser)]
#[command(name = "fdtd-lab", version, about = "Numerical dispersion laboratory for FDTD(2,2) and FDTD(2,4)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical wavenumber and phase velocity over angles and Courant fractions.
    DispersionMap(MapArgs),
    /// Courant fraction minimising the angle-integrated dispersion error of FDTD(2,4).
    OptimalDt(OptimalArgs),
    /// 1D Gaussian-pulse propagation compared with the delayed analytic pulse.
    #[command(name = "run-1d")]
    Run1d(Run1dArgs),
    /// Resonant-frequency errors of a 2D PEC cavity.
    #[command(name = "run-cavity2d")]
    RunCavity2d(Cavity2dArgs),
    /// Resonant-frequency errors of a 3D PEC cavity.
    #[command(name = "run-cavity3d")]
    RunCavity3d(Cavity3dArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SchemeArg {
    Fdtd22,
    Fdtd24,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Fdtd22 => Scheme::Fdtd22,
            SchemeArg::Fdtd24 => Scheme::Fdtd24,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PolArg {
    Tm,
    Te,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExcitationArg {
    InitialPulse,
    HardSource,
}

#[derive(Clone, Serialize)]
#[serde(transparent)]
struct SList(Vec<f64>);

/// `start:stop:step` (inclusive) or a comma-separated list.
fn parse_s_list(text: &str) -> Result<SList, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, c] => {
            let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
            let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
            if !(step > 0.0 && stop >= start) {
                return Err("range needs start <= stop and a positive step".into());
            }
            s_range(start, stop, step)
        }
        [_] => text
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
            .collect::<Result<_, _>>()?,
        _ => return Err("expected start:stop:step or a comma-separated list".into()),
    };
    if values.is_empty() || values.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err("Courant fractions must be positive".into());
    }
    Ok(SList(values))
}

/// `n_theta x n_phi`, e.g. `31x61`.
fn parse_angle_grid(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text.split_once(['x', 'X']).ok_or("expected n_theta x n_phi, e.g. 31x61")?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    let (t, p) = (n(a)?, n(b)?);
    if t < 2 || p < 2 {
        return Err("both grid sizes must be at least 2".into());
    }
    Ok((t, p))
}

#[derive(Clone, Serialize)]
#[serde(transparent)]
struct ModeList(Vec<Vec<u32>>);

/// `m,n[,p]` index triples separated by `;`, e.g. `1,1;1,2`.
fn parse_modes(text: &str) -> Result<ModeList, String> {
    text.split(';')
        .map(|m| {
            m.split(',')
                .map(|i| i.trim().parse::<u32>().map_err(|e| format!("`{i}`: {e}")))
                .collect()
        })
        .collect::<Result<_, _>>()
        .map(ModeList)
}

#[derive(Args, Serialize)]
struct MeshArgs {
    /// Spatial dimension of the mesh.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    dim: u8,
    /// Cell size along x, m.
    #[arg(long)]
    dx: f64,
    /// Cell size along y, m (defaults to --dx).
    #[arg(long)]
    dy: Option<f64>,
    /// Cell size along z, m (defaults to --dx).
    #[arg(long)]
    dz: Option<f64>,
    /// Wave frequency, Hz.
    #[arg(long)]
    freq_hz: f64,
}

impl MeshArgs {
    fn grid(&self) -> Result<GridSpec, DispersionError> {
        GridSpec::new(self.dim as usize, [self.dx, self.dy.unwrap_or(self.dx), self.dz.unwrap_or(self.dx)], 1.0, 1.0)
    }
}

#[derive(Args, Serialize)]
struct MapArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[command(flatten)]
    mesh: MeshArgs,
    /// Courant fractions (dimensionless): `start:stop:step` or `a,b,c`.
    #[arg(long, value_parser = parse_s_list)]
    s_list: SList,
    /// Fix the polar angle, degrees, and sweep the azimuth.
    #[arg(long, conflicts_with = "phi_deg")]
    theta_deg: Option<f64>,
    /// Fix the azimuth, degrees, and sweep the polar angle.
    #[arg(long)]
    phi_deg: Option<f64>,
    /// Angle grid `n_theta x n_phi` over θ ∈ [0, π], φ ∈ [0, 2π].
    #[arg(long, default_value = "31x61", value_parser = parse_angle_grid)]
    grid: (usize, usize),
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct OptimalArgs {
    #[arg(long, value_enum, default_value = "fdtd24")]
    scheme: SchemeArg,
    #[command(flatten)]
    mesh: MeshArgs,
    /// Quadrature grid `n_theta x n_phi` for the angle integral.
    #[arg(long, default_value = "31x61", value_parser = parse_angle_grid)]
    grid: (usize, usize),
    /// Width of the final golden-section interval in S (dimensionless).
    #[arg(long, default_value_t = DEFAULT_SEARCH_TOL)]
    search_tol: f64,
    /// Output CSV path for the objective-vs-S trace.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct Run1dArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Courant fractions (dimensionless): `start:stop:step` or `a,b,c`.
    #[arg(long, value_parser = parse_s_list, default_value = "0.5,0.7,1.0")]
    s_list: SList,
    /// Cell size, m.
    #[arg(long, default_value_t = 5e-2)]
    delta_m: f64,
    /// Simulated time, s.
    #[arg(long, default_value_t = 3.6685e-8)]
    total_time_s: f64,
    /// How the pulse is launched.
    #[arg(long, value_enum, default_value = "initial-pulse")]
    excitation: ExcitationArg,
    /// Summary CSV path; one waveform CSV per S is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CavityArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Courant fractions (dimensionless): `start:stop:step` or `a,b,c`.
    #[arg(long, value_parser = parse_s_list, default_value = "0.2:1.0:0.1")]
    s_list: SList,
    /// Mode indices to track, `m,n[,p]` separated by `;` (default: three lowest).
    #[arg(long, value_parser = parse_modes)]
    modes: Option<ModeList>,
    /// Cell size, m.
    #[arg(long, default_value_t = 4e-2)]
    delta_m: f64,
    /// Run length in periods of the lowest tracked mode.
    #[arg(long)]
    periods: Option<f64>,
    /// Seed of the random initial field.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct Cavity2dArgs {
    #[arg(long, value_enum, default_value = "tm")]
    pol: PolArg,
    /// Cavity side lengths `a,b`, m.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    size_m: Vec<f64>,
    #[command(flatten)]
    common: CavityArgs,
}

#[derive(Args, Serialize)]
struct Cavity3dArgs {
    /// Cavity side lengths `a,b,d`, m.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    size_m: Vec<f64>,
    #[command(flatten)]
    common: CavityArgs,
}

enum Failure {
    Usage(String),
    Solver(String),
    Unstable(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Unstable(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Unstable(m) | Failure::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<DispersionError> for Failure {
    fn from(e: DispersionError) -> Self {
        match e {
            DispersionError::InvalidInput(_) | DispersionError::UnderResolved { .. } | DispersionError::UnsupportedScheme(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Unstable { .. } | ExperimentError::Sim(SimError::Instability { .. }) => {
                Failure::Unstable(e.to_string())
            }
            ExperimentError::Dispersion(d) => d.into(),
            ExperimentError::InvalidInput(_) | ExperimentError::Sim(SimError::InvalidConfig(_)) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Solver(e.to_string()),
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn write_manifest<T: Serialize>(out: &Path, name: &str, args: &T, seed: Option<u64>) -> Result<(), Failure> {
    let config = serde_json::to_value(args).map_err(|e| Failure::Io(e.to_string()))?;
    write_json(&manifest_path(out), &Manifest::new(name, config, seed))?;
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn dispersion_map(args: &MapArgs) -> Result<(), Failure> {
    let grid = args.mesh.grid()?;
    let wave = WaveSpec::new(args.mesh.freq_hz)?;
    let (n_theta, n_phi) = args.grid;
    let slices: Vec<MapSlice> = match (args.theta_deg, args.phi_deg) {
        (Some(t), _) => vec![MapSlice::FixedTheta { theta: t.to_radians(), s_values: args.s_list.0.clone(), n_phi }],
        (None, Some(p)) => vec![MapSlice::FixedPhi { phi: p.to_radians(), s_values: args.s_list.0.clone(), n_theta }],
        (None, None) => args.s_list.0.iter().map(|&s| MapSlice::Surface { s, n_theta, n_phi }).collect(),
    };
    let maps = exp_dispersion_maps(args.scheme.into(), &grid, &wave, &slices)?;
    let rows: Vec<_> = maps.iter().flat_map(|m| m.rows.iter().copied()).collect();
    let failures: usize = maps.iter().map(|m| m.failures).sum();
    write_csv(&args.out, &rows)?;
    write_manifest(&args.out, "dispersion-map", args, None)?;
    let total = rows.len() + failures;
    println!("{} points written to {} ({failures} solver failures)", rows.len(), args.out.display());
    if failures as f64 > 0.01 * total as f64 {
        return Err(Failure::Solver(format!("{failures} of {total} points failed to solve")));
    }
    Ok(())
}

fn optimal_dt(args: &OptimalArgs) -> Result<(), Failure> {
    let grid = args.mesh.grid()?;
    let wave = WaveSpec::new(args.mesh.freq_hz)?;
    let (n_theta, n_phi) = args.grid;
    let opt = optimal_courant_24(args.scheme.into(), &grid, &wave, n_theta, n_phi, args.search_tol)?;
    let mut trace = opt.trace.clone();
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    write_csv_with_header(&args.out, &["s", "objective"], &trace)?;
    write_manifest(&args.out, "optimal-dt", args, None)?;
    println!("s_opt = {:.6}", opt.s_opt);
    println!("dt_opt = {:.6e} s", opt.dt_opt);
    println!("objective = {:.6e} rad/m", opt.objective);
    Ok(())
}

#[derive(Serialize)]
struct WaveformRow {
    t_seconds: f64,
    numerical: f64,
    analytic: f64,
}

fn run_1d(args: &Run1dArgs) -> Result<(), Failure> {
    let setup = PropagationSetup {
        delta: args.delta_m,
        total_time: args.total_time_s,
        excitation: match args.excitation {
            ExcitationArg::InitialPulse => Excitation::InitialPulse,
            ExcitationArg::HardSource => Excitation::HardSource,
        },
        ..PropagationSetup::default()
    };
    let mut summary = Vec::new();
    for &s in &args.s_list.0 {
        let run = run_1d_propagation(args.scheme.into(), s, &setup)?;
        let rows: Vec<WaveformRow> = run
            .times
            .iter()
            .zip(&run.numerical)
            .zip(&run.analytic)
            .map(|((&t_seconds, &numerical), &analytic)| WaveformRow { t_seconds, numerical, analytic })
            .collect();
        write_csv(&sibling(&args.out, &format!("s{s}")), &rows)?;
        println!("S = {s}: L2 = {:.4e}, Linf = {:.4e}", run.row.l2, run.row.linf);
        summary.push(run.row);
    }
    write_csv(&args.out, &summary)?;
    write_manifest(&args.out, "run-1d", args, None)?;
    Ok(())
}

fn cavity_setup(base: CavitySetup, size: &[f64], args: &CavityArgs) -> CavitySetup {
    CavitySetup {
        dimensions: size.to_vec(),
        delta: args.delta_m,
        periods: args.periods.unwrap_or(base.periods),
        seed: args.seed.unwrap_or(base.seed),
        ..base
    }
}

fn report_study(study: &CavityStudy, out: &Path) -> Result<(), Failure> {
    let rows = study.rows();
    write_csv(out, &rows)?;
    for r in &rows {
        match r.rel_error {
            Some(re) => println!("S = {:.3} mode {}: RE = {re:.4e}", r.s, r.mode),
            None => println!("S = {:.3} mode {}: unmatched", r.s, r.mode),
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Resolved<'a, T> {
    #[serde(flatten)]
    args: &'a T,
    setup: &'a CavitySetup,
    modes: &'a [Vec<u32>],
}

fn run_cavity2d(args: &Cavity2dArgs) -> Result<(), Failure> {
    let c = &args.common;
    let setup = cavity_setup(CavitySetup::rectangle_2d(), &args.size_m, c);
    let pol = match args.pol {
        PolArg::Tm => Polarization::Tm,
        PolArg::Te => Polarization::Te,
    };
    let family = if matches!(pol, Polarization::Tm) { ModeFamily::Tm2d } else { ModeFamily::Te2d };
    let modes = match &c.modes {
        Some(m) => m.0.clone(),
        None => default_tracked_modes(family, &setup.dimensions).map_err(Failure::from)?,
    };
    let study = exp_cavity_2d(c.scheme.into(), pol, &modes, &c.s_list.0, &setup)?;
    report_study(&study, &c.out)?;
    write_manifest(&c.out, "run-cavity2d", &Resolved { args, setup: &setup, modes: &modes }, Some(setup.seed))
}

fn run_cavity3d(args: &Cavity3dArgs) -> Result<(), Failure> {
    let c = &args.common;
    let setup = cavity_setup(CavitySetup::cube_3d(), &args.size_m, c);
    let modes = match &c.modes {
        Some(m) => m.0.clone(),
        None => default_tracked_modes(ModeFamily::Cavity3d, &setup.dimensions).map_err(Failure::from)?,
    };
    let study = exp_cavity_3d(c.scheme.into(), &modes, &c.s_list.0, &setup)?;
    report_study(&study, &c.out)?;
    write_manifest(&c.out, "run-cavity3d", &Resolved { args, setup: &setup, modes: &modes }, Some(setup.seed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::DispersionMap(a) => dispersion_map(a),
        Command::OptimalDt(a) => optimal_dt(a),
        Command::Run1d(a) => run_1d(a),
        Command::RunCavity2d(a) => run_cavity2d(a),
        Command::RunCavity3d(a) => run_cavity3d(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
