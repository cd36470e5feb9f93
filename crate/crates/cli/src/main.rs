mod config;
mod output;

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use unitary_dirac::checks::{self, Report};
use unitary_dirac::fields::{self, GaugeCoefficients};
use unitary_dirac::grid::{Grid, Grid3, GridField, SpaceField};
use unitary_dirac::nls::{self, conserved_quantities, evolve, NlsState, Nonlinearity};
use unitary_dirac::radial::{solve_bound, Coupling, RadialProblem};
use unitary_dirac::scattering::{
    coulomb_high_energy, dcs_coulomb, rutherford, sweep_ep, ScatterKinematics, Sigma1Mode,
};
use unitary_dirac::spectrum::{energy_conventional, energy_modified, level_order_report, CouplingConstants};
use unitary_dirac::tolerances::Tolerances;
use unitary_dirac::{Execution, ALPHA, ELECTRON_MASS_EV};

use config::{ConfigFile, Resolver};
use output::{Cell, Header, Table};

/// Failures, split by exit code: domain and I/O errors exit with 1, usage
/// errors with 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn domain(e: impl fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Implements `Display` through the clap value name, so enums print the way
/// they are written on the command line and in config files.
macro_rules! display_as_value {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
            }
        }
    )*};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MassUnit {
    #[value(name = "electron_mass", alias = "electron-mass")]
    ElectronMass,
    #[value(name = "ev", alias = "eV")]
    Ev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CouplingArg {
    Scalar,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sigma1Arg {
    Exact,
    HighEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NlsMode {
    Cubic,
    Choquard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Initial {
    Sech,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Point,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    PercentTable,
    Ordering,
    RutherfordLimit,
    Soliton,
    SpinSums,
    All,
}

display_as_value!(MassUnit, Format, CouplingArg, Sigma1Arg, NlsMode, Initial, Source, Target);

#[derive(Debug, Parser)]
#[command(
    name = "unitary-dirac",
    version,
    about = "Spectra, cross sections, gauge checks and the nonlinear Schrodinger limit of the scalar-coupled Dirac equation"
)]
struct Cli {
    /// Configuration file of `key = value` lines (default: $UNITARY_DIRAC_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fine-structure constant.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Unit of energies and masses on input and output.
    #[arg(long, global = true)]
    mass_unit: Option<MassUnit>,
    /// Output format.
    #[arg(long = "format", global = true)]
    output: Option<Format>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levels of one shell under both theories, with energy ranks.
    Spectrum(SpectrumArgs),
    /// Shooting solution of one radial bound state.
    Radial(RadialArgs),
    /// Angular sweep of the Coulomb or electron-proton cross section.
    Scatter(ScatterArgs),
    /// Split-step evolution of the 1D nonlinear Schrodinger equation.
    Nls(NlsArgs),
    /// Green's-function potential of a static source on a cubic grid.
    Fields(FieldsArgs),
    /// Convergence of the gauge constraint and gauge covariance residuals.
    GaugeCheck(GaugeArgs),
    /// Gamma-matrix identity suite.
    AlgebraCheck,
    /// Re-run one acceptance computation and print its verdict.
    Reproduce(ReproduceArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Radial(_) => "radial",
            Command::Scatter(_) => "scatter",
            Command::Nls(_) => "nls",
            Command::Fields(_) => "fields",
            Command::GaugeCheck(_) => "gauge-check",
            Command::AlgebraCheck => "algebra-check",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

const COMMANDS: &[&str] = &[
    "spectrum",
    "radial",
    "scatter",
    "nls",
    "fields",
    "gauge-check",
    "algebra-check",
    "reproduce",
];

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Nuclear charge (non-integer values allowed).
    #[arg(long)]
    z: Option<f64>,
    /// Principal quantum number.
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Debug, Args)]
struct RadialArgs {
    #[arg(long)]
    z: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<i32>,
    /// Excitation index among states of the given kappa.
    #[arg(long)]
    n_r: Option<u32>,
    #[arg(long)]
    coupling: Option<CouplingArg>,
    /// Log-grid step.
    #[arg(long)]
    step: Option<f64>,
    /// Emit the radial functions instead of the summary row.
    #[arg(long)]
    profile: bool,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    /// Total energy of the incident electron.
    #[arg(long)]
    energy: Option<f64>,
    /// Target mass; without it, scattering is off a fixed Coulomb centre.
    #[arg(long)]
    target_mass: Option<f64>,
    /// Charge of the fixed centre.
    #[arg(long)]
    z: Option<f64>,
    /// Angles in degrees: `start:stop:intervals` or a comma-separated list.
    #[arg(long)]
    theta_grid: Option<String>,
    /// Treatment of the scalar-vertex spin sum.
    #[arg(long)]
    mode: Option<Sigma1Arg>,
}

#[derive(Debug, Args)]
struct NlsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Interval between snapshots (default: only the initial and final states).
    #[arg(long)]
    snapshot_every: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    mode: Option<NlsMode>,
    #[arg(long)]
    initial: Option<Initial>,
    #[arg(long, allow_hyphen_values = true)]
    velocity: Option<f64>,
    /// Standard deviation of the Gaussian initial state's density.
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Debug, Args)]
struct FieldsArgs {
    /// Cells per axis.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    source: Option<Source>,
    /// Radius of the ball source.
    #[arg(long)]
    radius: Option<f64>,
    /// Also write the full 3D potential in the binary field format.
    #[arg(long)]
    field_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GaugeArgs {
    /// Odd powers and coefficients, e.g. `1:1.0,3:-0.5`.
    #[arg(long, allow_hyphen_values = true)]
    coefficients: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    charge: Option<f64>,
    /// Samples per axis of the coarse grid; the fine grid halves the step.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    target: Target,
}

/// Resolved global settings.
struct Run {
    command: &'static str,
    alpha: f64,
    unit: MassUnit,
    format: Format,
    out: Option<PathBuf>,
    exec: Execution,
    tol: Tolerances,
    resolver: Resolver,
}

impl Run {
    /// Electron mass in the configured unit.
    fn electron_mass(&self) -> f64 {
        match self.unit {
            MassUnit::ElectronMass => 1.0,
            MassUnit::Ev => ELECTRON_MASS_EV,
        }
    }

    fn key(&self, param: &str) -> String {
        format!("{}.{param}", self.command)
    }

    fn value<T>(&self, param: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: std::str::FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        self.resolver.value(&self.key(param), flag, default)
    }

    fn choice<T: ValueEnum + fmt::Display>(&self, param: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        self.resolver.choice(&self.key(param), flag, default)
    }

    fn emit(&self, table: &Table, notes: Vec<String>) -> Result<(), CliError> {
        let header = Header {
            command: self.command.to_string(),
            alpha: self.alpha,
            units: self.unit.to_string(),
            tolerances: self.tol.entries(),
            params: self.resolver.effective(),
            notes,
        };
        let write = |w: &mut dyn Write| match self.format {
            Format::Csv => output::write_csv(&header, table, w),
            Format::Json => output::write_json(&header, table, w),
        };
        match &self.out {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                write(&mut f)?;
                f.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                write(&mut lock)?;
            }
        }
        Ok(())
    }
}

fn setup(cli: &Cli) -> Result<Run, CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let names: Vec<&str> = Tolerances::default().entries().into_iter().map(|(n, _)| n).collect();
    file.check_keys(COMMANDS, &names)?;
    let mut tol = Tolerances::default();
    for (name, v) in file.tolerance_overrides() {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance {name}: '{v}' is not a number")))?;
        tol.set(name, v).map_err(CliError::Usage)?;
    }
    for spec in &cli.tol {
        let (name, v) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got '{spec}'")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance {name}: '{v}' is not a number")))?;
        tol.set(name, v).map_err(CliError::Usage)?;
    }
    let resolver = Resolver::new(file);
    let alpha = resolver.value("alpha", cli.alpha, ALPHA)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CliError::Usage(format!("alpha = {alpha} must be positive")));
    }
    let unit = resolver.choice("mass_unit", cli.mass_unit, MassUnit::ElectronMass)?;
    let format = resolver.choice("output", cli.output, Format::Csv)?;
    let out = match &cli.out {
        Some(p) => Some(p.clone()),
        None => {
            let s = resolver.value("out", None, String::new())?;
            (!s.is_empty()).then(|| PathBuf::from(s))
        }
    };
    let sequential = resolver.value("sequential", cli.sequential.then_some(true), false)?;
    Ok(Run {
        command: cli.command.name(),
        alpha,
        unit,
        format,
        out,
        exec: if sequential { Execution::Sequential } else { Execution::Parallel },
        tol,
        resolver,
    })
}

fn spectrum(run: &Run, a: &SpectrumArgs) -> Result<(), CliError> {
    let z = run.value("z", a.z, 1.0)?;
    let n = run.value("n", a.n, 2u32)?;
    run.resolver.check_consumed(run.command)?;
    let c = CouplingConstants::new(run.alpha, z).map_err(domain)?;
    let rows = level_order_report(n, &c).map_err(domain)?;
    let m = run.electron_mass();
    let mut t = Table::new(&[
        "level",
        "z",
        "n",
        "l",
        "j",
        "kappa",
        "energy_modified",
        "energy_conventional",
        "difference",
        "binding_modified",
        "binding_conventional",
        "rank_modified",
        "rank_conventional",
    ]);
    for r in rows {
        let l = r.level;
        t.push(vec![
            l.label().into(),
            z.into(),
            l.n.into(),
            l.l.into(),
            l.j().into(),
            l.kappa().into(),
            (m * r.modified).into(),
            r.conventional.map(|e| m * e).into(),
            r.conventional.map(|e| m * (r.modified - e)).into(),
            (m * (1.0 - r.modified)).into(),
            r.conventional.map(|e| m * (1.0 - e)).into(),
            r.rank_modified.into(),
            r.rank_conventional.into(),
        ]);
    }
    run.emit(
        &t,
        vec![
            "conventional = Sommerfeld formula; empty where the level is singular".into(),
            "difference = modified - conventional; rank 1 = highest energy in the shell".into(),
        ],
    )
}

fn radial(run: &Run, a: &RadialArgs) -> Result<(), CliError> {
    let z = run.value("z", a.z, 1.0)?;
    let kappa = run.value("kappa", a.kappa, -1i32)?;
    let n_r = run.value("n_r", a.n_r, 0u32)?;
    let coupling = run.choice("coupling", a.coupling, CouplingArg::Scalar)?;
    let step = run.value("step", a.step, 0.002)?;
    let profile = run.value("profile", a.profile.then_some(true), false)?;
    run.resolver.check_consumed(run.command)?;
    let coupling = match coupling {
        CouplingArg::Scalar => Coupling::Scalar,
        CouplingArg::Vector => Coupling::Vector,
    };
    let mut p = RadialProblem::new(coupling, z, kappa, n_r).with_step(step);
    p.alpha = run.alpha;
    let b = solve_bound(&p).map_err(domain)?;
    let m = run.electron_mass();
    if profile {
        let mut t = Table::new(&["r", "g", "f"]);
        for i in 0..b.r.len() {
            t.push(vec![(b.r[i] / m).into(), b.g[i].into(), b.f[i].into()]);
        }
        return run.emit(&t, vec![format!("energy = {:.12e}; r in units of 1/m", b.energy * m)]);
    }
    let closed = p.level().and_then(|level| {
        let c = CouplingConstants::new(p.alpha, p.z).ok()?;
        match coupling {
            Coupling::Scalar => Some(energy_modified(&level, &c)),
            Coupling::Vector => energy_conventional(&level, &c).ok(),
        }
    });
    let mut t = Table::new(&[
        "coupling",
        "z",
        "kappa",
        "n_r",
        "energy",
        "closed_form",
        "difference",
        "nodes",
        "expected_nodes",
        "converged",
        "iterations",
        "residual",
    ]);
    t.push(vec![
        coupling.name().into(),
        z.into(),
        kappa.into(),
        n_r.into(),
        (m * b.energy).into(),
        closed.map(|e| m * e).into(),
        closed.map(|e| m * (b.energy - e)).into(),
        b.node_count.into(),
        p.expected_nodes().into(),
        b.converged.into(),
        b.iterations.into(),
        b.residual.into(),
    ]);
    run.emit(&t, vec![])
}

fn scatter(run: &Run, a: &ScatterArgs) -> Result<(), CliError> {
    let m = run.electron_mass();
    let energy = run.value("energy", a.energy, 10.0 * m)?;
    let target: Option<f64> = match a.target_mass {
        Some(v) => Some(run.value("target_mass", Some(v), v)?),
        None => {
            let s = run.value("target_mass", None, String::from("none"))?;
            match s.as_str() {
                "none" | "" => None,
                v => Some(v.parse().map_err(|_| CliError::Usage(format!("target_mass '{v}'")))?),
            }
        }
    };
    let z = run.value("z", a.z, 1.0)?;
    let grid = run.value("theta_grid", a.theta_grid.clone(), "5:180:35".to_string())?;
    let mode = run.choice("mode", a.mode, Sigma1Arg::Exact)?;
    run.resolver.check_consumed(run.command)?;
    let thetas: Vec<f64> = parse_theta_grid(&grid)?.into_iter().map(f64::to_radians).collect();
    let base = ScatterKinematics::new(energy, thetas[0], m, target).map_err(domain)?;
    let mut notes = vec![
        "the overall constant 1/16 of the lowest-order amplitude is omitted, so the Coulomb result is the Rutherford formula as written".into(),
        format!("cross sections in 1/({})^2 per steradian", run.unit),
    ];
    let t = match target {
        Some(_) => {
            let mode = match mode {
                Sigma1Arg::Exact => Sigma1Mode::Exact,
                Sigma1Arg::HighEnergy => Sigma1Mode::HighEnergy,
            };
            notes.push("conventional = point-proton vector vertex with recoil, no form factors".into());
            let mut t = Table::new(&["theta_deg", "dcs_scalar_vertex", "dcs_conventional", "ratio"]);
            for row in sweep_ep(&base, &thetas, run.alpha, mode, run.exec) {
                let r = row.map_err(domain)?;
                t.push(vec![
                    r.theta.to_degrees().into(),
                    r.dcs_scalar.into(),
                    r.dcs_conventional.into(),
                    r.ratio.into(),
                ]);
            }
            t
        }
        None => {
            let mut t = Table::new(&["theta_deg", "dcs_coulomb", "rutherford", "ultra_relativistic"]);
            for &th in &thetas {
                let k = base.with_theta(th);
                t.push(vec![
                    th.to_degrees().into(),
                    dcs_coulomb(&k, z, run.alpha).map_err(domain)?.into(),
                    rutherford(&k, z, run.alpha).into(),
                    coulomb_high_energy(&k, z, run.alpha).into(),
                ]);
            }
            t
        }
    };
    run.emit(&t, notes)
}

fn parse_theta_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("theta grid '{s}': expected start:stop:intervals or a list of degrees in (0, 180]"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let degrees = match s.split(':').collect::<Vec<_>>()[..] {
        [lo, hi, k] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            if k == 0 || lo > hi {
                return Err(bad());
            }
            (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad()),
    };
    if degrees.iter().all(|&d| d > 0.0 && d <= 180.0) {
        Ok(degrees)
    } else {
        Err(bad())
    }
}

fn nls_cmd(run: &Run, a: &NlsArgs) -> Result<(), CliError> {
    let mode = run.choice("mode", a.mode, NlsMode::Cubic)?;
    // the Choquard kernel is centred on a sample, which needs an odd count
    let n = run.value("n", a.n, if mode == NlsMode::Choquard { 1023usize } else { 1024 })?;
    let length = run.value("length", a.length, 80.0)?;
    let dt = run.value("dt", a.dt, 1e-3)?;
    let t_final = run.value("t_final", a.t_final, 10.0)?;
    let every = run.value("snapshot_every", a.snapshot_every, t_final)?;
    let g = run.value("g", a.g, -1.0)?;
    let mass = run.value("mass", a.mass, 1.0)?;
    let initial = run.choice("initial", a.initial, Initial::Sech)?;
    let v = run.value("velocity", a.velocity, 0.0)?;
    let width = run.value("width", a.width, 1.0)?;
    run.resolver.check_consumed(run.command)?;
    if !(every > 0.0 && t_final >= 0.0 && width > 0.0) {
        return Err(CliError::Usage("need snapshot_every > 0, t_final >= 0 and width > 0".into()));
    }
    let psi = match initial {
        Initial::Sech => nls::sech_soliton(n, length, 0.0, v).map_err(domain)?,
        Initial::Gaussian => {
            let grid = nls::periodic_line(n, length).map_err(domain)?;
            let amp = (2.0 * PI * width * width).powf(-0.25);
            GridField::from_fn(grid, |x| Complex64::from_polar(amp * (-x * x / (4.0 * width * width)).exp(), v * x))
        }
    };
    let mode = match mode {
        NlsMode::Cubic => Nonlinearity::Cubic,
        NlsMode::Choquard => Nonlinearity::Choquard,
    };
    let mut state = NlsState::new(psi, g, dt).with_mode(mode).with_mass(mass);
    let start = conserved_quantities(&state);
    let mut t = Table::new(&["t", "x", "re", "im", "abs2"]);
    let snapshot = |s: &NlsState, t: &mut Table| {
        for (i, z) in s.psi.values().iter().enumerate() {
            t.push(vec![s.t.into(), s.psi.grid().point(i).into(), z.re.into(), z.im.into(), z.norm_sqr().into()]);
        }
    };
    snapshot(&state, &mut t);
    let mut k = 1u64;
    while state.t < t_final - 0.5 * dt {
        let target = (k as f64 * every).min(t_final);
        state = evolve(state.clone(), target - state.t).map_err(domain)?;
        snapshot(&state, &mut t);
        k += 1;
    }
    let end = conserved_quantities(&state);
    run.emit(
        &t,
        vec![
            format!("norm: {:.12e} -> {:.12e}", start.norm, end.norm),
            format!("energy: {:.12e} -> {:.12e}", start.energy, end.energy),
        ],
    )
}

fn fields_cmd(run: &Run, a: &FieldsArgs) -> Result<(), CliError> {
    let n = run.value("n", a.n, 32usize)?;
    let hw = run.value("half_width", a.half_width, 8.0)?;
    let source = run.choice("source", a.source, Source::Point)?;
    let radius = run.value("radius", a.radius, 2.0)?;
    run.resolver.check_consumed(run.command)?;
    let g = Grid3::cube(n, hw).map_err(domain)?;
    let c = g.index(n / 2, n / 2, n / 2);
    let centre = g.point(c);
    let src = match source {
        Source::Point => {
            let mut s = SpaceField::filled(g, 0.0);
            s.values_mut()[c] = 1.0 / g.cell_volume();
            s
        }
        Source::Ball => GridField::from_fn(g, |p| {
            let r2: f64 = (0..3).map(|i| (p[i] - centre[i]).powi(2)).sum();
            if r2 <= radius * radius {
                1.0
            } else {
                0.0
            }
        }),
    };
    let phi = fields::greens_poisson(&src, run.exec).map_err(domain)?;
    if let Some(path) = &a.field_out {
        let f = BufWriter::new(File::create(path)?);
        fields::io::write_binary(&phi, f).map_err(domain)?;
    }
    // charge and effective radius of the sampled source
    let q: f64 = src.values().iter().sum::<f64>() * g.cell_volume();
    let a_eff = (3.0 * q / (4.0 * PI)).cbrt();
    let mut t = Table::new(&["x", "r", "phi", "reference"]);
    for i in 0..n {
        let idx = g.index(i, n / 2, n / 2);
        let x = g.point(idx)[0];
        let r = (x - centre[0]).abs();
        let reference = match source {
            Source::Point => (r > 0.0).then(|| 1.0 / (4.0 * PI * r)),
            Source::Ball if r < a_eff => Some((3.0 * a_eff * a_eff - r * r) / 6.0),
            Source::Ball => Some(q / (4.0 * PI * r)),
        };
        t.push(vec![x.into(), r.into(), phi.values()[idx].into(), reference.into()]);
    }
    run.emit(
        &t,
        vec![format!(
            "line through the source centre along x; total charge {q:.9e}; reference uses the equivalent sphere"
        )],
    )
}

fn parse_coefficients(s: &str) -> Result<GaugeCoefficients, CliError> {
    let pairs = s
        .split(',')
        .map(|p| {
            let (k, v) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("coefficient '{p}' is not power:value")))?;
            let k: i32 = k.trim().parse().map_err(|_| CliError::Usage(format!("power '{k}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("coefficient '{v}'")))?;
            Ok((k, v))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    GaugeCoefficients::new(pairs).map_err(domain)
}

/// Observed orders of the constraint residual and of the gauge covariance
/// defect between an `n`-point grid and one with half the step.
fn gauge_check(run: &Run, a: &GaugeArgs) -> Result<bool, CliError> {
    let coeffs = run.value("coefficients", a.coefficients.clone(), "1:1".to_string())?;
    let e = run.value("charge", a.charge, 0.3)?;
    let n = run.value("n", a.n, 21usize)?;
    run.resolver.check_consumed(run.command)?;
    let c = parse_coefficients(&coeffs)?;
    if n < 8 {
        return Err(CliError::Usage(format!("n = {n}: need at least 8 samples")));
    }
    let (residual, defect) = checks::gauge_residuals(&c, e, n).map_err(domain)?;
    let mut t = Table::new(&["check", "coarse", "fine", "order", "min_order", "status"]);
    let mut ok = true;
    for (name, v) in [("constraint_residual", residual), ("covariance_defect", defect)] {
        let order = (v[0] / v[1]).log2();
        let pass = order >= run.tol.min_order;
        ok &= pass;
        t.push(vec![
            name.into(),
            v[0].into(),
            v[1].into(),
            order.into(),
            run.tol.min_order.into(),
            if pass { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    run.emit(&t, vec![format!("coefficients {coeffs}; grids of {n} and {} samples per axis", 2 * n - 1)])?;
    Ok(ok)
}

fn report_table(reports: &[Report]) -> Table {
    let mut t = Table::new(&["criterion", "status", "item", "measured", "tolerance"]);
    for r in reports {
        t.push(vec![
            r.id.into(),
            if r.passed() { "PASS" } else { "FAIL" }.into(),
            r.title.into(),
            Cell::Missing,
            format!("runtime < {} s", r.budget_seconds).into(),
        ]);
        for p in &r.parts {
            t.push(vec![
                r.id.into(),
                if p.passed { "ok" } else { "FAIL" }.into(),
                p.name.as_str().into(),
                p.measured.as_str().into(),
                p.tolerance.as_str().into(),
            ]);
        }
    }
    t
}

/// Prints the reports and returns whether all passed. Runtimes go to stderr
/// so the report itself is reproducible byte for byte.
fn emit_reports(run: &Run, reports: &[Report]) -> Result<bool, CliError> {
    for r in reports {
        eprintln!("criterion {}: {:.3} s", r.id, r.seconds);
    }
    let mut notes = vec![format!("random draws seeded with {}", checks::SEED)];
    if reports.iter().any(|r| checks::KNOWN_UNATTAINABLE.contains(&r.id)) {
        notes.push(format!(
            "criteria {:?} test a relation that does not hold and are expected to FAIL",
            checks::KNOWN_UNATTAINABLE
        ));
    }
    run.emit(&report_table(reports), notes)?;
    Ok(reports.iter().all(Report::passed))
}

fn reproduce(run: &Run, a: &ReproduceArgs) -> Result<bool, CliError> {
    run.resolver.check_consumed(run.command)?;
    let ids: Vec<u32> = match a.target {
        Target::PercentTable => vec![1],
        Target::Ordering => vec![4],
        Target::RutherfordLimit => vec![7],
        Target::Soliton => vec![9],
        Target::SpinSums => vec![6],
        Target::All => (1..=checks::CRITERIA).collect(),
    };
    let reports: Vec<Report> = ids
        .into_iter()
        .filter_map(|id| checks::run(id, run.exec, &run.tol))
        .collect();
    emit_reports(run, &reports)
}

/// The acceptance computations are pinned to the physical coupling.
fn fixed_alpha(run: &Run) -> Result<(), CliError> {
    if run.alpha == ALPHA {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{} runs at the physical alpha; drop the alpha override", run.command)))
    }
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    let run = setup(cli)?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(&run, a).map(|_| true),
        Command::Radial(a) => radial(&run, a).map(|_| true),
        Command::Scatter(a) => scatter(&run, a).map(|_| true),
        Command::Nls(a) => nls_cmd(&run, a).map(|_| true),
        Command::Fields(a) => fields_cmd(&run, a).map(|_| true),
        Command::GaugeCheck(a) => gauge_check(&run, a),
        Command::AlgebraCheck => {
            run.resolver.check_consumed(run.command)?;
            fixed_alpha(&run)?;
            let r = checks::algebra_identities(run.exec, &run.tol);
            emit_reports(&run, &[r])
        }
        Command::Reproduce(a) => {
            fixed_alpha(&run)?;
            reproduce(&run, a)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Domain(_) | CliError::Io(_) => 1,
            })
        }
    }
}
