//! `unicd`: fits, anneals, scaling experiments, Lanczos growth and spectral
//! dumps. Each run writes its artifacts plus a `manifest.json` into one
//! output directory.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use unicd::models::{Boundary, ModelKind, ScheduleShape};

use config::{Backend, Experiment, IntegratorMode, ModelConfig, ProtocolKind, RunConfig, SpectralEnsemble, ZetaObjective};

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "UNICD_OUTPUT_ROOT";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(unicd::Error),
    Io(PathBuf, std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<unicd::Error> for CliError {
    fn from(e: unicd::Error) -> Self {
        CliError::Core(e)
    }
}

fn core_exit_code(e: &unicd::Error) -> u8 {
    match e {
        unicd::Error::Objective { source, .. } => core_exit_code(source),
        e if e.is_config() => 2,
        e if e.is_resource() => 3,
        unicd::Error::Io(_) => 3,
        _ => 4,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => core_exit_code(e),
            CliError::Io(..) => 3,
        }
    }

    fn hint(&self) -> Option<&'static str> {
        let CliError::Core(e) = self else { return None };
        let mut e = e;
        while let unicd::Error::Objective { source, .. } = e {
            e = source;
        }
        match e {
            unicd::Error::DenseLimit { .. } => Some("reduce the number of sites or raise --dense-limit"),
            unicd::Error::Resource(_) => Some("reduce ell or the number of sites, or widen the budget in the config"),
            _ => None,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "unicd", version, about = "Universal counterdiabatic driving toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest chain handled by dense linear algebra.
    #[arg(long, global = true)]
    dense_limit: Option<usize>,
    #[arg(long, global = true, value_enum)]
    integrator: Option<IntegratorMode>,
    /// Step count for the fixed integrator.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Local error tolerance for the adaptive integrator.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Chebyshev fits of -1/x on [zeta, 1].
    Fit(FitArgs),
    /// One annealing run.
    Anneal(AnnealArgs),
    /// Scaling experiments over the fit order.
    Scaling(ScalingArgs),
    /// Lanczos coefficients of operator growth.
    Lanczos(LanczosArgs),
    /// Binned spectral function of dH/dlambda.
    Spectral(SpectralArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Anneal(_) => "anneal",
            Command::Scaling(_) => "scaling",
            Command::Lanczos(_) => "lanczos",
            Command::Spectral(_) => "spectral",
        }
    }
}

/// Parses a value through its serde representation, trying the spelling as
/// given, upper case and lower case.
fn serde_value<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    let norm = s.replace('-', "_");
    for cand in [norm.clone(), norm.to_uppercase(), norm.to_lowercase()] {
        if let Ok(v) = serde_json::from_value(serde_json::Value::String(cand)) {
            return Ok(v);
        }
    }
    Err(format!("unrecognized value '{s}'"))
}

/// `a,b`.
fn parse_pair<T: std::str::FromStr + Copy>(s: &str) -> Result<[T; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts[..] {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok([a, b]),
            _ => Err(format!("cannot parse '{s}' as a pair of numbers")),
        },
        _ => Err(format!("expected two comma-separated values, got '{s}'")),
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(&s.to_uppercase()).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// TFI_CLEAN, TFI_BLOCK_DISORDER, NNN_TFI, XXZ_ANNEAL or XXZ_STATIC.
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long, value_parser = serde_value::<Boundary>)]
    boundary: Option<Boundary>,
    /// Disorder block size (TFI_BLOCK_DISORDER).
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    j2: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl ModelArgs {
    fn apply(&self, m: &mut ModelConfig) {
        if let Some(v) = self.model {
            if v != m.name {
                m.block_size = None;
                m.fields = None;
            }
            m.name = v;
        }
        set(&mut m.n_sites, self.n_sites);
        set(&mut m.boundary, self.boundary);
        if self.block_size.is_some() {
            m.block_size = self.block_size;
            m.fields = None;
        }
        set(&mut m.couplings.j, self.j);
        set(&mut m.couplings.h, self.h);
        set(&mut m.couplings.j2, self.j2);
        set(&mut m.couplings.delta, self.delta);
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<usize>>,
    #[arg(long)]
    zeta: Option<f64>,
    /// COST or ACTION.
    #[arg(long, value_parser = serde_value::<unicd::FitMode>)]
    mode: Option<unicd::FitMode>,
    /// Optimize zeta for each order instead of taking --zeta.
    #[arg(long)]
    scan_zeta: bool,
    #[arg(long, value_enum)]
    objective: Option<ZetaObjective>,
    #[arg(long)]
    curve_points: Option<usize>,
    /// Chain length for the tfi objective.
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long)]
    total_time: Option<f64>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long)]
    total_time: Option<f64>,
    /// SMOOTH_SINE or LINEAR.
    #[arg(long, value_parser = serde_value::<ScheduleShape>)]
    shape: Option<ScheduleShape>,
}

impl ScheduleArgs {
    fn apply(&self, s: &mut unicd::Schedule) {
        set(&mut s.total_time, self.total_time);
        set(&mut s.shape, self.shape);
    }
}

#[derive(Args, Debug)]
struct AnnealArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolKind>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    /// CSV `ell,zeta` window table.
    #[arg(long)]
    zeta_table: Option<PathBuf>,
    #[arg(long, value_parser = serde_value::<unicd::FitMode>)]
    mode: Option<unicd::FitMode>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// GROUND or INFINITE_TEMPERATURE (variational protocol).
    #[arg(long, value_parser = serde_value::<unicd::protocol::VariationalEnsemble>)]
    ensemble: Option<unicd::protocol::VariationalEnsemble>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    n_modes: Option<usize>,
    /// Fidelity samples along the run, endpoints included.
    #[arg(long)]
    samples: Option<usize>,
    /// Track the gauge potential on this many linear-interpolation knots.
    #[arg(long)]
    knots: Option<usize>,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(value_enum)]
    experiment: Option<Experiment>,
    #[arg(long, value_delimiter = ',')]
    ells: Option<Vec<usize>>,
    #[arg(long)]
    n_sites: Option<usize>,
    /// Clean chain used to optimize window tables.
    #[arg(long)]
    tfi_sites: Option<usize>,
    #[arg(long)]
    zeta_table: Option<PathBuf>,
    #[arg(long)]
    zeta_table_action: Option<PathBuf>,
    #[arg(long)]
    total_time: Option<f64>,
    #[arg(long)]
    omega_lo: Option<f64>,
    #[arg(long)]
    omega_hi: Option<f64>,
    #[arg(long)]
    omega_points: Option<usize>,
    #[arg(long)]
    zeta_points: Option<usize>,
}

#[derive(Args, Debug)]
struct LanczosArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Pauli text (`re im site:axis ...`, terms separated by `;`).
    #[arg(long)]
    hamiltonian: Option<String>,
    #[arg(long)]
    seed_op: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    /// Also run at p - 2 and report the divergence index.
    #[arg(long)]
    p_pair: bool,
    /// extent or weight.
    #[arg(long, value_parser = serde_value::<unicd::krylov::SupportMetric>)]
    metric: Option<unicd::krylov::SupportMetric>,
    #[arg(long)]
    reorthogonalize: bool,
    #[arg(long)]
    variants: Option<usize>,
    /// Smoothing width in n.
    #[arg(long)]
    width: Option<f64>,
    /// Fit window, e.g. 5,15.
    #[arg(long, value_parser = parse_pair::<usize>)]
    range: Option<[usize; 2]>,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum)]
    ensemble: Option<SpectralEnsemble>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Tail fit window, e.g. 4,12.
    #[arg(long, value_parser = parse_pair::<f64>)]
    tail_range: Option<[f64; 2]>,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn merge(cli: &Cli, cfg: &mut RunConfig) {
    let g = &cli.global;
    let gc = &mut cfg.global;
    if g.out.is_some() {
        gc.out = g.out.clone();
    }
    set(&mut gc.seed, g.seed);
    if g.workers.is_some() {
        gc.workers = g.workers;
    }
    set(&mut gc.dense_limit, g.dense_limit);
    set(&mut gc.integrator.mode, g.integrator);
    set(&mut gc.integrator.steps, g.steps);
    if g.tol.is_some() {
        gc.integrator.tol = g.tol;
    }
    match &cli.command {
        Command::Fit(a) => {
            let c = &mut cfg.fit;
            set(&mut c.ell, a.ell.clone());
            if a.zeta.is_some() {
                c.zeta = a.zeta;
            }
            set(&mut c.mode, a.mode);
            c.scan_zeta |= a.scan_zeta;
            set(&mut c.objective, a.objective);
            set(&mut c.curve_points, a.curve_points);
            set(&mut c.n_sites, a.n_sites);
            set(&mut c.schedule.total_time, a.total_time);
        }
        Command::Anneal(a) => {
            let c = &mut cfg.anneal;
            a.model.apply(&mut c.model);
            a.schedule.apply(&mut c.schedule);
            let p = &mut c.protocol;
            set(&mut p.kind, a.protocol);
            set(&mut p.ell, a.ell);
            if a.zeta.is_some() {
                p.zeta = a.zeta;
            }
            if a.zeta_table.is_some() {
                p.zeta_table = a.zeta_table.clone();
            }
            set(&mut p.mode, a.mode);
            if a.omega.is_some() {
                p.omega = a.omega;
            }
            set(&mut p.mu, a.mu);
            set(&mut p.ensemble, a.ensemble);
            set(&mut c.backend, a.backend);
            if a.n_modes.is_some() {
                c.n_modes = a.n_modes;
            }
            set(&mut c.samples, a.samples);
            if let Some(k) = a.knots {
                c.refresh = unicd::evolution::AgpRefresh::Knots { knots: k };
            }
        }
        Command::Scaling(a) => {
            let c = &mut cfg.scaling;
            set(&mut c.experiment, a.experiment);
            if a.ells.is_some() {
                c.ells = a.ells.clone();
            }
            if a.n_sites.is_some() {
                c.n_sites = a.n_sites;
            }
            set(&mut c.tfi_sites, a.tfi_sites);
            if a.zeta_table.is_some() {
                c.zeta_table = a.zeta_table.clone();
            }
            if a.zeta_table_action.is_some() {
                c.zeta_table_action = a.zeta_table_action.clone();
            }
            set(&mut c.schedule.total_time, a.total_time);
            set(&mut c.omega_scan.lo, a.omega_lo);
            set(&mut c.omega_scan.hi, a.omega_hi);
            set(&mut c.omega_scan.points, a.omega_points);
            set(&mut c.zeta_points, a.zeta_points);
        }
        Command::Lanczos(a) => {
            let c = &mut cfg.lanczos;
            a.model.apply(&mut c.model);
            if a.hamiltonian.is_some() {
                c.hamiltonian = a.hamiltonian.clone();
            }
            if a.seed_op.is_some() {
                c.seed_op = a.seed_op.clone();
            }
            set(&mut c.lambda, a.lambda);
            set(&mut c.n_max, a.n_max);
            set(&mut c.p, a.p);
            c.p_pair |= a.p_pair;
            set(&mut c.metric, a.metric);
            c.full_reorthogonalization |= a.reorthogonalize;
            set(&mut c.variants, a.variants);
            set(&mut c.width, a.width);
            set(&mut c.range, a.range);
        }
        Command::Spectral(a) => {
            let c = &mut cfg.spectral;
            a.model.apply(&mut c.model);
            set(&mut c.lambda, a.lambda);
            set(&mut c.ensemble, a.ensemble);
            set(&mut c.bins, a.bins);
            set(&mut c.lo, a.lo);
            if a.hi.is_some() {
                c.hi = a.hi;
            }
            if a.tail_range.is_some() {
                c.tail_range = a.tail_range;
            }
        }
    }
}

/// `out` as given when absolute, otherwise under `UNICD_OUTPUT_ROOT` if set.
fn resolve_out(out: Option<&Path>, command: &str) -> PathBuf {
    let rel = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("unicd-{command}")));
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if rel.is_relative() && !root.is_empty() => PathBuf::from(root).join(rel),
        _ => rel,
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = load_config(cli.global.config.as_deref())?;
    merge(cli, &mut cfg);
    if let Some(n) = cfg.global.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    let command = cli.command.name();
    let out = resolve_out(cfg.global.out.as_deref(), command);
    let mut run = output::Run::start(&out, command, &cfg)?;
    let result = match &cli.command {
        Command::Fit(_) => commands::fit(&cfg, &mut run),
        Command::Anneal(_) => commands::anneal(&cfg, &mut run),
        Command::Scaling(_) => commands::scaling(&cfg, &mut run),
        Command::Lanczos(_) => commands::lanczos(&cfg, &mut run),
        Command::Spectral(_) => commands::spectral(&cfg, &mut run),
    };
    run.finish(result.as_ref().err())?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("hint: {h}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
