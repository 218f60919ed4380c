//! Run configuration. A TOML file holds a `[global]` table and one table per
//! subcommand; every key is optional and command-line flags win over the
//! file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use unicd::evolution::{AgpRefresh, DEFAULT_MAX_AGP_ROTATION, DEFAULT_SAMPLES};
use unicd::integrate::StepControl;
use unicd::krylov::SupportMetric;
use unicd::models::{Boundary, Couplings, CustomEndpoints, Disorder, ModelKind, ModelSpec, Schedule};
use unicd::pauli::DEFAULT_DENSE_LIMIT;
use unicd::protocol::VariationalEnsemble;
use unicd::scaling::OmegaScan;
use unicd::spectral::Kernel;
use unicd::FitMode;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub global: GlobalConfig,
    pub fit: FitConfig,
    pub anneal: AnnealConfig,
    pub scaling: ScalingConfig,
    pub lanczos: LanczosConfig,
    pub spectral: SpectralConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlobalConfig {
    /// Output directory; relative paths resolve against `UNICD_OUTPUT_ROOT`
    /// when that is set.
    pub out: Option<PathBuf>,
    /// Seeds disorder realizations.
    pub seed: u64,
    /// Worker threads; all cores when unset.
    pub workers: Option<usize>,
    pub dense_limit: usize,
    pub integrator: IntegratorConfig,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig { out: None, seed: 0, workers: None, dense_limit: DEFAULT_DENSE_LIMIT, integrator: IntegratorConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorMode {
    #[default]
    Adaptive,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub mode: IntegratorMode,
    /// Local error tolerance in adaptive mode; each backend has its own
    /// default.
    pub tol: Option<f64>,
    /// Total steps in fixed mode.
    pub steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { mode: IntegratorMode::Adaptive, tol: None, steps: 4000 }
    }
}

impl IntegratorConfig {
    pub fn control(&self, backend_default: StepControl) -> StepControl {
        match (self.mode, self.tol) {
            (IntegratorMode::Fixed, _) => StepControl::Fixed { steps: self.steps },
            (IntegratorMode::Adaptive, Some(tol)) => StepControl::adaptive(tol),
            (IntegratorMode::Adaptive, None) => backend_default,
        }
    }
}

/// A model as written in config files: the fields of a model spec, with the
/// disorder given either as explicit block fields or as a block size to be
/// sampled from the global seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: ModelKind,
    pub n_sites: usize,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomEndpoints>,
}

pub const DEFAULT_BLOCK_SIZE: usize = 4;

impl ModelConfig {
    pub fn new(name: ModelKind, n_sites: usize) -> Self {
        ModelConfig {
            name,
            n_sites,
            couplings: Couplings::default(),
            boundary: Boundary::Periodic,
            block_size: None,
            fields: None,
            custom: None,
        }
    }

    pub fn to_spec(&self, seed: u64) -> Result<ModelSpec, CliError> {
        let mut spec = ModelSpec::new(self.name, self.n_sites).with_boundary(self.boundary).with_couplings(self.couplings);
        spec.custom = self.custom.clone();
        if self.name == ModelKind::TfiBlockDisorder {
            spec.disorder = Some(match &self.fields {
                Some(f) => Disorder { block_size: f.len(), fields: f.clone(), seed },
                None => Disorder::sample(self.block_size.unwrap_or(DEFAULT_BLOCK_SIZE), self.couplings.h, seed),
            });
        } else if self.fields.is_some() || self.block_size.is_some() {
            return Err(CliError::Config(format!("model {} takes no disorder fields", self.name)));
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ZetaObjective {
    /// Spectrum-free score `-(zeta + sup |x f(x) + 1|)`.
    #[default]
    Residual,
    /// Fidelity density of the clean transverse-field chain.
    Tfi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub ell: Vec<usize>,
    pub zeta: Option<f64>,
    pub mode: FitMode,
    pub curve_points: usize,
    pub scan_zeta: bool,
    pub objective: ZetaObjective,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    pub zeta_points: usize,
    /// Chain length for the `tfi` objective.
    pub n_sites: usize,
    pub schedule: Schedule,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            ell: vec![8],
            zeta: None,
            mode: FitMode::Cost,
            curve_points: 1001,
            scan_zeta: false,
            objective: ZetaObjective::Residual,
            zeta_lo: 1e-4,
            zeta_hi: 0.5,
            zeta_points: 40,
            n_sites: 200,
            schedule: Schedule::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[value(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProtocolKind {
    None,
    #[default]
    Universal,
    Variational,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub ell: usize,
    /// Window cutoff; falls back to `zeta_table`, then to the residual
    /// optimum.
    pub zeta: Option<f64>,
    /// CSV `ell,zeta`, as written by `scaling zeta_tfi`.
    pub zeta_table: Option<PathBuf>,
    pub mode: FitMode,
    /// Required unless the model has a hard spectral cutoff.
    pub omega: Option<f64>,
    pub mu: f64,
    pub ensemble: VariationalEnsemble,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            kind: ProtocolKind::Universal,
            ell: 4,
            zeta: None,
            zeta_table: None,
            mode: FitMode::Cost,
            omega: None,
            mu: 0.0,
            ensemble: VariationalEnsemble::Ground,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Free fermions for the transverse-field families, dense otherwise.
    #[default]
    Auto,
    Dense,
    FreeFermion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealConfig {
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
    pub schedule: Schedule,
    pub backend: Backend,
    pub n_modes: Option<usize>,
    pub samples: usize,
    pub refresh: AgpRefresh,
    pub max_agp_rotation: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            model: ModelConfig::new(ModelKind::NnnTfi, 10),
            protocol: ProtocolConfig::default(),
            schedule: Schedule::default(),
            backend: Backend::Auto,
            n_modes: None,
            samples: DEFAULT_SAMPLES,
            refresh: AgpRefresh::Auto,
            max_agp_rotation: DEFAULT_MAX_AGP_ROTATION,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    #[default]
    ZetaTfi,
    OmegaNnn,
    OmegaXxz,
    CostVsAction,
}

impl Experiment {
    pub fn default_ells(self) -> Vec<usize> {
        match self {
            Experiment::ZetaTfi => vec![8, 16, 24, 32, 48, 64],
            Experiment::OmegaNnn | Experiment::OmegaXxz => (2..=10).collect(),
            Experiment::CostVsAction => vec![2, 4, 6, 8],
        }
    }

    pub fn default_sites(self) -> usize {
        match self {
            Experiment::ZetaTfi => 200,
            Experiment::OmegaNnn | Experiment::CostVsAction => 10,
            Experiment::OmegaXxz => 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub experiment: Experiment,
    /// Orders; each experiment has its own default grid.
    pub ells: Option<Vec<usize>>,
    /// Size of the model under study; per-experiment default.
    pub n_sites: Option<usize>,
    /// Clean chain on which window tables are optimized.
    pub tfi_sites: usize,
    /// Precomputed COST window table (CSV `ell,zeta`).
    pub zeta_table: Option<PathBuf>,
    /// Precomputed ACTION window table.
    pub zeta_table_action: Option<PathBuf>,
    pub schedule: Schedule,
    pub omega_scan: OmegaScan,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    pub zeta_points: usize,
    /// Range of `ell` for the asymptote fit; all orders when unset.
    pub fit_range: Option<[f64; 2]>,
    pub ensemble: VariationalEnsemble,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            experiment: Experiment::ZetaTfi,
            ells: None,
            n_sites: None,
            tfi_sites: 200,
            zeta_table: None,
            zeta_table_action: None,
            schedule: Schedule::default(),
            omega_scan: OmegaScan::default(),
            zeta_lo: 1e-4,
            zeta_hi: 0.5,
            zeta_points: 40,
            fit_range: None,
            ensemble: VariationalEnsemble::Ground,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LanczosConfig {
    pub model: ModelConfig,
    /// Explicit Hamiltonian in Pauli text form (lines or `;`-separated
    /// terms `re im site:axis ...`) on `model.n_sites` sites; replaces the
    /// model's.
    pub hamiltonian: Option<String>,
    /// Seed operator in the same form; the model default when unset.
    pub seed_op: Option<String>,
    pub lambda: f64,
    pub n_max: usize,
    pub p: usize,
    /// Also run at `p - 2` and report where the two sequences part.
    pub p_pair: bool,
    pub metric: SupportMetric,
    pub full_reorthogonalization: bool,
    /// Coupling variants averaged over.
    pub variants: usize,
    pub spread: f64,
    pub width: f64,
    pub range: [usize; 2],
    /// Relative tolerance defining the divergence index of a `p` pair.
    pub pair_tol: f64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        let mut model = ModelConfig::new(ModelKind::XxzStatic, 30);
        model.couplings.delta = 1.0;
        LanczosConfig {
            model,
            hamiltonian: None,
            seed_op: None,
            lambda: 0.5,
            n_max: 25,
            p: 10,
            p_pair: false,
            metric: SupportMetric::Extent,
            full_reorthogonalization: false,
            variants: 3,
            spread: 0.05,
            width: 2.0,
            range: [5, 15],
            pair_tol: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SpectralEnsemble {
    Ground,
    #[default]
    InfiniteTemperature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralConfig {
    pub model: ModelConfig,
    pub lambda: f64,
    pub ensemble: SpectralEnsemble,
    pub bins: usize,
    pub lo: f64,
    /// Upper edge; just above the largest transition frequency when unset.
    pub hi: Option<f64>,
    pub kernel: Kernel,
    /// Frequency range for a fit of `log Phi = c - Gamma omega^alpha`.
    pub tail_range: Option<[f64; 2]>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            model: ModelConfig::new(ModelKind::NnnTfi, 10),
            lambda: 0.5,
            ensemble: SpectralEnsemble::InfiniteTemperature,
            bins: 200,
            lo: 0.0,
            hi: None,
            kernel: Kernel::Hard,
            tail_range: None,
        }
    }
}
