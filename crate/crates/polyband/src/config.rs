//! Experiment configuration files (TOML).
//!
//! ```toml
//! [lattice]
//! kind = "cubic"            # cubic | rectangular | hexagonal | basis | dual
//! dim = 2
//!
//! [potential]
//! kind = "cosines"          # zero | cosines | file | random
//! terms = [{ n = [1, 0], amplitude = 0.1 }]
//!
//! [operator]
//! l = 1
//! s = 10.0
//!
//! [cascade]
//! mode = "scaled"           # theory | scaled
//! rho = [10.0, 20.0, 40.0]
//! scaled = { pool = 2.0, thresholds = [2.0, 4.0, 8.0] }
//! ```
//!
//! Physics parameters live only here; command-line flags select the
//! subcommand and output location.

use std::path::{Path, PathBuf};

use polyband_core::cascade::{derive_parameters, Mode, Overrides, ParameterCascade, ScaledExponents};
use polyband_core::lattice::LatticeModel;
use polyband_core::potential::{random_potential, FourierPotential};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{RunError, RunResult};
use crate::potential_file::PotentialFile;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticeSpec {
    Cubic { dim: usize },
    Rectangular { a: f64, b: f64 },
    Hexagonal,
    /// Period vectors as rows.
    Basis { vectors: Vec<Vec<f64>> },
    /// Dual vectors as rows.
    Dual { vectors: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineTerm {
    pub n: Vec<i64>,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// `Σ amplitude · 2cos((n, x))`.
    Cosines { terms: Vec<CosineTerm> },
    /// JSON coefficient table, relative to the config file.
    File { path: PathBuf },
    Random { seed: u64, support_radius: f64, norm_budget: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub l: u32,
    /// Sobolev smoothness of the potential.
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Theory,
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledSpec {
    /// Value of `ρ^{α̂}`.
    pub pool: f64,
    /// Values of `ρ^{α̂_k}` for `k = 1..=d+1`.
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub pool_radius: Option<f64>,
    pub block_b_radius: Option<f64>,
    pub block_a_radius: Option<f64>,
    pub eps1: Option<f64>,
    pub known_part_order: Option<usize>,
    pub constants: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSpec {
    pub mode: ModeName,
    pub rho: Vec<f64>,
    pub scaled: Option<ScaledSpec>,
    #[serde(default)]
    pub overrides: OverrideSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_window")]
    pub window_radius: f64,
    #[serde(default = "default_true")]
    pub refine: bool,
    /// Half-width of the eigenvalue matching window; defaults to the cascade's.
    pub match_halfwidth: Option<f64>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { window_radius: default_window(), refine: true, match_halfwidth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Direction of the centres `ρ·e`; normalized on use.
    pub direction: Vec<f64>,
    pub iterations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSpec {
    /// Points per axis.
    pub grid: usize,
    pub bands: usize,
    /// Plane-wave radius; derived from the band count when absent.
    pub radius: Option<f64>,
    #[serde(default)]
    pub e_min: f64,
    /// Upper end of the gap search; defaults just below the top band minimum.
    pub e_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    pub rays: Vec<Vec<f64>>,
    #[serde(default = "default_halfwidth")]
    pub halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { output_dir: default_output(), workers: default_workers(), seed: 0 }
    }
}

fn default_window() -> f64 {
    8.0
}
fn default_true() -> bool {
    true
}
fn default_halfwidth() -> f64 {
    0.5
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub lattice: LatticeSpec,
    pub potential: PotentialSpec,
    pub operator: OperatorSpec,
    pub cascade: CascadeSpec,
    /// Quasimomenta for the pointwise subcommands.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Perturbation order for `bloch`.
    #[serde(default = "default_order")]
    pub bloch_order: usize,
    #[serde(default)]
    pub oracle: OracleSpec,
    pub sweep: Option<SweepSpec>,
    pub bands: Option<BandsSpec>,
    pub isoenergetic: Option<RaySpec>,
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

fn default_order() -> usize {
    2
}

/// A parsed config with everything needed to run it.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub path: PathBuf,
    pub config: ExperimentConfig,
    /// SHA-256 of the config text followed by any referenced potential file.
    pub hash: String,
    pub lattice: LatticeModel,
    pub potential: FourierPotential,
}

impl Experiment {
    pub fn load(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::config(path, e.to_string()))?;
        Self::from_text(path, &text)
    }

    /// Parses `text` as if read from `path` (relative file references
    /// resolve against its directory).
    pub fn from_text(path: &Path, text: &str) -> RunResult<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::config(path, e.to_string()))?;
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let lattice = build_lattice(&config.lattice).map_err(|e| RunError::config(path, format!("[lattice] {e}")))?;
        let s = config.operator.s;
        let potential = match &config.potential {
            PotentialSpec::Zero => FourierPotential::zero(lattice.dim()),
            PotentialSpec::Cosines { terms } => {
                let t: Vec<(Vec<i64>, f64)> = terms.iter().map(|c| (c.n.clone(), c.amplitude)).collect();
                FourierPotential::cosines(&lattice, &t, s).map_err(|e| RunError::config(path, format!("[potential] {e}")))?
            }
            PotentialSpec::File { path: rel } => {
                let full = path.parent().unwrap_or(Path::new(".")).join(rel);
                let body = std::fs::read_to_string(&full).map_err(|e| RunError::config(&full, e.to_string()))?;
                hasher.update(body.as_bytes());
                let file: PotentialFile = serde_json::from_str(&body).map_err(|e| RunError::config(&full, e.to_string()))?;
                file.into_potential(&lattice, s).map_err(|e| RunError::config(&full, e.to_string()))?
            }
            PotentialSpec::Random { seed, support_radius, norm_budget } => {
                random_potential(&lattice, *seed, *support_radius, s, *norm_budget)
                    .map_err(|e| RunError::config(path, format!("[potential] {e}")))?
            }
        };
        if config.cascade.rho.is_empty() {
            return Err(RunError::config(path, "[cascade] rho list is empty"));
        }
        if config.cascade.mode == ModeName::Scaled && config.cascade.scaled.is_none() {
            return Err(RunError::config(path, "[cascade] scaled mode needs `scaled = { pool, thresholds }`"));
        }
        let hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self { path: path.to_path_buf(), config, hash, lattice, potential })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn l(&self) -> u32 {
        self.config.operator.l
    }

    pub fn rhos(&self) -> &[f64] {
        &self.config.cascade.rho
    }

    /// Cascade at `rho`; fixed scaled values are re-expressed as exponents of `rho`.
    pub fn cascade(&self, rho: f64) -> polyband_core::Result<ParameterCascade> {
        let c = &self.config.cascade;
        let mode = match (c.mode, &c.scaled) {
            (ModeName::Scaled, Some(sc)) => Mode::Scaled(ScaledExponents::from_values(rho, sc.pool, &sc.thresholds)),
            _ => Mode::Theory,
        };
        let o = &c.overrides;
        let overrides = Overrides {
            pool_radius: o.pool_radius,
            block_b_radius: o.block_b_radius,
            block_a_radius: o.block_a_radius,
            eps1: o.eps1,
            known_part_order: o.known_part_order,
            constants: o.constants.clone(),
        };
        derive_parameters(self.dim(), self.l(), self.config.operator.s, rho, mode, overrides)
    }

    pub fn seed(&self) -> u64 {
        self.config.run.seed
    }
}

fn build_lattice(spec: &LatticeSpec) -> polyband_core::Result<LatticeModel> {
    match spec {
        LatticeSpec::Cubic { dim } => Ok(LatticeModel::cubic(*dim)),
        LatticeSpec::Rectangular { a, b } => LatticeModel::rectangular(*a, *b),
        LatticeSpec::Hexagonal => Ok(LatticeModel::hexagonal()),
        LatticeSpec::Basis { vectors } => LatticeModel::from_basis(vectors),
        LatticeSpec::Dual { vectors } => LatticeModel::from_dual(vectors),
    }
}
