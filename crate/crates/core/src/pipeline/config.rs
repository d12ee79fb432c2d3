use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coreset::{CoresetMethod, DEFAULT_REGIONS};
use crate::dataset::{BlobSpec, Ratio};
use crate::error::{Error, Result};
use crate::hamiltonian::{TaylorOrder, MAX_QUBITS};
use crate::optimize::{OptimizerKind, OptimizerSpec};
use crate::quantum::{Entanglement, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Vqe,
    Qaoa,
    BruteForce,
    ClassicalOnCoreset,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Vqe => "vqe",
            Solver::Qaoa => "qaoa",
            Solver::BruteForce => "brute_force",
            Solver::ClassicalOnCoreset => "classical_on_coreset",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Solver::Vqe,
            Solver::Qaoa,
            Solver::BruteForce,
            Solver::ClassicalOnCoreset,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown solver {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    /// Synthetic blobs; repeat `r` draws with seed `master_seed + r`.
    Blobs {
        n_total: usize,
        ratio: Ratio,
        #[serde(default = "two")]
        dims: usize,
        #[serde(default = "one_f")]
        cluster_std: f64,
        #[serde(default = "six_f")]
        center_separation: f64,
    },
    Csv {
        path: PathBuf,
        #[serde(default)]
        feature_columns: Option<Vec<usize>>,
        #[serde(default = "yes")]
        has_header: bool,
    },
}

fn two() -> usize {
    2
}
fn one_f() -> f64 {
    1.0
}
fn six_f() -> f64 {
    6.0
}
fn yes() -> bool {
    true
}

impl DatasetSource {
    pub fn blobs(n_total: usize, ratio: Ratio) -> Self {
        DatasetSource::Blobs {
            n_total,
            ratio,
            dims: 2,
            cluster_std: 1.0,
            center_separation: 6.0,
        }
    }

    pub fn blob_spec(&self, seed: u64) -> Option<BlobSpec> {
        match *self {
            DatasetSource::Blobs {
                n_total,
                ratio,
                dims,
                cluster_std,
                center_separation,
            } => Some(BlobSpec {
                n_total,
                ratio,
                dims,
                cluster_std,
                center_separation,
                seed,
            }),
            DatasetSource::Csv { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DatasetSource::Blobs { ratio, .. } => {
                format!("uneven_{}", ratio.to_string().replace(':', "_"))
            }
            DatasetSource::Csv { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "csv".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoresetConfig {
    pub method: CoresetMethod,
    /// Coreset size, one qubit per point.
    pub size: usize,
    /// Contour region count.
    pub regions: usize,
}

impl Default for CoresetConfig {
    fn default() -> Self {
        CoresetConfig {
            method: CoresetMethod::Contour,
            size: 5,
            regions: DEFAULT_REGIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzConfig {
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        AnsatzConfig {
            reps: 2,
            entanglement: Entanglement::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QaoaConfig {
    pub layers: usize,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig { layers: 5 }
    }
}

/// Optimizer settings without a seed; each repeat derives its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub max_evals: usize,
    pub population: usize,
    pub bounds: (f64, f64),
    pub tolerance: f64,
    pub patience: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let d = OptimizerSpec::default();
        OptimizerConfig {
            kind: d.kind,
            max_evals: d.max_evals,
            population: d.population,
            bounds: d.bounds,
            tolerance: d.tolerance,
            patience: d.patience,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(&self, seed: u64) -> OptimizerSpec {
        OptimizerSpec {
            kind: self.kind,
            max_evals: self.max_evals,
            population: self.population,
            seed,
            bounds: self.bounds,
            tolerance: self.tolerance,
            patience: self.patience,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory for result files; falls back to `$CONTOUR_OUT_DIR`, then
    /// `./results`.
    pub dir: Option<PathBuf>,
    pub figures: bool,
}

/// Full description of an experiment. Defaults: Contour coreset of five
/// points, VQE on the first-order Hamiltonian, evolution strategy, linear
/// entanglement with two repetitions, noiseless, ten repeats on the
/// 750-point 1:2 blobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    /// Per-feature min-max scaling before anything else.
    pub normalize: bool,
    pub coreset: CoresetConfig,
    pub taylor_order: TaylorOrder,
    pub solver: Solver,
    pub ansatz: AnsatzConfig,
    pub qaoa: QaoaConfig,
    pub noise: NoiseSpec,
    /// Measurement shots for the final readout; 0 reads the exact
    /// distribution.
    pub shots: u64,
    pub optimizer: OptimizerConfig,
    pub repeats: usize,
    pub master_seed: u64,
    /// Lloyd restarts for the full-data reference labelling.
    pub ground_truth_restarts: usize,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::blobs(750, Ratio { a: 1, b: 2 }),
            normalize: false,
            coreset: CoresetConfig::default(),
            taylor_order: TaylorOrder::First,
            solver: Solver::Vqe,
            ansatz: AnsatzConfig::default(),
            qaoa: QaoaConfig::default(),
            noise: NoiseSpec::noiseless(),
            shots: 0,
            optimizer: OptimizerConfig::default(),
            repeats: 10,
            master_seed: 0,
            ground_truth_restarts: 10,
            output: OutputConfig::default(),
        }
    }
}

/// Short names accepted by `--override` and `--axis`.
const ALIASES: &[(&str, &str)] = &[
    ("method", "coreset.method"),
    ("m", "coreset.size"),
    ("size", "coreset.size"),
    ("regions", "coreset.regions"),
    ("k", "coreset.regions"),
    ("order", "taylor_order"),
    ("lambda", "noise.lambda"),
    ("reps", "ansatz.reps"),
    ("entanglement", "ansatz.entanglement"),
    ("layers", "qaoa.layers"),
    ("ratio", "dataset.ratio"),
    ("seed", "master_seed"),
];

pub fn resolve_key(key: &str) -> &str {
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == key)
        .map(|(_, full)| *full)
        .unwrap_or(key)
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.coreset.size;
        if !(2..=MAX_QUBITS).contains(&m) {
            return Err(Error::Config(format!(
                "coreset.size must be in 2..={MAX_QUBITS}, got {m}"
            )));
        }
        if self.coreset.regions == 0 {
            return Err(Error::Config("coreset.regions must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.ground_truth_restarts == 0 {
            return Err(Error::Config(
                "ground_truth_restarts must be at least 1".into(),
            ));
        }
        if self.qaoa.layers == 0 {
            return Err(Error::Config("qaoa.layers must be at least 1".into()));
        }
        self.noise
            .validate(m)
            .map_err(|e| Error::Config(format!("noise.lambda: {e}")))?;
        self.optimizer
            .with_seed(0)
            .validate()
            .map_err(|e| Error::Config(format!("optimizer: {e}")))?;
        if let Some(spec) = self.dataset.blob_spec(0) {
            if spec.n_total < m {
                return Err(Error::Config(format!(
                    "dataset.n_total {} is smaller than coreset.size {m}",
                    spec.n_total
                )));
            }
        }
        Ok(())
    }

    /// Applies `key=value`, where `key` is a dotted path into the JSON form
    /// (or an alias such as `method`, `order`, `lambda`). Values are parsed
    /// as JSON when possible, otherwise taken as strings.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        let key = key.trim();
        let value: Value = serde_json::from_str(raw.trim())
            .unwrap_or_else(|_| Value::String(raw.trim().to_owned()));
        self.with_value(key, value)
    }

    pub fn with_value(&self, key: &str, value: Value) -> Result<Self> {
        let path = resolve_key(key);
        let mut doc = serde_json::to_value(self)?;
        let mut slot = &mut doc;
        for part in path.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown config key {key:?}")))?;
        }
        *slot = value;
        let cfg: ExperimentConfig = serde_json::from_value(doc)
            .map_err(|e| Error::Config(format!("bad value for {key:?}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os("CONTOUR_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"solvr": "vqe"}"#),
            Err(Error::Config(_))
        ));
        assert!(
            ExperimentConfig::from_json(r#"{"coreset": {"method": "contour", "mm": 3}}"#).is_err()
        );
        assert!(ExperimentConfig::default().with_override("nope=1").is_err());
    }

    #[test]
    fn overrides_and_aliases() {
        let cfg = ExperimentConfig::default()
            .with_override("solver=brute_force")
            .unwrap()
            .with_override("noise.lambda=0.1")
            .unwrap()
            .with_override("method=lightweight")
            .unwrap()
            .with_override("order=0")
            .unwrap()
            .with_override("ratio=1:10")
            .unwrap();
        assert_eq!(cfg.solver, Solver::BruteForce);
        assert_eq!(cfg.noise.lambda, 0.1);
        assert_eq!(cfg.coreset.method, CoresetMethod::Lightweight);
        assert_eq!(cfg.taylor_order, TaylorOrder::Zeroth);
        assert_eq!(
            cfg.dataset.blob_spec(0).unwrap().ratio,
            Ratio { a: 1, b: 10 }
        );
    }

    #[test]
    fn validation_errors() {
        let base = ExperimentConfig::default();
        assert!(base.with_override("m=25").is_err());
        assert!(base.with_override("lambda=2.0").is_err());
        assert!(base.with_override("repeats=0").is_err());
        assert!(base.with_override("solver=annealer").is_err());
    }
}
