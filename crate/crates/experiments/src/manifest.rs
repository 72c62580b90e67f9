use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bootstrap::DEFAULT_RESAMPLES;
use crate::error::{ExperimentError, Result};
use crate::{exp1, exp2, exp3};

/// A complete, reproducible description of one experiment run.
///
/// ```json
/// { "experiment": "exp1-ii", "seed": 7, "output_dir": "out/exp1",
///   "params": { "samples": 10000 } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    /// Where result files go. Relative paths are taken from the manifest's
    /// directory.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    /// Write per-trial JSON-lines logs next to the tables.
    #[serde(default = "default_true")]
    pub raw_logs: bool,
    #[serde(flatten)]
    pub experiment: ExperimentParams,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

fn default_resamples() -> usize {
    DEFAULT_RESAMPLES
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "params", rename_all = "kebab-case")]
pub enum ExperimentParams {
    #[serde(rename = "exp1-ii")]
    Exp1(exp1::Exp1Params),
    #[serde(rename = "exp2-ndcg")]
    Exp2(exp2::Exp2Params),
    #[serde(rename = "exp3-german")]
    Exp3(exp3::Exp3Params),
}

impl ExperimentParams {
    pub fn id(&self) -> &'static str {
        match self {
            ExperimentParams::Exp1(_) => exp1::ID,
            ExperimentParams::Exp2(_) => exp2::ID,
            ExperimentParams::Exp3(_) => exp3::ID,
        }
    }
}

impl Manifest {
    pub fn new(seed: u64, experiment: ExperimentParams) -> Self {
        Self {
            seed,
            output_dir: None,
            bootstrap_resamples: DEFAULT_RESAMPLES,
            raw_logs: true,
            experiment,
            base_dir: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let mut m = Self::from_json(&text)?;
        m.base_dir = path.parent().map(Path::to_path_buf);
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bootstrap_resamples == 0 {
            return Err(ExperimentError::Manifest("bootstrap_resamples must be positive".into()));
        }
        match &self.experiment {
            ExperimentParams::Exp1(p) => p.validate(),
            ExperimentParams::Exp2(p) => p.validate(),
            ExperimentParams::Exp3(p) => p.validate(),
        }
    }

    pub fn id(&self) -> &'static str {
        self.experiment.id()
    }

    /// Directory relative paths are resolved against.
    pub fn base_dir(&self) -> &Path {
        self.base_dir.as_deref().unwrap_or(Path::new("."))
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = Some(dir.into());
        self
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir().join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(self.output_dir.as_deref().unwrap_or(Path::new("results")))
    }

    /// Compact JSON of the fields that determine the results, i.e. without
    /// `output_dir` and `raw_logs`.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
            obj.remove("raw_logs");
        }
        v.to_string()
    }

    /// Hex SHA-256 of [`Manifest::canonical_json`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
