use std::path::PathBuf;
use std::str::FromStr;

use spatreg_core::advisor::{DEFAULT_ALPHA, DEFAULT_COLLINEARITY_THRESHOLD};
use spatreg_core::correlation::MIN_PERMUTATIONS;
use spatreg_core::ModelVariant;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistFormat {
    /// `id,<id1>,<id2>,...` header, one row per unit.
    #[default]
    Square,
    /// `from,to,distance`, each unordered pair exactly once.
    Long,
}

impl FromStr for DistFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(DistFormat::Square),
            "long" => Ok(DistFormat::Long),
            other => Err(CliError::Config(format!("unknown distance format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(CliError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Knobs that do not depend on where the data came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub log_transform: bool,
    pub alpha: f64,
    pub collinearity_threshold: f64,
    /// Restricts the fitted models to `ols_simple` plus this variant.
    pub model: Option<ModelVariant>,
    pub seed: u64,
    /// Permutation count; `None` skips permutation testing.
    pub permutations: Option<usize>,
    /// Worker threads for permutation testing; `Some(1)` runs serially,
    /// `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            log_transform: false,
            alpha: DEFAULT_ALPHA,
            collinearity_threshold: DEFAULT_COLLINEARITY_THRESHOLD,
            model: None,
            seed: 0,
            permutations: None,
            threads: Some(1),
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.collinearity_threshold > 0.0 && self.collinearity_threshold <= 1.0) {
            return Err(CliError::Config("collinearity threshold must lie in (0, 1]".into()));
        }
        if let Some(p) = self.permutations {
            if p < MIN_PERMUTATIONS {
                return Err(CliError::Config(format!(
                    "at least {MIN_PERMUTATIONS} permutations required, got {p}"
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub attrs_path: PathBuf,
    pub dist_path: PathBuf,
    pub dist_format: DistFormat,
    pub options: AnalysisOptions,
    pub output: OutputFormat,
}

impl AnalysisConfig {
    pub fn new(attrs_path: impl Into<PathBuf>, dist_path: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            attrs_path: attrs_path.into(),
            dist_path: dist_path.into(),
            dist_format: DistFormat::default(),
            options: AnalysisOptions::default(),
            output: OutputFormat::default(),
        }
    }
}
