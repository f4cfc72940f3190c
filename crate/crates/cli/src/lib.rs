//! File formats, analysis pipeline and report rendering on top of
//! [`spatreg_core`].

pub mod config;
pub mod error;
pub mod io;
pub mod permutation;
pub mod pipeline;
pub mod report;

pub use config::{AnalysisConfig, AnalysisOptions, DistFormat, OutputFormat};
pub use error::{CliError, Result};
pub use pipeline::{analyze, run_pipeline, Analysis};
pub use report::AnalysisReport;
