//! Spatial auto- and cross-correlation on standardized variables, ordinary
//! least squares fits of spatial autoregressive / lag-regressive models, and
//! the closed-form decomposition of the fitted spatial coefficients into
//! correlation statistics.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and report rendering live in `spatreg-cli`.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod advisor;
pub mod correlation;
pub mod data;
pub mod decomposition;
pub mod distributions;
pub mod error;
pub mod linalg;
pub mod regression;
pub mod weights;

pub use correlation::{CorrelationTest, SpatialCorrelationMatrix, TestMethod};
pub use data::{RawAttributeTable, StandardizedVector};
pub use decomposition::{DecompositionInput, DecompositionMode, DecompositionResult, IdentityCheckReport};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use regression::{ModelSpec, ModelVariant, RegressionFit, Term};
pub use weights::{ContiguityMatrix, DistanceMatrix, SpatialWeightMatrix, TemporalWeightMatrix};
