use rayon::prelude::*;
use spatreg_core::correlation::{
    cross_correlation, permutation_test_from_samples, permuted_statistic, significance_by_permutation, MIN_PERMUTATIONS,
};
use spatreg_core::{CorrelationTest, Matrix, StandardizedVector};

use crate::error::{CliError, Result};

/// Permutation test whose permutations are spread over a rayon pool.
///
/// Permutation `k` is fully determined by `(seed, k)` and rayon's indexed
/// collect keeps sample order, so the result does not depend on `threads`.
pub fn permutation_test(
    z1: &StandardizedVector,
    z2: &StandardizedVector,
    w: &Matrix,
    permutations: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CorrelationTest> {
    let ctx = "permutation test";
    if threads == Some(1) {
        return significance_by_permutation(z1, z2, w, permutations, seed).map_err(CliError::core(ctx));
    }
    if permutations < MIN_PERMUTATIONS {
        return Err(CliError::core(ctx)(spatreg_core::Error::TooFewPermutations {
            requested: permutations,
            minimum: MIN_PERMUTATIONS,
        }));
    }
    let observed = cross_correlation(z1, z2, w).map_err(CliError::core(ctx))?;
    let run = || {
        (0..permutations as u64)
            .into_par_iter()
            .map(|k| permuted_statistic(z1, z2, w, seed, k))
            .collect::<spatreg_core::Result<Vec<f64>>>()
    };
    let samples = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?
            .install(run),
        None => run(),
    }
    .map_err(CliError::core(ctx))?;
    Ok(permutation_test_from_samples(observed, &samples))
}
