//! Correlation statistics as quadratic and bilinear forms of standardized
//! vectors: Pearson `R = xᵀy / n`, Moran's `I = zᵀWz`, cross-correlation
//! `xᵀWy`, residual Moran, and serial autocorrelation through temporal
//! weights. Significance is assessed either by the one-variable regression of
//! `n·Wz₂` on `z₁` (the slope of which is exactly `z₁ᵀWz₂`) or by a seeded
//! permutation test.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{zscore, StandardizedVector};
use crate::distributions::student_t_two_sided_p;
use crate::error::{Error, Result};
use crate::linalg::{dot, mean, Matrix};
use crate::weights::{temporal_contiguity, temporal_weights};

/// `C = XᵀWX` for `X = [x, y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialCorrelationMatrix {
    pub i_x: f64,
    pub i_xy: f64,
    pub i_yx: f64,
    pub i_y: f64,
}

impl SpatialCorrelationMatrix {
    pub fn new(i_x: f64, i_xy: f64, i_y: f64) -> Self {
        SpatialCorrelationMatrix {
            i_x,
            i_xy,
            i_yx: i_xy,
            i_y,
        }
    }

    pub fn as_rows(&self) -> [[f64; 2]; 2] {
        [[self.i_x, self.i_xy], [self.i_yx, self.i_y]]
    }

    pub fn determinant(&self) -> f64 {
        self.i_x * self.i_y - self.i_xy * self.i_yx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestMethod {
    RegressionT,
    Permutation,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMethod::RegressionT => "regression_t",
            TestMethod::Permutation => "permutation",
        }
    }
}

/// Significance of a correlation index.
///
/// For `RegressionT`, `slope_se` is the OLS standard error of the slope and
/// `t_value = statistic / slope_se`. For `Permutation`, `slope_se` holds the
/// standard deviation of the permutation distribution and `t_value` the
/// standardized distance of the observed index from its permutation mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTest {
    pub statistic: f64,
    pub slope_se: f64,
    pub t_value: f64,
    pub p_value: f64,
    pub method: TestMethod,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

fn check_weights(n: usize, w: &Matrix) -> Result<()> {
    if !w.is_square() || w.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.rows(),
        });
    }
    Ok(())
}

/// `R = xᵀy / n`.
pub fn pearson_r(x: &StandardizedVector, y: &StandardizedVector) -> Result<f64> {
    check_len(x.len(), y.len())?;
    Ok(dot(x.as_slice(), y.as_slice()) / x.len() as f64)
}

/// `XᵀX / n` for `X = [x, y]`.
pub fn pearson_matrix(x: &StandardizedVector, y: &StandardizedVector) -> Result<[[f64; 2]; 2]> {
    let r = pearson_r(x, y)?;
    let n = x.len() as f64;
    let xx = dot(x.as_slice(), x.as_slice()) / n;
    let yy = dot(y.as_slice(), y.as_slice()) / n;
    Ok([[xx, r], [r, yy]])
}

/// Moran's index `zᵀWz`.
pub fn morans_index<W: AsRef<Matrix> + ?Sized>(z: &StandardizedVector, w: &W) -> Result<f64> {
    let w = w.as_ref();
    check_weights(z.len(), w)?;
    w.bilinear(z.as_slice(), z.as_slice())
}

/// Spatial cross-correlation `xᵀWy`.
pub fn cross_correlation<W: AsRef<Matrix> + ?Sized>(
    x: &StandardizedVector,
    y: &StandardizedVector,
    w: &W,
) -> Result<f64> {
    let w = w.as_ref();
    check_len(x.len(), y.len())?;
    check_weights(x.len(), w)?;
    w.bilinear(x.as_slice(), y.as_slice())
}

pub fn spatial_correlation_matrix<W: AsRef<Matrix> + ?Sized>(
    x: &StandardizedVector,
    y: &StandardizedVector,
    w: &W,
) -> Result<SpatialCorrelationMatrix> {
    let w = w.as_ref();
    check_len(x.len(), y.len())?;
    check_weights(x.len(), w)?;
    let wx = w.mul_vec(x.as_slice())?;
    let wy = w.mul_vec(y.as_slice())?;
    Ok(SpatialCorrelationMatrix {
        i_x: dot(x.as_slice(), &wx),
        i_xy: dot(x.as_slice(), &wy),
        i_yx: dot(y.as_slice(), &wx),
        i_y: dot(y.as_slice(), &wy),
    })
}

/// Moran's index of z-scored residuals, `eᵀWe = εᵀWε / σ_ε²` with population variance.
pub fn residual_moran<W: AsRef<Matrix> + ?Sized>(residuals: &[f64], w: &W) -> Result<f64> {
    let e = zscore(residuals)?;
    morans_index(&e, w)
}

/// One-variable OLS of `response` on `[1, explanatory]`; returns `(slope, se)`.
fn simple_slope(explanatory: &[f64], response: &[f64]) -> Result<(f64, f64)> {
    let n = explanatory.len();
    let mx = mean(explanatory);
    let my = mean(response);
    let sxx: f64 = explanatory.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateRegression);
    }
    let sxy: f64 = explanatory.iter().zip(response).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = explanatory
        .iter()
        .zip(response)
        .map(|(x, y)| {
            let u = y - intercept - slope * x;
            u * u
        })
        .sum();
    let se = libm::sqrt(ssr / (n as f64 - 2.0) / sxx);
    Ok((slope, se))
}

/// Regresses `n·(W z₂)` on `z₁` with an intercept and t-tests the slope
/// (two-sided, `n − 2` degrees of freedom). The slope equals `z₁ᵀWz₂`.
pub fn significance_by_regression<W: AsRef<Matrix> + ?Sized>(
    z1: &StandardizedVector,
    z2: &StandardizedVector,
    w: &W,
) -> Result<CorrelationTest> {
    let w = w.as_ref();
    check_len(z1.len(), z2.len())?;
    check_weights(z1.len(), w)?;
    let n = z1.len();
    if n < 4 {
        return Err(Error::TooFewObservations { required: 4, found: n });
    }
    let nf = n as f64;
    let response: Vec<f64> = w.mul_vec(z2.as_slice())?.into_iter().map(|v| nf * v).collect();
    let (slope, se) = simple_slope(z1.as_slice(), &response)?;
    let t_value = if se > 0.0 {
        slope / se
    } else if slope == 0.0 {
        0.0
    } else {
        slope.signum() * f64::INFINITY
    };
    Ok(CorrelationTest {
        statistic: slope,
        slope_se: se,
        t_value,
        p_value: student_t_two_sided_p(t_value, nf - 2.0),
        method: TestMethod::RegressionT,
    })
}

pub const MIN_PERMUTATIONS: usize = 99;

/// The index `z₁ᵀ W π(z₂)` for the `index`-th seeded permutation `π`.
///
/// Each permutation is drawn from its own ChaCha stream keyed by
/// `(seed, index)`, so any subset of permutations can be evaluated in any
/// order (or concurrently) with identical results.
pub fn permuted_statistic<W: AsRef<Matrix> + ?Sized>(
    z1: &StandardizedVector,
    z2: &StandardizedVector,
    w: &W,
    seed: u64,
    index: u64,
) -> Result<f64> {
    let w = w.as_ref();
    check_len(z1.len(), z2.len())?;
    check_weights(z1.len(), w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut order: Vec<usize> = (0..z2.len()).collect();
    order.shuffle(&mut rng);
    w.bilinear(z1.as_slice(), &z2.permuted(&order))
}

/// Folds the permutation distribution into a test result.
pub fn permutation_test_from_samples(observed: f64, samples: &[f64]) -> CorrelationTest {
    let m = samples.len() as f64;
    // Relative slack so that ties broken only by rounding still count.
    let threshold = observed.abs() * (1.0 - 1e-12);
    let extreme = samples.iter().filter(|s| s.abs() >= threshold).count() as f64;
    let mu = mean(samples);
    let sd = libm::sqrt(samples.iter().map(|s| (s - mu) * (s - mu)).sum::<f64>() / m);
    let t_value = if sd > 0.0 { (observed - mu) / sd } else { 0.0 };
    CorrelationTest {
        statistic: observed,
        slope_se: sd,
        t_value,
        p_value: (1.0 + extreme) / (m + 1.0),
        method: TestMethod::Permutation,
    }
}

/// Pseudo p-value `(1 + #{|I_π| ≥ |I_obs|}) / (permutations + 1)`, permuting `z₂`.
pub fn significance_by_permutation<W: AsRef<Matrix> + ?Sized>(
    z1: &StandardizedVector,
    z2: &StandardizedVector,
    w: &W,
    permutations: usize,
    seed: u64,
) -> Result<CorrelationTest> {
    if permutations < MIN_PERMUTATIONS {
        return Err(Error::TooFewPermutations {
            requested: permutations,
            minimum: MIN_PERMUTATIONS,
        });
    }
    let observed = cross_correlation(z1, z2, w)?;
    let samples = (0..permutations as u64)
        .map(|k| permuted_statistic(z1, z2, w, seed, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(permutation_test_from_samples(observed, &samples))
}

/// Lag-`τ` autocorrelation `zᵀW_τz` with `W_τ = V_τ / (2n)`.
pub fn temporal_acf(z: &StandardizedVector, tau: usize) -> Result<f64> {
    let n = z.len();
    let w = temporal_weights(&temporal_contiguity(n, tau)?, n)?;
    morans_index(z, &w)
}
