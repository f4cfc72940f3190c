//! Inverse-distance contiguity, global normalization and the step-function
//! temporal contiguity used for serial autocorrelation.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative asymmetry above which a distance table is rejected; below it the
/// two triangles are averaged.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-6;

/// Pairwise distances between units. The diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(Matrix);

impl DistanceMatrix {
    pub fn new(r: Matrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::DimensionMismatch {
                expected: r.rows(),
                found: r.cols(),
            });
        }
        Ok(DistanceMatrix(r))
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// Symmetric, zero-diagonal, non-negative proximity matrix `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContiguityMatrix(Matrix);

impl ContiguityMatrix {
    pub fn new(v: Matrix) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch {
                expected: v.rows(),
                found: v.cols(),
            });
        }
        let n = v.rows();
        for i in 0..n {
            if v.get(i, i) != 0.0 {
                return Err(Error::InvalidParameter("contiguity diagonal must be zero"));
            }
            for j in 0..n {
                let x = v.get(i, j);
                if !(x >= 0.0) || !x.is_finite() {
                    return Err(Error::InvalidParameter(
                        "contiguity entries must be finite and non-negative",
                    ));
                }
                if x != v.get(j, i) {
                    return Err(Error::InvalidParameter("contiguity matrix must be symmetric"));
                }
            }
        }
        Ok(ContiguityMatrix(v))
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for ContiguityMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Globally normalized spatial weights: symmetric, zero diagonal, entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialWeightMatrix(Matrix);

impl SpatialWeightMatrix {
    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for SpatialWeightMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Temporal weights `W_τ = V_τ / (2n)`. Entries sum to `(n - τ) / n`, not one.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalWeightMatrix {
    w: Matrix,
    lag: usize,
}

impl TemporalWeightMatrix {
    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }
}

impl AsRef<Matrix> for TemporalWeightMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.w
    }
}

/// `v_ij = 1 / r_ij` off the diagonal, zero on it.
pub fn inverse_distance_contiguity(d: &DistanceMatrix) -> Result<ContiguityMatrix> {
    let r = d.matrix();
    let n = r.rows();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (r.get(i, j), r.get(j, i));
            for (p, q, value) in [(i, j, a), (j, i, b)] {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositiveDistance { i: p, j: q, value });
                }
            }
            let relative_gap = (a - b).abs() / a.max(b);
            if relative_gap > ASYMMETRY_TOLERANCE {
                return Err(Error::AsymmetricDistance { i, j, relative_gap });
            }
            let vij = 0.5 * (1.0 / a + 1.0 / b);
            v.set(i, j, vij);
            v.set(j, i, vij);
        }
    }
    Ok(ContiguityMatrix(v))
}

/// `W = V / ΣΣ v_ij`.
pub fn normalize_global(v: &ContiguityMatrix) -> Result<SpatialWeightMatrix> {
    let total = v.matrix().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let mut w = v.matrix().clone();
    w.scale(1.0 / total);
    Ok(SpatialWeightMatrix(w))
}

/// Convenience: distances straight to normalized weights.
pub fn spatial_weights(d: &DistanceMatrix) -> Result<SpatialWeightMatrix> {
    normalize_global(&inverse_distance_contiguity(d)?)
}

/// `v_ij = 1` iff `|i - j| = τ`.
pub fn temporal_contiguity(n: usize, tau: usize) -> Result<ContiguityMatrix> {
    if tau == 0 || tau >= n {
        return Err(Error::LagOutOfRange { lag: tau, n });
    }
    Ok(ContiguityMatrix(Matrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == tau {
            1.0
        } else {
            0.0
        }
    })))
}

/// `W_τ = V_τ / (2n)`.
pub fn temporal_weights(v: &ContiguityMatrix, n: usize) -> Result<TemporalWeightMatrix> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let m = v.matrix();
    let lag = (1..n)
        .find(|&d| m.get(0, d) != 0.0 || m.get(d, 0) != 0.0)
        .ok_or(Error::InvalidParameter("temporal contiguity matrix has no lag band"))?;
    let mut w = m.clone();
    w.scale(1.0 / (2.0 * n as f64));
    Ok(TemporalWeightMatrix { w, lag })
}
