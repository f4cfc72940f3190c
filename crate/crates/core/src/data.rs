//! Attribute ingestion model and z-score standardization.
//!
//! Every statistic in this crate is defined on standardized variables: mean
//! zero and *population* standard deviation one, so that `zᵀz = n` and
//! `zᵀ1 = 0`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Paired attribute observations for `n` labelled units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAttributeTable {
    ids: Vec<String>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl RawAttributeTable {
    pub const MIN_UNITS: usize = 3;

    pub fn new(ids: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: x.len(),
            });
        }
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if n < Self::MIN_UNITS {
            return Err(Error::TooFewObservations {
                required: Self::MIN_UNITS,
                found: n,
            });
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        check_finite(&x)?;
        check_finite(&y)?;
        Ok(RawAttributeTable { ids, x, y })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Applies the natural logarithm to both attributes.
    pub fn log_transformed(&self) -> Result<Self> {
        Ok(RawAttributeTable {
            ids: self.ids.clone(),
            x: log_transform(&self.x)?,
            y: log_transform(&self.y)?,
        })
    }

    /// Standardizes both attributes; returns `(x, y)`.
    pub fn standardize(&self) -> Result<(StandardizedVector, StandardizedVector)> {
        Ok((zscore(&self.x)?, zscore(&self.y)?))
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFiniteValue { index }),
        None => Ok(()),
    }
}

/// Element-wise natural logarithm of strictly positive data.
pub fn log_transform(raw: &[f64]) -> Result<Vec<f64>> {
    raw.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value > 0.0 && value.is_finite() {
                Ok(libm::log(value))
            } else if value.is_nan() || value.is_infinite() {
                Err(Error::NonFiniteValue { index })
            } else {
                Err(Error::NonPositiveValue { index, value })
            }
        })
        .collect()
}

/// A z-scored observation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedVector(Vec<f64>);

impl StandardizedVector {
    /// Tolerance for the mean-zero / unit-variance checks of [`StandardizedVector::new`].
    pub const TOLERANCE: f64 = 1e-12;

    /// Wraps values that are already standardized, verifying that they are.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooFewObservations { required: 2, found: n });
        }
        check_finite(&values)?;
        let nf = n as f64;
        let sum: f64 = values.iter().sum();
        let ss: f64 = values.iter().map(|v| v * v).sum();
        if sum.abs() > Self::TOLERANCE * nf || (ss / nf - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::InvalidParameter("vector is not standardized"));
        }
        Ok(StandardizedVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn negated(&self) -> Self {
        StandardizedVector(self.0.iter().map(|v| -v).collect())
    }

    /// Reorders entries by `order` (a permutation of `0..n`).
    pub(crate) fn permuted(&self, order: &[usize]) -> Vec<f64> {
        order.iter().map(|&i| self.0[i]).collect()
    }
}

impl AsRef<[f64]> for StandardizedVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Population mean and standard deviation (divide by `n`), two-pass.
pub fn mean_and_population_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let dev_sum: f64 = v.iter().map(|x| x - mean).sum();
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    // Corrected two-pass variance.
    let var = (ss - dev_sum * dev_sum / n) / n;
    (mean, libm::sqrt(var.max(0.0)))
}

/// `(raw - mean) / popStd`.
pub fn zscore(raw: &[f64]) -> Result<StandardizedVector> {
    let n = raw.len();
    if n < 2 {
        return Err(Error::TooFewObservations { required: 2, found: n });
    }
    check_finite(raw)?;
    let (mean, sd) = mean_and_population_std(raw);
    if !(sd > 0.0) || sd <= f64::EPSILON * mean.abs() {
        return Err(Error::ZeroVariance);
    }
    let mut z: Vec<f64> = raw.iter().map(|x| (x - mean) / sd).collect();
    // One refinement pass removes the rounding left by the first pass.
    let (m2, sd2) = mean_and_population_std(&z);
    z.iter_mut().for_each(|v| *v = (*v - m2) / sd2);
    Ok(StandardizedVector(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn log_of_powers_of_e() {
        let e = core::f64::consts::E;
        assert!(close(
            &log_transform(&[1.0, e, e * e]).unwrap(),
            &[0.0, 1.0, 2.0],
            1e-15
        ));
        assert_eq!(log_transform(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        // ln 3, ln 9 to 20 digits: 1.0986122886681096914, 2.1972245773362193828
        assert!(close(
            &log_transform(&[3.0, 9.0]).unwrap(),
            &[1.098_612_288_668_109_7, 2.197_224_577_336_219_4],
            1e-15
        ));
    }

    #[test]
    fn log_rejects_non_positive() {
        assert_eq!(
            log_transform(&[1.0, 0.0]),
            Err(Error::NonPositiveValue { index: 1, value: 0.0 })
        );
        assert!(matches!(
            log_transform(&[-2.0]),
            Err(Error::NonPositiveValue { index: 0, .. })
        ));
    }

    #[test]
    fn zscore_examples() {
        assert!(close(zscore(&[1.0, -1.0]).unwrap().as_slice(), &[1.0, -1.0], 1e-15));
        assert!(close(zscore(&[0.0, 10.0]).unwrap().as_slice(), &[-1.0, 1.0], 1e-15));
        // mean 2.5, popStd sqrt(5/4)
        let s = libm::sqrt(1.25);
        let expected = [-1.5 / s, -0.5 / s, 0.5 / s, 1.5 / s];
        assert!(close(
            zscore(&[1.0, 2.0, 3.0, 4.0]).unwrap().as_slice(),
            &expected,
            1e-14
        ));
        assert!((expected[0] + 1.341641).abs() < 1e-6);
    }

    #[test]
    fn zscore_rejects_constant() {
        assert_eq!(zscore(&[3.0, 3.0, 3.0]), Err(Error::ZeroVariance));
        assert_eq!(zscore(&[1e300, 1e300]), Err(Error::ZeroVariance));
    }

    #[test]
    fn table_validation() {
        let ids = |v: &[&str]| v.iter().map(|s| String::from(*s)).collect::<Vec<_>>();
        assert!(matches!(
            RawAttributeTable::new(ids(&["a", "b", "a"]), vec![1.0; 3], vec![1.0; 3]),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            RawAttributeTable::new(ids(&["a", "b"]), vec![1.0; 2], vec![1.0; 2]),
            Err(Error::TooFewObservations { .. })
        ));
        assert!(matches!(
            RawAttributeTable::new(ids(&["a", "b", "c"]), vec![1.0; 3], vec![1.0; 2]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            RawAttributeTable::new(ids(&["a", "b", "c"]), vec![1.0, f64::NAN, 2.0], vec![1.0; 3]),
            Err(Error::NonFiniteValue { index: 1 })
        ));
    }

    #[test]
    fn new_checks_invariants() {
        assert!(StandardizedVector::new(vec![1.0, -1.0]).is_ok());
        assert!(StandardizedVector::new(vec![1.0, 2.0]).is_err());
    }
}
