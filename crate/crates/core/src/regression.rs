//! Design matrices for the mixed spatial model family and their ordinary
//! least squares fits.
//!
//! The general model is `y = a + b·x + β₁·(nWx) + β₂·(nWy) + u`; the other
//! variants drop terms from it. The autoregressive column `nWy` is used as an
//! ordinary regressor (plain OLS, no endogeneity correction).

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::StandardizedVector;
use crate::distributions::{f_upper_p, student_t_two_sided_p};
use crate::error::{Error, Result};
use crate::linalg::{dot, mean, Matrix, Svd};

/// Smallest/largest singular value ratio below which a design is rank deficient.
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelVariant {
    /// `y = a + b·x`
    OlsSimple,
    /// `y = a + b·x + β₁·nWx + β₂·nWy`
    General,
    /// `y = a + b·x + β₂·nWy`
    Sar,
    /// `y = a + b·x + β₁·nWx`
    Slx,
    /// `y = β₂·nWy`
    PureSar,
    /// `y = β₁·nWx`
    PureSlx,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 6] = [
        ModelVariant::OlsSimple,
        ModelVariant::General,
        ModelVariant::Sar,
        ModelVariant::Slx,
        ModelVariant::PureSar,
        ModelVariant::PureSlx,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::OlsSimple => "ols_simple",
            ModelVariant::General => "general",
            ModelVariant::Sar => "sar",
            ModelVariant::Slx => "slx",
            ModelVariant::PureSar => "pure_sar",
            ModelVariant::PureSlx => "pure_slx",
        }
    }

    pub fn is_pure(self) -> bool {
        matches!(self, ModelVariant::PureSar | ModelVariant::PureSlx)
    }

    /// Regressors other than the intercept, in column order.
    pub fn terms(self) -> &'static [Term] {
        match self {
            ModelVariant::OlsSimple => &[Term::X],
            ModelVariant::General => &[Term::X, Term::LagX, Term::AutoY],
            ModelVariant::Sar => &[Term::X, Term::AutoY],
            ModelVariant::Slx => &[Term::X, Term::LagX],
            ModelVariant::PureSar => &[Term::AutoY],
            ModelVariant::PureSlx => &[Term::LagX],
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or(Error::InvalidParameter("unknown model variant"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub variant: ModelVariant,
    pub include_intercept: bool,
}

impl ModelSpec {
    /// Intercept on for every variant except the pure models.
    pub fn new(variant: ModelVariant) -> Self {
        ModelSpec {
            variant,
            include_intercept: !variant.is_pure(),
        }
    }

    pub fn with_intercept(mut self, include: bool) -> Self {
        self.include_intercept = include;
        self
    }

    pub fn terms(&self) -> Vec<Term> {
        let mut t = Vec::with_capacity(4);
        if self.include_intercept {
            t.push(Term::Intercept);
        }
        t.extend_from_slice(self.variant.terms());
        t
    }
}

/// A regression coefficient's role in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Constant `a`, column of ones.
    Intercept,
    /// Conventional coefficient `b`, column `x`.
    X,
    /// Lag-regressive coefficient `β₁`, column `n·Wx`.
    LagX,
    /// Autoregressive coefficient `β₂`, column `n·Wy`.
    AutoY,
}

impl Term {
    pub fn parameter(self) -> &'static str {
        match self {
            Term::Intercept => "a",
            Term::X => "b",
            Term::LagX => "beta1",
            Term::AutoY => "beta2",
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            Term::Intercept => "1",
            Term::X => "x",
            Term::LagX => "nWx",
            Term::AutoY => "nWy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub spec: ModelSpec,
    pub terms: Vec<Term>,
    pub matrix: Matrix,
}

/// The spatially lagged columns `n·Wx` and `n·Wy`.
#[derive(Debug, Clone)]
pub struct LagColumns {
    pub n_wx: Vec<f64>,
    pub n_wy: Vec<f64>,
}

impl LagColumns {
    pub fn new<W: AsRef<Matrix> + ?Sized>(x: &StandardizedVector, y: &StandardizedVector, w: &W) -> Result<Self> {
        let w = w.as_ref();
        let n = x.len();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if !w.is_square() || w.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.rows(),
            });
        }
        let nf = n as f64;
        let scale = |v: Vec<f64>| v.into_iter().map(|e| nf * e).collect::<Vec<_>>();
        Ok(LagColumns {
            n_wx: scale(w.mul_vec(x.as_slice())?),
            n_wy: scale(w.mul_vec(y.as_slice())?),
        })
    }

    pub fn mean_n_wx(&self) -> f64 {
        mean(&self.n_wx)
    }

    pub fn mean_n_wy(&self) -> f64 {
        mean(&self.n_wy)
    }
}

/// Columns drawn from `[1, x, nWx, nWy]` in that order.
pub fn build_design_matrix<W: AsRef<Matrix> + ?Sized>(
    spec: ModelSpec,
    x: &StandardizedVector,
    y: &StandardizedVector,
    w: &W,
) -> Result<Design> {
    let lags = LagColumns::new(x, y, w)?;
    design_from_lags(spec, x, &lags)
}

/// As [`build_design_matrix`] with precomputed lag columns.
pub fn design_from_lags(spec: ModelSpec, x: &StandardizedVector, lags: &LagColumns) -> Result<Design> {
    let n = x.len();
    if lags.n_wx.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lags.n_wx.len(),
        });
    }
    let ones = alloc::vec![1.0; n];
    let terms = spec.terms();
    let columns: Vec<&[f64]> = terms
        .iter()
        .map(|t| match t {
            Term::Intercept => ones.as_slice(),
            Term::X => x.as_slice(),
            Term::LagX => lags.n_wx.as_slice(),
            Term::AutoY => lags.n_wy.as_slice(),
        })
        .collect();
    Ok(Design {
        spec,
        terms,
        matrix: Matrix::from_columns(&columns)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub term: Term,
    pub value: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

/// Global goodness-of-fit statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub r_squared: f64,
    /// Regression standard error `s = √(SSR / (n − k))`.
    pub reg_std_error: f64,
    pub f_statistic: f64,
    pub f_p_value: f64,
    /// Durbin-Watson over residuals in input row order.
    pub durbin_watson: f64,
}

#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub spec: ModelSpec,
    pub coefficients: Vec<Coefficient>,
    pub response: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(1/n) Σ u²`.
    pub sigma_u_sq: f64,
    pub diagnostics: Diagnostics,
    pub condition_ratio: f64,
}

impl RegressionFit {
    pub fn n(&self) -> usize {
        self.residuals.len()
    }

    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, term: Term) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.term == term)
    }

    pub fn value(&self, term: Term) -> Option<f64> {
        self.coefficient(term).map(|c| c.value)
    }
}

fn t_ratio(value: f64, se: f64) -> f64 {
    if se > 0.0 {
        value / se
    } else if value == 0.0 {
        0.0
    } else {
        value.signum() * f64::INFINITY
    }
}

/// Solves `min ‖Xb − y‖²` through an SVD of the design and fills in diagnostics.
pub fn ols_fit(design: &Design, response: &[f64]) -> Result<RegressionFit> {
    let x = &design.matrix;
    let (n, k) = (x.rows(), x.cols());
    if response.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: response.len(),
        });
    }
    if n <= k {
        return Err(Error::InsufficientData {
            observations: n,
            parameters: k,
        });
    }
    let svd = Svd::compute(x)?;
    let condition_ratio = svd.condition_ratio();
    if !(condition_ratio >= RANK_THRESHOLD) {
        return Err(Error::RankDeficient { condition_ratio });
    }
    let beta = svd.solve(response);
    let fitted = x.mul_vec(&beta)?;
    let residuals: Vec<f64> = response.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let has_intercept = design.spec.include_intercept;
    let diagnostics = diagnostics(response, &residuals, k, has_intercept)?;

    let ssr = dot(&residuals, &residuals);
    let sigma_hat_sq = ssr / (n - k) as f64;
    let gram_inv = svd.gram_inverse();
    let df = (n - k) as f64;
    let coefficients = design
        .terms
        .iter()
        .zip(&beta)
        .enumerate()
        .map(|(j, (&term, &value))| {
            let std_error = libm::sqrt((sigma_hat_sq * gram_inv.get(j, j)).max(0.0));
            let t_value = t_ratio(value, std_error);
            Coefficient {
                term,
                value,
                std_error,
                t_value,
                p_value: student_t_two_sided_p(t_value, df),
            }
        })
        .collect();

    Ok(RegressionFit {
        spec: design.spec,
        coefficients,
        response: response.to_vec(),
        fitted,
        residuals,
        sigma_u_sq: ssr / n as f64,
        diagnostics,
        condition_ratio,
    })
}

/// `R² = 1 − SSR/SST` (SST centred with an intercept, uncentred without),
/// `s = √(SSR/(n−k))`, the overall F test, and Durbin-Watson in row order.
pub fn diagnostics(response: &[f64], residuals: &[f64], k: usize, has_intercept: bool) -> Result<Diagnostics> {
    let n = residuals.len();
    if response.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: response.len(),
        });
    }
    if n <= k {
        return Err(Error::InsufficientData {
            observations: n,
            parameters: k,
        });
    }
    let centre = if has_intercept { mean(response) } else { 0.0 };
    let sst: f64 = response.iter().map(|y| (y - centre) * (y - centre)).sum();
    if !(sst > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let ssr = dot(residuals, residuals);
    let r_squared = (1.0 - ssr / sst).clamp(0.0, 1.0);
    let df_resid = (n - k) as f64;
    let df_model = if has_intercept { k as f64 - 1.0 } else { k as f64 };
    let f_statistic = if df_model > 0.0 {
        let denom = (1.0 - r_squared) / df_resid;
        if denom > 0.0 {
            (r_squared / df_model) / denom
        } else {
            f64::INFINITY
        }
    } else {
        f64::NAN
    };
    let f_p_value = if df_model > 0.0 {
        f_upper_p(f_statistic, df_model, df_resid)
    } else {
        f64::NAN
    };
    let dw_num: f64 = residuals.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0])).sum();
    let durbin_watson = if ssr > 0.0 { dw_num / ssr } else { f64::NAN };
    Ok(Diagnostics {
        r_squared,
        reg_std_error: libm::sqrt(ssr / df_resid),
        f_statistic,
        f_p_value,
        durbin_watson,
    })
}

/// `δ = (1/n) uᵀu`.
pub fn residual_variance(fit: &RegressionFit) -> f64 {
    fit.sigma_u_sq
}

/// `(1/n) yᵀu`; equals `δ` for any OLS fit because fitted values are orthogonal to residuals.
pub fn response_residual_moment(fit: &RegressionFit) -> f64 {
    dot(&fit.response, &fit.residuals) / fit.n() as f64
}

/// Fits `variant` on standardized `x`, `y`: response `y`, regressors from `[1, x, nWx, nWy]`.
pub fn fit_model<W: AsRef<Matrix> + ?Sized>(
    spec: ModelSpec,
    x: &StandardizedVector,
    y: &StandardizedVector,
    w: &W,
) -> Result<RegressionFit> {
    let design = build_design_matrix(spec, x, y, w)?;
    ols_fit(&design, y.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::zscore;
    use alloc::vec;

    fn equal_weights(n: usize) -> Matrix {
        let c = 1.0 / (n * (n - 1)) as f64;
        Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { c })
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn design_columns_per_variant() {
        let x = zscore(&[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        let y = zscore(&[2.0, 1.0, 3.0, 6.0, 4.0]).unwrap();
        let w = equal_weights(5);
        let general = build_design_matrix(ModelSpec::new(ModelVariant::General), &x, &y, &w).unwrap();
        assert_eq!(general.matrix.cols(), 4);
        assert_eq!(general.terms, [Term::Intercept, Term::X, Term::LagX, Term::AutoY]);
        let wx = w.mul_vec(x.as_slice()).unwrap();
        for i in 0..5 {
            assert_eq!(general.matrix.get(i, 0), 1.0);
            assert_eq!(general.matrix.get(i, 1), x.as_slice()[i]);
            assert_eq!(general.matrix.get(i, 2), 5.0 * wx[i]);
        }
        let sar = build_design_matrix(ModelSpec::new(ModelVariant::Sar), &x, &y, &w).unwrap();
        assert_eq!(sar.terms, [Term::Intercept, Term::X, Term::AutoY]);
        let pure = build_design_matrix(ModelSpec::new(ModelVariant::PureSar), &x, &y, &w).unwrap();
        assert_eq!(pure.terms, [Term::AutoY]);
        assert_eq!(pure.matrix.cols(), 1);
        assert!(matches!(
            build_design_matrix(ModelSpec::new(ModelVariant::Sar), &x, &y, &equal_weights(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn perfect_fit() {
        let x = zscore(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let response: Vec<f64> = x.as_slice().iter().map(|v| 2.0 * v).collect();
        let design = Design {
            spec: ModelSpec::new(ModelVariant::OlsSimple),
            terms: vec![Term::Intercept, Term::X],
            matrix: Matrix::from_columns(&[&[1.0; 4], x.as_slice()]).unwrap(),
        };
        let fit = ols_fit(&design, &response).unwrap();
        assert!(fit.value(Term::Intercept).unwrap().abs() < 1e-14);
        assert!((fit.value(Term::X).unwrap() - 2.0).abs() < 1e-14);
        assert!(fit.residuals.iter().all(|u| u.abs() < 1e-14));
        assert!((fit.diagnostics.r_squared - 1.0).abs() < 1e-14);
        assert!(fit.diagnostics.reg_std_error < 1e-14);
        assert!(residual_variance(&fit) < 1e-28);
    }

    #[test]
    fn fit_errors() {
        let x = zscore(&[1.0, 2.0, 3.0]).unwrap();
        let design = Design {
            spec: ModelSpec::new(ModelVariant::OlsSimple),
            terms: vec![Term::Intercept, Term::X, Term::LagX],
            matrix: Matrix::from_columns(&[&[1.0; 3], x.as_slice(), x.as_slice()]).unwrap(),
        };
        assert!(matches!(
            ols_fit(&design, &[1.0, 2.0, 3.0]),
            Err(Error::InsufficientData { .. })
        ));

        let x = zscore(&[1.0, 2.0, 3.0, 5.0, 4.0]).unwrap();
        let doubled: Vec<f64> = x.as_slice().iter().map(|v| 2.0 * v).collect();
        let design = Design {
            spec: ModelSpec::new(ModelVariant::Slx),
            terms: vec![Term::Intercept, Term::X, Term::LagX],
            matrix: Matrix::from_columns(&[&[1.0; 5], x.as_slice(), &doubled]).unwrap(),
        };
        assert!(matches!(
            ols_fit(&design, &[1.0, 0.0, 3.0, 2.0, 1.0]),
            Err(Error::RankDeficient { .. })
        ));

        assert_eq!(
            diagnostics(&[1.0; 4], &[0.0; 4], 2, true),
            Err(Error::DegenerateVariance)
        );
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ModelVariant::ALL {
            assert_eq!(v.as_str().parse::<ModelVariant>().unwrap(), v);
        }
        assert!("spatial_error".parse::<ModelVariant>().is_err());
        assert!(!ModelSpec::new(ModelVariant::PureSlx).include_intercept);
        assert!(ModelSpec::new(ModelVariant::Sar).include_intercept);
    }
}
