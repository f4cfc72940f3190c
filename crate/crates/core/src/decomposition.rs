//! Closed-form decomposition of the spatial regression coefficients.
//!
//! Premultiplying the general model by `xᵀ` and `yᵀ` (with standardized
//! variables, `xᵀ1 = yᵀ1 = 0` and OLS residuals orthogonal to the regressors)
//! gives the 2x2 system
//!
//! ```text
//! | I_x   I_xy | |β₁|   | R − b          |
//! | I_yx  I_y  | |β₂| = | 1 − R·b − σ_u² |
//! ```
//!
//! which is solved by Cramer's rule: `β₁ = O/Q`, `β₂ = P/Q` with
//! `Q = I_x·I_y − I_xy²`. `Q = 0` is exactly the condition under which `Wx`
//! and `Wy` are collinear.

use crate::correlation::SpatialCorrelationMatrix;
use crate::error::{Error, Result};

/// Relative threshold on `|Q|` against `|I_x·I_y| + I_xy²`.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionInput {
    /// Pearson correlation `R`.
    pub r: f64,
    /// Conventional coefficient `b`.
    pub b: f64,
    /// Residual variance `δ = σ_u²`.
    pub sigma_u_sq: f64,
    pub c: SpatialCorrelationMatrix,
}

impl DecompositionInput {
    pub fn new(r: f64, b: f64, sigma_u_sq: f64, c: SpatialCorrelationMatrix) -> Result<Self> {
        if !(r.abs() <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter("|R| must not exceed 1"));
        }
        if !(sigma_u_sq >= 0.0) {
            return Err(Error::InvalidParameter("residual variance must be non-negative"));
        }
        Ok(DecompositionInput { r, b, sigma_u_sq, c })
    }

    /// Theoretical inputs: `b = R`, `δ = 0`.
    pub fn canonical(r: f64, c: SpatialCorrelationMatrix) -> Result<Self> {
        Self::new(r, r, 0.0, c)
    }

    /// `R − b`.
    pub fn first_rhs(&self) -> f64 {
        self.r - self.b
    }

    /// `1 − R·b − σ_u²`.
    pub fn second_rhs(&self) -> f64 {
        1.0 - self.r * self.b - self.sigma_u_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinants {
    pub o: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecompositionMode {
    /// Arbitrary `b` and `σ_u²`.
    Full,
    /// `σ_u² = 0`.
    NoError,
    /// `b = R`, `σ_u² = 0`.
    Canonical,
}

impl DecompositionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DecompositionMode::Full => "full",
            DecompositionMode::NoError => "no_error",
            DecompositionMode::Canonical => "canonical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResult {
    pub beta1: f64,
    pub beta2: f64,
    pub det_o: f64,
    pub det_p: f64,
    pub det_q: f64,
    pub mode: DecompositionMode,
}

/// `O`, `P`, `Q` of the Cramer system.
pub fn cramer_system(input: &DecompositionInput) -> Determinants {
    let c = &input.c;
    let (r1, r2) = (input.first_rhs(), input.second_rhs());
    Determinants {
        o: r1 * c.i_y - r2 * c.i_xy,
        p: c.i_x * r2 - c.i_yx * r1,
        q: c.i_x * c.i_y - c.i_xy * c.i_yx,
    }
}

/// Whether `q` vanishes relative to the scale of its two products.
pub fn is_singular(q: f64, c: &SpatialCorrelationMatrix) -> bool {
    let scale = (c.i_x * c.i_y).abs() + (c.i_xy * c.i_yx).abs();
    !(q.abs() > SINGULARITY_THRESHOLD * scale)
}

fn solve(input: &DecompositionInput, mode: DecompositionMode) -> Result<DecompositionResult> {
    let d = cramer_system(input);
    if is_singular(d.q, &input.c) {
        return Err(Error::SingularSystem { q: d.q });
    }
    Ok(DecompositionResult {
        beta1: d.o / d.q,
        beta2: d.p / d.q,
        det_o: d.o,
        det_p: d.p,
        det_q: d.q,
        mode,
    })
}

/// `β₁ = O/Q`, `β₂ = P/Q` for arbitrary `b` and `σ_u²`.
pub fn decompose_full(input: &DecompositionInput) -> Result<DecompositionResult> {
    solve(input, DecompositionMode::Full)
}

/// Cramer solution with the error term dropped (`σ_u² = 0`).
pub fn decompose_no_error(r: f64, b: f64, c: SpatialCorrelationMatrix) -> Result<DecompositionResult> {
    solve(&DecompositionInput::new(r, b, 0.0, c)?, DecompositionMode::NoError)
}

/// `β₁ = (R² − 1)·I_xy / Q`, `β₂ = (1 − R²)·I_x / Q`.
pub fn decompose_canonical(r: f64, c: SpatialCorrelationMatrix) -> Result<DecompositionResult> {
    let input = DecompositionInput::canonical(r, c)?;
    let d = cramer_system(&input);
    if is_singular(d.q, &c) {
        return Err(Error::SingularSystem { q: d.q });
    }
    let one_minus_r2 = 1.0 - r * r;
    Ok(DecompositionResult {
        beta1: -one_minus_r2 * c.i_xy / d.q,
        beta2: one_minus_r2 * c.i_x / d.q,
        det_o: d.o,
        det_p: d.p,
        det_q: d.q,
        mode: DecompositionMode::Canonical,
    })
}

/// Intercept implied by the spatial terms: `a = −β₁·mean(nWx) − β₂·mean(nWy)`.
pub fn constant_term(beta1: f64, beta2: f64, mean_n_wx: f64, mean_n_wy: f64) -> f64 {
    -beta1 * mean_n_wx - beta2 * mean_n_wy
}

/// Left and right sides of the three moment identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheckReport {
    /// `β₁I_x + β₂I_xy` vs `R − b`.
    pub x_moment: (f64, f64),
    /// `β₁I_yx + β₂I_y` vs `1 − Rb − δ`.
    pub y_moment: (f64, f64),
    /// `β₁I_yx + β₂I_y` vs `1 − Rb`.
    pub y_moment_no_error: (f64, f64),
    /// Largest gap among the identities that apply: x_moment and y_moment always;
    /// y_moment_no_error only when `δ = 0`.
    pub max_abs_gap: f64,
}

impl IdentityCheckReport {
    pub fn x_moment_gap(&self) -> f64 {
        (self.x_moment.0 - self.x_moment.1).abs()
    }

    pub fn y_moment_gap(&self) -> f64 {
        (self.y_moment.0 - self.y_moment.1).abs()
    }

    pub fn y_moment_no_error_gap(&self) -> f64 {
        (self.y_moment_no_error.0 - self.y_moment_no_error.1).abs()
    }
}

pub fn identity_check(input: &DecompositionInput, beta1: f64, beta2: f64) -> IdentityCheckReport {
    let c = &input.c;
    let first_left = beta1 * c.i_x + beta2 * c.i_xy;
    let second_left = beta1 * c.i_yx + beta2 * c.i_y;
    let report = IdentityCheckReport {
        x_moment: (first_left, input.first_rhs()),
        y_moment: (second_left, input.second_rhs()),
        y_moment_no_error: (second_left, 1.0 - input.r * input.b),
        max_abs_gap: 0.0,
    };
    let mut max_abs_gap = report.x_moment_gap().max(report.y_moment_gap());
    if input.sigma_u_sq == 0.0 {
        max_abs_gap = max_abs_gap.max(report.y_moment_no_error_gap());
    }
    IdentityCheckReport { max_abs_gap, ..report }
}

/// Identity check for a decomposition result. Canonical solutions are
/// `β₁ = −k·I_xy`, `β₂ = k·I_x` with `k = (1 − R²)/Q`; their left-hand sides are
/// evaluated in that factored form, which makes the first identity vanish
/// exactly instead of up to rounding.
#[allow(clippy::eq_op)]
pub fn identity_check_result(input: &DecompositionInput, result: &DecompositionResult) -> IdentityCheckReport {
    if result.mode != DecompositionMode::Canonical {
        return identity_check(input, result.beta1, result.beta2);
    }
    let c = &input.c;
    let k = (1.0 - input.r * input.r) / result.det_q;
    let first_left = k * (c.i_x * c.i_xy - c.i_xy * c.i_x);
    let second_left = k * (c.i_x * c.i_y - c.i_xy * c.i_yx);
    let report = IdentityCheckReport {
        x_moment: (first_left, input.first_rhs()),
        y_moment: (second_left, input.second_rhs()),
        y_moment_no_error: (second_left, 1.0 - input.r * input.b),
        max_abs_gap: 0.0,
    };
    let max_abs_gap = report
        .x_moment_gap()
        .max(report.y_moment_gap())
        .max(report.y_moment_no_error_gap());
    IdentityCheckReport { max_abs_gap, ..report }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearityCheck {
    pub q: f64,
    pub exact_singular: bool,
    /// `|corr(nWx, nWy)|` above the practical threshold (NaN counts as collinear).
    pub practical_warning: bool,
}

/// `Q = I_x·I_y − I_xy²` together with the practical collinearity flag.
pub fn collinearity_q(c: &SpatialCorrelationMatrix, corr_lag_auto: f64, threshold: f64) -> CollinearityCheck {
    let q = c.i_x * c.i_y - c.i_xy * c.i_yx;
    CollinearityCheck {
        q,
        exact_singular: is_singular(q, c),
        practical_warning: !(corr_lag_auto.abs() <= threshold),
    }
}

/// Coefficient of the pure autoregressive model, `β₂ = 1 / I_y` (theoretical).
pub fn pure_sar_coefficient(c: &SpatialCorrelationMatrix) -> Result<f64> {
    if c.i_y == 0.0 {
        return Err(Error::ZeroDenominator("I_y"));
    }
    Ok(1.0 / c.i_y)
}

/// Coefficient of the pure lag-regressive model, `β₁ = R / I_x` (theoretical).
pub fn pure_slx_coefficient(r: f64, c: &SpatialCorrelationMatrix) -> Result<f64> {
    if c.i_x == 0.0 {
        return Err(Error::ZeroDenominator("I_x"));
    }
    Ok(r / c.i_x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureCoefficients {
    pub beta2_pure_sar: Result<f64>,
    pub beta1_pure_slx: Result<f64>,
}

pub fn pure_coefficients(r: f64, c: &SpatialCorrelationMatrix) -> PureCoefficients {
    PureCoefficients {
        beta2_pure_sar: pure_sar_coefficient(c),
        beta1_pure_slx: pure_slx_coefficient(r, c),
    }
}
