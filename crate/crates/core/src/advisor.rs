//! Model selection from correlation evidence.
//!
//! "≠ 0" for an index is read as "significant at level α" (`p ≤ α`), "= 0" as
//! its complement. Rules are tried in order:
//!
//! 1. general: `I_x ≠ 0`, `I_xy ≠ 0`, `Q ≠ 0`
//! 2. special SAR: `I_x ≠ 0`, `I_y ≠ 0`, `I_xy = 0`
//! 3. special SLX: `I_x = 0`, `I_xy ≠ 0`
//!
//! When none applies, SAR and SLX are compared on their fitted diagnostics.
//! Collinearity between `nWx` and `nWy` never lets the general model through.

use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use crate::correlation::{CorrelationTest, SpatialCorrelationMatrix};
use crate::decomposition::is_singular;
use crate::regression::ModelVariant;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_COLLINEARITY_THRESHOLD: f64 = 0.95;

/// What a fitted SAR or SLX model offers for the fallback comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitQuality {
    pub reg_std_error: f64,
    /// p-value of the spatial coefficient (β₂ for SAR, β₁ for SLX).
    pub spatial_p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEvidence {
    pub test_ix: CorrelationTest,
    pub test_iy: CorrelationTest,
    /// `nWy` on `x`.
    pub test_ixy: CorrelationTest,
    /// `nWx` on `y`.
    pub test_iyx: CorrelationTest,
    pub q: f64,
    /// Pearson correlation of `nWx` and `nWy`.
    pub corr_lag_auto: f64,
    pub alpha: f64,
    pub collinearity_threshold: f64,
    pub sar_fit: Option<FitQuality>,
    pub slx_fit: Option<FitQuality>,
}

impl CorrelationEvidence {
    fn correlation_matrix(&self) -> SpatialCorrelationMatrix {
        SpatialCorrelationMatrix {
            i_x: self.test_ix.statistic,
            i_xy: self.test_ixy.statistic,
            i_yx: self.test_iyx.statistic,
            i_y: self.test_iy.statistic,
        }
    }

    fn significant(&self, t: &CorrelationTest) -> bool {
        t.p_value <= self.alpha
    }

    /// The cross-correlation counts as nonzero only if both directional tests agree.
    fn cross_significant(&self) -> bool {
        self.significant(&self.test_ixy) && self.significant(&self.test_iyx)
    }

    pub fn q_exact_singular(&self) -> bool {
        is_singular(self.q, &self.correlation_matrix())
    }

    pub fn collinear(&self) -> bool {
        !(self.corr_lag_auto.abs() <= self.collinearity_threshold) || self.q_exact_singular()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    General,
    SpecialSar,
    SpecialSlx,
    FallbackComprehensive,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::General => "general",
            Rule::SpecialSar => "special_sar",
            Rule::SpecialSlx => "special_slx",
            Rule::FallbackComprehensive => "fallback_comprehensive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvisorDecision {
    pub recommended: ModelVariant,
    pub rule_fired: Rule,
    pub rationale: String,
    pub collinearity_flag: bool,
}

/// Picks SAR or SLX: lower regression standard error, then lower p-value of
/// the spatial coefficient. Without diagnostics SAR is kept (the lag term is
/// the one conventionally dropped).
fn better_of_sar_slx(evidence: &CorrelationEvidence) -> (ModelVariant, String) {
    match (evidence.sar_fit, evidence.slx_fit) {
        (Some(sar), Some(slx)) => {
            let scale = sar.reg_std_error.abs().max(slx.reg_std_error.abs());
            let gap = sar.reg_std_error - slx.reg_std_error;
            if gap.abs() > 1e-12 * scale {
                let pick = if gap < 0.0 {
                    ModelVariant::Sar
                } else {
                    ModelVariant::Slx
                };
                (
                    pick,
                    format!("s(sar) = {:.4}, s(slx) = {:.4}", sar.reg_std_error, slx.reg_std_error),
                )
            } else {
                let pick = if slx.spatial_p_value < sar.spatial_p_value {
                    ModelVariant::Slx
                } else {
                    ModelVariant::Sar
                };
                (
                    pick,
                    format!(
                        "equal s; p(beta2 in sar) = {:.4}, p(beta1 in slx) = {:.4}",
                        sar.spatial_p_value, slx.spatial_p_value
                    ),
                )
            }
        }
        (Some(_), None) => (ModelVariant::Sar, String::from("only the sar fit is available")),
        (None, Some(_)) => (ModelVariant::Slx, String::from("only the slx fit is available")),
        (None, None) => (
            ModelVariant::Sar,
            String::from("no fit diagnostics; keeping the autoregressive term"),
        ),
    }
}

pub fn select_model(evidence: &CorrelationEvidence) -> AdvisorDecision {
    let ix = evidence.significant(&evidence.test_ix);
    let iy = evidence.significant(&evidence.test_iy);
    let ixy = evidence.cross_significant();
    let collinearity_flag = evidence.collinear();

    let (rule_fired, mut recommended, mut rationale) = if ix && ixy && !evidence.q_exact_singular() {
        (
            Rule::General,
            ModelVariant::General,
            String::from("I_x and I_xy significant, Q nonzero"),
        )
    } else if ix && iy && !ixy {
        (
            Rule::SpecialSar,
            ModelVariant::Sar,
            String::from("I_x and I_y significant, I_xy not significant"),
        )
    } else if !ix && ixy {
        (
            Rule::SpecialSlx,
            ModelVariant::Slx,
            String::from("I_x not significant, I_xy significant"),
        )
    } else {
        let (pick, why) = better_of_sar_slx(evidence);
        (
            Rule::FallbackComprehensive,
            pick,
            format!("no condition row matched; {why}"),
        )
    };

    if collinearity_flag && recommended == ModelVariant::General {
        let (pick, why) = better_of_sar_slx(evidence);
        recommended = pick;
        rationale = format!("{rationale}; nWx and nWy collinear, one term discarded ({why})");
    }

    AdvisorDecision {
        recommended,
        rule_fired,
        rationale,
        collinearity_flag,
    }
}

/// Deterministic, human-readable account of a decision.
pub fn narrative_report(decision: &AdvisorDecision, evidence: &CorrelationEvidence) -> String {
    let mut out = String::new();
    let verdict = |t: &CorrelationTest| {
        if t.p_value <= evidence.alpha {
            "significant"
        } else {
            "not significant"
        }
    };
    let _ = writeln!(
        out,
        "Recommended model: {} (rule {})",
        decision.recommended,
        decision.rule_fired.as_str()
    );
    let _ = writeln!(out, "Significance level alpha = {:.4}", evidence.alpha);
    for (name, t) in [
        ("I_x", &evidence.test_ix),
        ("I_xy", &evidence.test_ixy),
        ("I_yx", &evidence.test_iyx),
        ("I_y", &evidence.test_iy),
    ] {
        let _ = writeln!(
            out,
            "  {name:<5} index = {:>8.4}  p = {:.4}  ({})",
            t.statistic,
            t.p_value,
            verdict(t)
        );
    }
    let _ = writeln!(out, "Q = I_x*I_y - I_xy^2 = {:.6}", evidence.q);
    let _ = writeln!(
        out,
        "corr(nWx, nWy) = {:.4} (threshold {:.2})",
        evidence.corr_lag_auto, evidence.collinearity_threshold
    );
    if decision.collinearity_flag {
        let _ = writeln!(
            out,
            "WARNING: collinearity between the lag-regressive and autoregressive terms; \
             they should not enter the same model."
        );
    }
    let _ = writeln!(out, "Rationale: {}", decision.rationale);
    out
}
