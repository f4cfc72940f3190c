//! Report model, canonical JSON serialization and plain-text tables.
//!
//! JSON numbers are rounded to 15 significant digits before serialization, so
//! a report re-parsed and re-serialized is byte-identical. Text tables show 4
//! decimals.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub log_transform: bool,
    pub seed: u64,
    pub correlation_table: CorrelationTable,
    pub fits: Vec<FitReport>,
    pub identity_checks: IdentityChecks,
    pub diagnostics: Option<DiagnosticsReport>,
    pub decomposition: DecompositionBlock,
    pub decomposition_empirical: Option<DecompositionBlock>,
    pub collinearity: CollinearityBlock,
    pub pure_coefficients: PureCoefficientsBlock,
    pub lag_means: LagMeans,
    pub advice: AdviceBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTable {
    pub method: &'static str,
    pub permutations: Option<usize>,
    pub rows: Vec<CorrelationRow>,
    /// Model whose residual variance fills the `sigma2` row.
    pub residual_variance_model: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    pub parameter: &'static str,
    pub index: Option<f64>,
    pub p_value: Option<f64>,
    pub t_value: Option<f64>,
    pub permutation_p_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParameterRow {
    pub parameter: &'static str,
    pub value: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
    /// Value implied by the correlation statistics alone (`b = R`, `δ = 0`).
    pub theoretical: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: &'static str,
    pub include_intercept: bool,
    pub status: &'static str,
    pub error: Option<String>,
    pub parameters: Vec<ParameterRow>,
    pub r2: Option<f64>,
    pub s: Option<f64>,
    pub f: Option<f64>,
    pub f_p_value: Option<f64>,
    pub dw: Option<f64>,
    pub dw_ordering: &'static str,
    pub sigma_u_sq: Option<f64>,
    /// `(1/n) yᵀu`, which must match `sigma_u_sq`.
    pub response_residual_moment: Option<f64>,
    pub residual_moran: Option<f64>,
    pub condition_ratio: Option<f64>,
}

pub const DW_ORDERING: &str = "input row order (heuristic)";

impl FitReport {
    pub fn failed(model: &'static str, include_intercept: bool, error: String) -> Self {
        FitReport {
            model,
            include_intercept,
            status: "failed",
            error: Some(error),
            parameters: Vec::new(),
            r2: None,
            s: None,
            f: None,
            f_p_value: None,
            dw: None,
            dw_ordering: DW_ORDERING,
            sigma_u_sq: None,
            response_residual_moment: None,
            residual_moran: None,
            condition_ratio: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn parameter(&self, name: &str) -> Option<&ParameterRow> {
        self.parameters.iter().find(|p| p.parameter == name)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct IdentityPairs {
    pub x_moment: Option<[f64; 2]>,
    pub y_moment: Option<[f64; 2]>,
    pub y_moment_no_error: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityChecks {
    /// Canonical coefficients: first identity and the error-free second identity.
    pub theoretical: Option<IdentityPairs>,
    /// Fitted general model: first identity and the second identity with `δ`.
    pub empirical: Option<IdentityPairs>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionBlock {
    pub mode: &'static str,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub a: Option<f64>,
    #[serde(rename = "O")]
    pub o: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub identity_checks: IdentityPairs,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollinearityBlock {
    pub q: f64,
    pub exact_singular: bool,
    pub practical_warning: bool,
    pub corr_lag_auto: Option<f64>,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PureCoefficientsBlock {
    pub beta2_pure_sar: Option<f64>,
    pub beta1_pure_slx: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagMeans {
    pub mean_nwx: f64,
    pub mean_nwy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalTest {
    pub parameter: &'static str,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub model: &'static str,
    pub r2: f64,
    pub s: f64,
    pub f: f64,
    pub dw: f64,
    pub dw_ordering: &'static str,
    pub local: Vec<LocalTest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdviceBlock {
    pub recommended: &'static str,
    pub rule_fired: &'static str,
    pub collinearity_flag: bool,
    pub alpha: f64,
    pub rationale: String,
    #[serde(skip)]
    pub narrative: String,
}

/// Rounds to 15 significant digits; non-finite values pass through.
pub fn canonical(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.14e}").parse().expect("formatted float parses")
}

fn canonicalize(value: &mut Value) {
    match value {
        Value::Number(num) => {
            if num.is_f64() {
                let v = canonical(num.as_f64().expect("f64 number"));
                *value = serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Serializes any report block as canonical pretty JSON (with trailing newline).
pub fn to_canonical_json<T: Serialize>(block: &T) -> String {
    let mut value = serde_json::to_value(block).expect("report blocks serialize");
    canonicalize(&mut value);
    let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
    s.push('\n');
    s
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.4}"),
        Some(x) => format!("{x}"),
        None => "-".to_string(),
    }
}

pub fn render_correlation_table(t: &CorrelationTable, out: &mut String) {
    let _ = writeln!(
        out,
        "Spatial correlation indexes, Pearson correlation and residual variance"
    );
    let perm = t.permutations.is_some();
    let _ = write!(out, "{:<10}{:>12}{:>12}", "Parameter", "Index", "P-value");
    if perm {
        let _ = write!(out, "{:>14}", "Perm. P");
    }
    out.push('\n');
    for row in &t.rows {
        let _ = write!(
            out,
            "{:<10}{:>12}{:>12}",
            row.parameter,
            cell(row.index),
            cell(row.p_value)
        );
        if perm {
            let _ = write!(out, "{:>14}", cell(row.permutation_p_value));
        }
        out.push('\n');
    }
    if let Some(m) = t.residual_variance_model {
        let _ = writeln!(out, "(sigma2 from the {m} model)");
    }
}

pub fn render_fits(fits: &[FitReport], out: &mut String) {
    let _ = writeln!(out, "Model parameter estimates");
    for fit in fits {
        let _ = writeln!(out, "[{}]", fit.model);
        if let Some(err) = &fit.error {
            let _ = writeln!(out, "  fit failed: {err}");
            continue;
        }
        let _ = writeln!(
            out,
            "  {:<8}{:>12}{:>12}{:>12}",
            "Param", "Theoretical", "Empirical", "P-value"
        );
        for p in &fit.parameters {
            let _ = writeln!(
                out,
                "  {:<8}{:>12}{:>12}{:>12}",
                p.parameter,
                cell(p.theoretical),
                cell(Some(p.value)),
                cell(Some(p.p_value))
            );
        }
        let _ = writeln!(
            out,
            "  R2 = {}  s = {}  F = {}  DW = {} [{}]  sigma_u^2 = {}  I_e = {}",
            cell(fit.r2),
            cell(fit.s),
            cell(fit.f),
            cell(fit.dw),
            fit.dw_ordering,
            cell(fit.sigma_u_sq),
            cell(fit.residual_moran)
        );
    }
}

fn pair(p: Option<[f64; 2]>) -> (String, String) {
    match p {
        Some([l, r]) => (cell(Some(l)), cell(Some(r))),
        None => ("-".into(), "-".into()),
    }
}

pub fn render_identity_checks(c: &IdentityChecks, out: &mut String) {
    let _ = writeln!(out, "Checking calculations");
    let _ = writeln!(out, "{:<13}{:<19}{:>12}{:>12}", "Type", "Identity", "Left", "Right");
    let rows = [
        ("Theoretical", "x_moment", c.theoretical.and_then(|t| t.x_moment)),
        (
            "Theoretical",
            "y_moment_no_error",
            c.theoretical.and_then(|t| t.y_moment_no_error),
        ),
        ("Empirical", "x_moment", c.empirical.and_then(|t| t.x_moment)),
        ("Empirical", "y_moment", c.empirical.and_then(|t| t.y_moment)),
    ];
    for (kind, eq, p) in rows {
        let (l, r) = pair(p);
        let _ = writeln!(out, "{kind:<13}{eq:<19}{l:>12}{r:>12}");
    }
}

pub fn render_decomposition(label: &str, d: &DecompositionBlock, out: &mut String) {
    let _ = writeln!(out, "Coefficient decomposition ({label}, mode {})", d.mode);
    if let Some(err) = &d.error {
        let _ = writeln!(out, "  undefined: {err}");
    }
    let _ = writeln!(
        out,
        "  beta1 = {}  beta2 = {}  a = {}",
        cell(d.beta1),
        cell(d.beta2),
        cell(d.a)
    );
    let _ = writeln!(out, "  O = {:.6}  P = {:.6}  Q = {:.6}", d.o, d.p, d.q);
    for (name, p) in [
        ("x_moment", d.identity_checks.x_moment),
        ("y_moment", d.identity_checks.y_moment),
        ("y_moment_no_error", d.identity_checks.y_moment_no_error),
    ] {
        let (l, r) = pair(p);
        let _ = writeln!(out, "  {name}: {l} = {r}");
    }
}

pub fn render_diagnostics(d: &DiagnosticsReport, out: &mut String) {
    let _ = writeln!(out, "Basic statistics for the {} model", d.model);
    let _ = writeln!(
        out,
        "  Global test  R2 = {:.4}  s = {:.4}  F = {:.4}  DW = {:.4} [{}]",
        d.r2, d.s, d.f, d.dw, d.dw_ordering
    );
    for t in &d.local {
        let _ = writeln!(out, "  Local test   {:<6} P = {:.4}", t.parameter, t.p_value);
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}  log transform = {}  seed = {}\n",
        r.n, r.log_transform, r.seed
    );
    render_correlation_table(&r.correlation_table, &mut out);
    out.push('\n');
    render_fits(&r.fits, &mut out);
    out.push('\n');
    render_identity_checks(&r.identity_checks, &mut out);
    out.push('\n');
    render_decomposition("theoretical", &r.decomposition, &mut out);
    if let Some(d) = &r.decomposition_empirical {
        render_decomposition("empirical", d, &mut out);
    }
    let _ = writeln!(
        out,
        "  mean(nWx) = {:.4}  mean(nWy) = {:.4}",
        r.lag_means.mean_nwx, r.lag_means.mean_nwy
    );
    let _ = writeln!(
        out,
        "  pure SAR beta2 = 1/I_y = {}  pure SLX beta1 = R/I_x = {}",
        cell(r.pure_coefficients.beta2_pure_sar),
        cell(r.pure_coefficients.beta1_pure_slx)
    );
    out.push('\n');
    if let Some(d) = &r.diagnostics {
        render_diagnostics(d, &mut out);
        out.push('\n');
    }
    out.push_str(&r.advice.narrative);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rounding_is_stable() {
        for v in [0.1, 1.0 / 3.0, -2.938_812_345_678_912, 1e-300, 6.02e23, 0.0, -0.0] {
            let c = canonical(v);
            assert_eq!(canonical(c), c);
            let s = serde_json::to_string(&c).unwrap();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), c.to_bits());
            let digits = s.trim_start_matches('-').replace(['.', '-'], "");
            let mantissa = digits.split(['e', 'E']).next().unwrap().trim_start_matches('0');
            assert!(mantissa.len() <= 15, "{s}");
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        let json = to_canonical_json(&serde_json::json!({"a": 1.5}));
        assert!(json.contains("1.5"));
        let block = PureCoefficientsBlock {
            beta2_pure_sar: Some(f64::NAN),
            beta1_pure_slx: None,
        };
        let json = to_canonical_json(&block);
        assert!(json.contains("\"beta2_pure_sar\": null"));
    }
}
