//! End-to-end analysis: standardize, weight, correlate, fit, decompose, check, advise.

use spatreg_core::advisor::{narrative_report, select_model, CorrelationEvidence, FitQuality};
use spatreg_core::correlation::{pearson_r, residual_moran, significance_by_regression, spatial_correlation_matrix};
use spatreg_core::data::zscore;
use spatreg_core::decomposition::{
    collinearity_q, constant_term, cramer_system, decompose_canonical, decompose_full, identity_check,
    identity_check_result, pure_coefficients, IdentityCheckReport,
};
use spatreg_core::regression::{design_from_lags, ols_fit, response_residual_moment, LagColumns};
use spatreg_core::weights::spatial_weights;
use spatreg_core::{
    CorrelationTest, DecompositionInput, DistanceMatrix, ModelSpec, ModelVariant, RawAttributeTable, RegressionFit,
    SpatialCorrelationMatrix, SpatialWeightMatrix, StandardizedVector, Term,
};

use crate::config::{AnalysisConfig, AnalysisOptions};
use crate::error::{CliError, Result};
use crate::io::{parse_attributes, parse_distances};
use crate::permutation::permutation_test;
use crate::report::*;

/// A finished analysis: the report plus the intermediate objects the CLI needs.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ids: Vec<String>,
    pub x: StandardizedVector,
    pub y: StandardizedVector,
    pub weights: SpatialWeightMatrix,
    pub fits: Vec<(ModelVariant, std::result::Result<RegressionFit, spatreg_core::Error>)>,
    pub report: AnalysisReport,
}

impl Analysis {
    pub fn fit(&self, variant: ModelVariant) -> Option<&std::result::Result<RegressionFit, spatreg_core::Error>> {
        self.fits.iter().find(|(v, _)| *v == variant).map(|(_, f)| f)
    }
}

/// Reads the configured files and runs [`analyze`].
pub fn run_pipeline(config: &AnalysisConfig) -> Result<Analysis> {
    config.options.validate()?;
    let table = parse_attributes(&config.attrs_path)?;
    let distances = parse_distances(&config.dist_path, config.dist_format, table.ids())?;
    analyze(&table, &distances, &config.options)
}

/// Models fitted for a given filter, `ols_simple` always first.
pub fn fitted_variants(filter: Option<ModelVariant>) -> Vec<ModelVariant> {
    match filter {
        None => vec![
            ModelVariant::OlsSimple,
            ModelVariant::General,
            ModelVariant::Sar,
            ModelVariant::Slx,
        ],
        Some(ModelVariant::OlsSimple) => vec![ModelVariant::OlsSimple],
        Some(v) => vec![ModelVariant::OlsSimple, v],
    }
}

fn pairs(r: &IdentityCheckReport) -> IdentityPairs {
    IdentityPairs {
        x_moment: Some([r.x_moment.0, r.x_moment.1]),
        y_moment: Some([r.y_moment.0, r.y_moment.1]),
        y_moment_no_error: Some([r.y_moment_no_error.0, r.y_moment_no_error.1]),
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

struct Theory {
    r: f64,
    beta1: Option<f64>,
    beta2: Option<f64>,
    mean_nwx: f64,
    mean_nwy: f64,
    pure_sar: Option<f64>,
    pure_slx: Option<f64>,
}

impl Theory {
    fn value(&self, variant: ModelVariant, term: Term) -> Option<f64> {
        use ModelVariant::*;
        match (variant, term) {
            (OlsSimple, Term::Intercept) => Some(0.0),
            (_, Term::X) => Some(self.r),
            (General, Term::Intercept) => Some(constant_term(self.beta1?, self.beta2?, self.mean_nwx, self.mean_nwy)),
            (Sar, Term::Intercept) => Some(constant_term(0.0, self.beta2?, self.mean_nwx, self.mean_nwy)),
            (Slx, Term::Intercept) => Some(constant_term(self.beta1?, 0.0, self.mean_nwx, self.mean_nwy)),
            (PureSar, Term::AutoY) => self.pure_sar,
            (PureSlx, Term::LagX) => self.pure_slx,
            (PureSar | PureSlx, _) => None,
            (_, Term::LagX) => self.beta1,
            (_, Term::AutoY) => self.beta2,
        }
    }
}

fn fit_report<W: AsRef<spatreg_core::Matrix>>(
    variant: ModelVariant,
    fit: &std::result::Result<RegressionFit, spatreg_core::Error>,
    theory: &Theory,
    w: &W,
) -> FitReport {
    let spec = ModelSpec::new(variant);
    let fit = match fit {
        Ok(f) => f,
        Err(e) => return FitReport::failed(variant.as_str(), spec.include_intercept, e.to_string()),
    };
    let d = &fit.diagnostics;
    FitReport {
        model: variant.as_str(),
        include_intercept: spec.include_intercept,
        status: "ok",
        error: None,
        parameters: fit
            .coefficients
            .iter()
            .map(|c| ParameterRow {
                parameter: c.term.parameter(),
                value: c.value,
                std_error: c.std_error,
                t_value: c.t_value,
                p_value: c.p_value,
                theoretical: theory.value(variant, c.term),
            })
            .collect(),
        r2: Some(d.r_squared),
        s: Some(d.reg_std_error),
        f: finite(d.f_statistic),
        f_p_value: finite(d.f_p_value),
        dw: finite(d.durbin_watson),
        dw_ordering: DW_ORDERING,
        sigma_u_sq: Some(fit.sigma_u_sq),
        response_residual_moment: Some(response_residual_moment(fit)),
        residual_moran: residual_moran(&fit.residuals, w).ok(),
        condition_ratio: Some(fit.condition_ratio),
    }
}

fn correlation_row(name: &'static str, t: &CorrelationTest, perm: Option<&CorrelationTest>) -> CorrelationRow {
    CorrelationRow {
        parameter: name,
        index: Some(t.statistic),
        p_value: Some(t.p_value),
        t_value: finite(t.t_value),
        permutation_p_value: perm.map(|p| p.p_value),
    }
}

fn decomposition_block(
    input: &DecompositionInput,
    result: std::result::Result<spatreg_core::DecompositionResult, spatreg_core::Error>,
    mode: &'static str,
    lags: &LagColumns,
) -> DecompositionBlock {
    match result {
        Ok(res) => DecompositionBlock {
            mode: res.mode.as_str(),
            beta1: Some(res.beta1),
            beta2: Some(res.beta2),
            a: Some(constant_term(res.beta1, res.beta2, lags.mean_n_wx(), lags.mean_n_wy())),
            o: res.det_o,
            p: res.det_p,
            q: res.det_q,
            identity_checks: {
                let mut checks = pairs(&identity_check_result(input, &res));
                if mode == "full" {
                    checks.y_moment_no_error = None;
                }
                checks
            },
            error: None,
        },
        Err(e) => {
            let d = cramer_system(input);
            DecompositionBlock {
                mode,
                beta1: None,
                beta2: None,
                a: None,
                o: d.o,
                p: d.p,
                q: d.q,
                identity_checks: IdentityPairs::default(),
                error: Some(e.to_string()),
            }
        }
    }
}

fn fit_quality(
    fit: Option<&std::result::Result<RegressionFit, spatreg_core::Error>>,
    term: Term,
) -> Option<FitQuality> {
    let fit = fit?.as_ref().ok()?;
    Some(FitQuality {
        reg_std_error: fit.diagnostics.reg_std_error,
        spatial_p_value: fit.coefficient(term)?.p_value,
    })
}

/// Runs the analysis on in-memory inputs.
pub fn analyze(table: &RawAttributeTable, distances: &DistanceMatrix, options: &AnalysisOptions) -> Result<Analysis> {
    options.validate()?;
    if distances.len() != table.len() {
        return Err(CliError::Schema(format!(
            "distance matrix covers {} units, attribute table {}",
            distances.len(),
            table.len()
        )));
    }
    let table = if options.log_transform {
        table.log_transformed().map_err(CliError::core("log transform"))?
    } else {
        table.clone()
    };
    let (x, y) = table.standardize().map_err(CliError::core("standardization"))?;
    let w = spatial_weights(distances).map_err(CliError::core("spatial weights"))?;
    let n = x.len();

    // correlation statistics and their significance
    let c: SpatialCorrelationMatrix = spatial_correlation_matrix(&x, &y, &w).map_err(CliError::core("correlation"))?;
    let r = pearson_r(&x, &y).map_err(CliError::core("correlation"))?;
    let sig = |a: &StandardizedVector, b: &StandardizedVector| {
        significance_by_regression(a, b, &w).map_err(CliError::core("significance test"))
    };
    let (test_ix, test_ixy, test_iyx, test_iy) = (sig(&x, &x)?, sig(&x, &y)?, sig(&y, &x)?, sig(&y, &y)?);
    let perm_tests = match options.permutations {
        Some(p) => {
            let run = |a: &StandardizedVector, b: &StandardizedVector| {
                permutation_test(a, b, w.matrix(), p, options.seed, options.threads)
            };
            Some([run(&x, &x)?, run(&x, &y)?, run(&y, &x)?, run(&y, &y)?])
        }
        None => None,
    };

    // fits
    let lags = LagColumns::new(&x, &y, &w).map_err(CliError::core("spatial lags"))?;
    let fits: Vec<_> = fitted_variants(options.model)
        .into_iter()
        .map(|v| {
            let fit = design_from_lags(ModelSpec::new(v), &x, &lags).and_then(|d| ols_fit(&d, y.as_slice()));
            (v, fit)
        })
        .collect();
    let find = |v: ModelVariant| fits.iter().find(|(fv, _)| *fv == v).map(|(_, f)| f);
    let general = find(ModelVariant::General).and_then(|f| f.as_ref().ok());

    // theoretical decomposition (b = R, δ = 0)
    let canonical_input = DecompositionInput::canonical(r, c).map_err(CliError::core("decomposition"))?;
    let canonical = decompose_canonical(r, c);
    let pure = pure_coefficients(r, &c);
    let theory = Theory {
        r,
        beta1: canonical.as_ref().ok().map(|d| d.beta1),
        beta2: canonical.as_ref().ok().map(|d| d.beta2),
        mean_nwx: lags.mean_n_wx(),
        mean_nwy: lags.mean_n_wy(),
        pure_sar: pure.beta2_pure_sar.as_ref().ok().copied(),
        pure_slx: pure.beta1_pure_slx.as_ref().ok().copied(),
    };
    let theoretical_checks = canonical.as_ref().ok().map(|res| {
        let full = identity_check_result(&canonical_input, res);
        IdentityPairs {
            x_moment: Some([full.x_moment.0, full.x_moment.1]),
            y_moment: None,
            y_moment_no_error: Some([full.y_moment_no_error.0, full.y_moment_no_error.1]),
        }
    });
    let decomposition = decomposition_block(&canonical_input, canonical, "canonical", &lags);

    // empirical decomposition from the fitted general model
    let mut empirical_checks = None;
    let decomposition_empirical = match general {
        Some(fit) => {
            let b = fit.value(Term::X).expect("general model has x");
            let input = DecompositionInput::new(r, b, fit.sigma_u_sq, c).map_err(CliError::core("decomposition"))?;
            let fitted = identity_check(
                &input,
                fit.value(Term::LagX).expect("general model has nWx"),
                fit.value(Term::AutoY).expect("general model has nWy"),
            );
            empirical_checks = Some(IdentityPairs {
                x_moment: Some([fitted.x_moment.0, fitted.x_moment.1]),
                y_moment: Some([fitted.y_moment.0, fitted.y_moment.1]),
                y_moment_no_error: None,
            });
            Some(decomposition_block(&input, decompose_full(&input), "full", &lags))
        }
        None => None,
    };

    // collinearity and advice
    let corr_lag_auto = match (zscore(&lags.n_wx), zscore(&lags.n_wy)) {
        (Ok(a), Ok(b)) => pearson_r(&a, &b).unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    let collinearity = collinearity_q(&c, corr_lag_auto, options.collinearity_threshold);
    let evidence = CorrelationEvidence {
        test_ix,
        test_iy,
        test_ixy,
        test_iyx,
        q: collinearity.q,
        corr_lag_auto,
        alpha: options.alpha,
        collinearity_threshold: options.collinearity_threshold,
        sar_fit: fit_quality(find(ModelVariant::Sar), Term::AutoY),
        slx_fit: fit_quality(find(ModelVariant::Slx), Term::LagX),
    };
    let decision = select_model(&evidence);
    let narrative = narrative_report(&decision, &evidence);

    let fit_reports: Vec<FitReport> = fits.iter().map(|(v, f)| fit_report(*v, f, &theory, &w)).collect();
    let diagnostics = find(decision.recommended)
        .and_then(|f| f.as_ref().ok())
        .map(|fit| DiagnosticsReport {
            model: decision.recommended.as_str(),
            r2: fit.diagnostics.r_squared,
            s: fit.diagnostics.reg_std_error,
            f: fit.diagnostics.f_statistic,
            dw: fit.diagnostics.durbin_watson,
            dw_ordering: DW_ORDERING,
            local: fit
                .coefficients
                .iter()
                .map(|c| LocalTest {
                    parameter: c.term.parameter(),
                    p_value: c.p_value,
                })
                .collect(),
        });

    let perm = |k: usize| perm_tests.as_ref().map(|p| &p[k]);
    let (sigma2, sigma2_model) = match general {
        Some(f) => (Some(f.sigma_u_sq), Some(ModelVariant::General.as_str())),
        None => fits
            .iter()
            .rev()
            .find_map(|(v, f)| f.as_ref().ok().map(|f| (Some(f.sigma_u_sq), Some(v.as_str()))))
            .unwrap_or((None, None)),
    };
    let correlation_table = CorrelationTable {
        method: "regression_t",
        permutations: options.permutations,
        rows: vec![
            correlation_row("I_x", &evidence.test_ix, perm(0)),
            correlation_row("I_xy", &evidence.test_ixy, perm(1)),
            correlation_row("I_yx", &evidence.test_iyx, perm(2)),
            correlation_row("I_y", &evidence.test_iy, perm(3)),
            CorrelationRow {
                parameter: "R",
                index: Some(r),
                p_value: None,
                t_value: None,
                permutation_p_value: None,
            },
            CorrelationRow {
                parameter: "sigma2",
                index: sigma2,
                p_value: None,
                t_value: None,
                permutation_p_value: None,
            },
        ],
        residual_variance_model: sigma2_model,
    };

    let report = AnalysisReport {
        n,
        log_transform: options.log_transform,
        seed: options.seed,
        correlation_table,
        fits: fit_reports,
        identity_checks: IdentityChecks {
            theoretical: theoretical_checks,
            empirical: empirical_checks,
        },
        diagnostics,
        decomposition,
        decomposition_empirical,
        collinearity: CollinearityBlock {
            q: collinearity.q,
            exact_singular: collinearity.exact_singular,
            practical_warning: collinearity.practical_warning,
            corr_lag_auto: finite(corr_lag_auto),
            threshold: options.collinearity_threshold,
        },
        pure_coefficients: PureCoefficientsBlock {
            beta2_pure_sar: theory.pure_sar,
            beta1_pure_slx: theory.pure_slx,
        },
        lag_means: LagMeans {
            mean_nwx: lags.mean_n_wx(),
            mean_nwy: lags.mean_n_wy(),
        },
        advice: AdviceBlock {
            recommended: decision.recommended.as_str(),
            rule_fired: decision.rule_fired.as_str(),
            collinearity_flag: decision.collinearity_flag,
            alpha: options.alpha,
            rationale: decision.rationale.clone(),
            narrative,
        },
    };

    Ok(Analysis {
        ids: table.ids().to_vec(),
        x,
        y,
        weights: w,
        fits,
        report,
    })
}
