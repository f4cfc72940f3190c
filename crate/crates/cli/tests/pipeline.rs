use std::path::PathBuf;

use spatreg_cli::report::to_canonical_json;
use spatreg_cli::{run_pipeline, AnalysisConfig, CliError, DistFormat};
use spatreg_core::ModelVariant;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn cities() -> AnalysisConfig {
    let mut c = AnalysisConfig::new(fixture("cities_attrs.csv"), fixture("cities_dist.csv"));
    c.options.log_transform = true;
    c
}

fn report_json(config: &AnalysisConfig) -> String {
    to_canonical_json(&run_pipeline(config).unwrap().report)
}

fn row(report: &spatreg_cli::AnalysisReport, name: &str) -> f64 {
    report
        .correlation_table
        .rows
        .iter()
        .find(|r| r.parameter == name)
        .unwrap()
        .index
        .unwrap()
}

#[test]
fn four_city_correlation_matrix_matches_hand_values() {
    let config = AnalysisConfig::new(fixture("four_attrs.csv"), fixture("four_dist.csv"));
    let analysis = run_pipeline(&config).unwrap();
    let r = &analysis.report;
    // x = 1..4, y = 2,1,4,3 on a line at 0,1,3,6
    for (name, want) in [
        ("I_x", 3.0 / 95.0),
        ("I_xy", 3.0 / 19.0),
        ("I_yx", 3.0 / 19.0),
        ("I_y", -17.0 / 95.0),
        ("R", 0.6),
    ] {
        assert!(
            (row(r, name) - want).abs() < 1e-12,
            "{name}: {} vs {want}",
            row(r, name)
        );
    }
    let w = analysis.weights.matrix();
    assert!((w.get(0, 1) - 15.0 / 76.0).abs() < 1e-15);
    assert!((w.get(2, 3) - 5.0 / 76.0).abs() < 1e-15);
}

#[test]
fn four_city_general_fit_is_reported_as_failed() {
    let config = AnalysisConfig::new(fixture("four_attrs.csv"), fixture("four_dist.csv"));
    let r = run_pipeline(&config).unwrap().report;
    let general = r.fits.iter().find(|f| f.model == "general").unwrap();
    assert!(!general.is_ok());
    assert!(general.error.is_some());
    assert!(r.decomposition_empirical.is_none());
    assert!(r.fits.iter().find(|f| f.model == "ols_simple").unwrap().is_ok());
}

#[test]
fn square_and_long_forms_agree() {
    let square = cities();
    let mut long = cities();
    long.dist_path = fixture("cities_dist_long.csv");
    long.dist_format = DistFormat::Long;
    assert_eq!(report_json(&square), report_json(&long));
}

#[test]
fn model_filter_keeps_simple_and_requested_fit() {
    let mut config = cities();
    config.options.model = Some(ModelVariant::Sar);
    let r = run_pipeline(&config).unwrap().report;
    let models: Vec<_> = r.fits.iter().map(|f| f.model).collect();
    assert_eq!(models, ["ols_simple", "sar"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut config = cities();
    config.options.permutations = Some(199);
    config.options.seed = 42;
    assert_eq!(report_json(&config), report_json(&config));
}

#[test]
fn thread_count_does_not_change_output() {
    let mut serial = cities();
    serial.options.permutations = Some(199);
    serial.options.seed = 7;
    let mut parallel = serial.clone();
    parallel.options.threads = Some(4);
    let mut global = serial.clone();
    global.options.threads = None;
    let a = report_json(&serial);
    assert_eq!(a, report_json(&parallel));
    assert_eq!(a, report_json(&global));
    assert!(a.contains("\"permutation_p_value\": 0."));
}

#[test]
fn seed_changes_permutation_p_values_only() {
    let mut a = cities();
    a.options.permutations = Some(199);
    let mut b = a.clone();
    b.options.seed = 1;
    let ra = run_pipeline(&a).unwrap().report;
    let rb = run_pipeline(&b).unwrap().report;
    let pa: Vec<_> = ra
        .correlation_table
        .rows
        .iter()
        .map(|r| r.permutation_p_value)
        .collect();
    let pb: Vec<_> = rb
        .correlation_table
        .rows
        .iter()
        .map(|r| r.permutation_p_value)
        .collect();
    assert_ne!(pa, pb);
    assert_eq!(to_canonical_json(&ra.fits), to_canonical_json(&rb.fits));
}

#[test]
fn report_json_reserializes_identically() {
    let json = report_json(&cities());
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mut again = serde_json::to_string_pretty(&value).unwrap();
    again.push('\n');
    assert_eq!(json, again);
}

#[test]
fn report_is_complete() {
    let r = run_pipeline(&cities()).unwrap().report;
    let names: Vec<_> = r.correlation_table.rows.iter().map(|r| r.parameter).collect();
    assert_eq!(names, ["I_x", "I_xy", "I_yx", "I_y", "R", "sigma2"]);
    assert_eq!(r.fits.len(), 4);
    for fit in &r.fits {
        assert!(fit.is_ok(), "{}", fit.model);
        assert!(fit.r2.is_some() && fit.s.is_some() && fit.f.is_some() && fit.dw.is_some());
        assert!(!fit.dw_ordering.is_empty());
        let sigma = fit.sigma_u_sq.unwrap();
        assert!((fit.response_residual_moment.unwrap() - sigma).abs() < 1e-10);
    }
    let general = r.fits.iter().find(|f| f.model == "general").unwrap();
    let d = r.decomposition_empirical.as_ref().unwrap();
    assert!((d.beta1.unwrap() - general.parameter("beta1").unwrap().value).abs() < 1e-8);
    assert!((d.beta2.unwrap() - general.parameter("beta2").unwrap().value).abs() < 1e-8);
    let x_moment = r.identity_checks.theoretical.unwrap().x_moment.unwrap();
    assert_eq!(x_moment, [0.0, 0.0]);
    for [l, rhs] in [
        r.identity_checks.empirical.unwrap().x_moment.unwrap(),
        r.identity_checks.empirical.unwrap().y_moment.unwrap(),
    ] {
        assert!((l - rhs).abs() < 1e-10);
    }
    assert!(r.diagnostics.is_some());
    assert!(["general", "sar", "slx"].contains(&r.advice.recommended));
}

#[test]
fn log_flag_changes_the_analysis() {
    let mut raw = cities();
    raw.options.log_transform = false;
    assert_ne!(report_json(&raw), report_json(&cities()));
}

#[test]
fn attribute_parse_error_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("attrs.csv");
    std::fs::write(&attrs, "id,x,y\na,1,2\nb,3,oops\nc,4,5\n").unwrap();
    let config = AnalysisConfig::new(&attrs, fixture("four_dist.csv"));
    match run_pipeline(&config) {
        Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn id_mismatch_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("attrs.csv");
    std::fs::write(&attrs, "id,x,y\nA,1,2\nB,2,1\nC,3,4\nZ,4,3\n").unwrap();
    let config = AnalysisConfig::new(&attrs, fixture("four_dist.csv"));
    let err = run_pipeline(&config).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(matches!(err, CliError::Schema(_) | CliError::UnknownId(_)), "{err:?}");
}

#[test]
fn missing_long_pair_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.csv");
    std::fs::write(&dist, "from,to,distance\nA,B,1\nA,C,3\nA,D,6\nB,C,2\nB,D,5\n").unwrap();
    let mut config = AnalysisConfig::new(fixture("four_attrs.csv"), &dist);
    config.dist_format = DistFormat::Long;
    assert!(matches!(run_pipeline(&config), Err(CliError::MissingPair(..))));
}

#[test]
fn constant_attribute_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("attrs.csv");
    std::fs::write(&attrs, "id,x,y\nA,1,2\nB,1,1\nC,1,4\nD,1,3\n").unwrap();
    let err = run_pipeline(&AnalysisConfig::new(&attrs, fixture("four_dist.csv"))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn invalid_options_are_rejected() {
    let mut config = cities();
    config.options.alpha = 1.5;
    assert!(matches!(run_pipeline(&config), Err(CliError::Config(_))));
    let mut config = cities();
    config.options.permutations = Some(10);
    assert!(matches!(run_pipeline(&config), Err(CliError::Config(_))));
}
