use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use spatreg_cli::io::write_weights_csv;
use spatreg_cli::report::{
    render_correlation_table, render_decomposition, render_fits, render_identity_checks, render_text, to_canonical_json,
};
use spatreg_cli::{run_pipeline, AnalysisConfig, AnalysisOptions, CliError, DistFormat, OutputFormat};
use spatreg_core::ModelVariant;

#[derive(Parser, Debug)]
#[command(name = "spatreg", version, about = "Spatial correlation and autoregression analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the normalized spatial weight matrix as CSV.
    Weights(Common),
    /// Spatial correlation indexes, Pearson R and residual variance.
    Corr(Common),
    /// Fit one model variant (plus the simple regression).
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_variant)]
        model: ModelVariant,
    },
    /// Decompose the autoregressive coefficients.
    Decompose(Common),
    /// Identity checks for theoretical and fitted coefficients.
    Check(Common),
    /// Model recommendation.
    Advise(Common),
    /// Full pipeline.
    Report {
        #[command(flatten)]
        common: Common,
        /// Only fit `ols_simple` and this variant.
        #[arg(long, value_parser = parse_variant)]
        model: Option<ModelVariant>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Attributes CSV with header `id,x,y`.
    #[arg(long)]
    attrs: PathBuf,
    /// Distances CSV.
    #[arg(long)]
    dist: PathBuf,
    /// `square` or `long`.
    #[arg(long, default_value = "square", value_parser = parse_dist_format)]
    dist_format: DistFormat,
    /// Natural-log transform both variables before standardizing.
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = spatreg_core::advisor::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = spatreg_core::advisor::DEFAULT_COLLINEARITY_THRESHOLD)]
    collinearity_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run permutation tests with this many permutations.
    #[arg(long)]
    permutations: Option<usize>,
    /// Worker threads for permutation tests (output does not depend on it).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` or `text`.
    #[arg(long, default_value = "json", value_parser = parse_output_format)]
    format: OutputFormat,
}

fn parse_variant(s: &str) -> Result<ModelVariant, String> {
    s.parse().map_err(|e: spatreg_core::Error| e.to_string())
}

fn parse_dist_format(s: &str) -> Result<DistFormat, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_output_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

impl Common {
    fn config(&self, model: Option<ModelVariant>) -> AnalysisConfig {
        AnalysisConfig {
            attrs_path: self.attrs.clone(),
            dist_path: self.dist.clone(),
            dist_format: self.dist_format,
            options: AnalysisOptions {
                log_transform: self.log,
                alpha: self.alpha,
                collinearity_threshold: self.collinearity_threshold,
                model,
                seed: self.seed,
                permutations: self.permutations,
                threads: Some(self.threads),
            },
            output: self.format,
        }
    }
}

struct Output {
    body: String,
    code: u8,
}

fn ok(body: String) -> Output {
    Output { body, code: 0 }
}

fn execute(command: &Command) -> Result<(Output, &Common), CliError> {
    let (common, model) = match command {
        Command::Fit { common, model } => (common, Some(*model)),
        Command::Report { common, model } => (common, *model),
        Command::Weights(c) | Command::Corr(c) | Command::Decompose(c) | Command::Check(c) | Command::Advise(c) => {
            (c, None)
        }
    };
    let config = common.config(model);
    let analysis = run_pipeline(&config)?;
    let report = &analysis.report;
    let text = config.output == OutputFormat::Text;
    let mut body = String::new();
    let output = match command {
        Command::Weights(_) => {
            let mut buf = Vec::new();
            write_weights_csv(&mut buf, &analysis.ids, &analysis.weights).map_err(|source| CliError::Io {
                path: "<weights>".into(),
                source,
            })?;
            ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        Command::Corr(_) if text => {
            render_correlation_table(&report.correlation_table, &mut body);
            ok(body)
        }
        Command::Corr(_) => ok(to_canonical_json(&report.correlation_table)),
        Command::Fit { model, .. } => {
            let failed = report.fits.iter().any(|f| f.model == model.as_str() && !f.is_ok());
            if text {
                render_fits(&report.fits, &mut body);
            } else {
                body = to_canonical_json(&json!({ "fits": report.fits }));
            }
            Output {
                body,
                code: if failed { 2 } else { 0 },
            }
        }
        Command::Decompose(_) => {
            let singular = report.decomposition.error.is_some();
            if text {
                render_decomposition("theoretical", &report.decomposition, &mut body);
                if let Some(d) = &report.decomposition_empirical {
                    render_decomposition("empirical", d, &mut body);
                }
            } else {
                body = to_canonical_json(&json!({
                    "decomposition": report.decomposition,
                    "decomposition_empirical": report.decomposition_empirical,
                    "lag_means": report.lag_means,
                    "pure_coefficients": report.pure_coefficients,
                }));
            }
            Output {
                body,
                code: if singular { 2 } else { 0 },
            }
        }
        Command::Check(_) if text => {
            render_identity_checks(&report.identity_checks, &mut body);
            ok(body)
        }
        Command::Check(_) => ok(to_canonical_json(&report.identity_checks)),
        Command::Advise(_) if text => ok(report.advice.narrative.clone()),
        Command::Advise(_) => ok(to_canonical_json(&json!({
            "advice": report.advice,
            "collinearity": report.collinearity,
        }))),
        Command::Report { .. } if text => ok(render_text(report)),
        Command::Report { .. } => ok(to_canonical_json(report)),
    };
    Ok((output, common))
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let mut file = BufWriter::new(File::create(path).map_err(io_err)?);
            file.write_all(body.as_bytes()).map_err(io_err)?;
            file.flush().map_err(io_err)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = execute(&cli.command).and_then(|(output, common)| {
        emit(&output.body, common.out.as_ref())?;
        Ok(output.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
