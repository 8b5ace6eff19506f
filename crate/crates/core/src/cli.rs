//! `qdb` command-line front end. Commands render to a string so they can be
//! tested without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::belief::{HamiltonianParams, DEFAULT_TIME};
use crate::data::{self, embedded_experiments, load_experiments, FaceType, FileFormat, FitResult};
use crate::error::Result;
use crate::measurement::{pignistic_transform, MassFunction};
use crate::model::{
    fit_experiment_with, predict_with, MeasurementWeights, ModelConfig, Prediction,
};
use crate::report::{self, mean_relative_error, MAX_MEAN_RELATIVE_ERROR, TABLE4_TOLERANCE};
use crate::search::GridSearch;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_REPRODUCTION_FAIL: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qdb",
    version,
    about = "Quantum dynamic belief model: fit, predict and reproduce"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment records (JSON or CSV); embedded data when omitted.
    #[arg(short = 'i', long = "input", global = true)]
    pub input: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,

    /// Uncertain-state weight after categorizing.
    #[arg(long = "wcd", global = true, default_value_t = 0.25)]
    pub w_cd: f64,

    /// Uncertain-state weight when deciding alone.
    #[arg(long = "wd", global = true, default_value_t = 0.5)]
    pub w_d: f64,

    /// Deliberation time [default: pi/2].
    #[arg(long = "time", global = true, allow_negative_numbers = true)]
    pub time: Option<f64>,

    #[arg(long = "hmin", global = true, default_value_t = -10.0, allow_negative_numbers = true)]
    pub h_min: f64,

    #[arg(
        long = "hmax",
        global = true,
        default_value_t = 10.0,
        allow_negative_numbers = true
    )]
    pub h_max: f64,

    #[arg(
        long = "grid-step",
        global = true,
        default_value_t = 1e-3,
        allow_negative_numbers = true
    )]
    pub grid_step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit h_G and h_B to each record and predict both conditions.
    Fit {
        /// Which face types to fit [default: narrow for embedded data, all for files].
        #[arg(long, value_enum)]
        face: Option<FaceFilter>,
    },
    /// Predict from given parameters without fitting.
    Predict {
        #[arg(long = "pg")]
        p_g: f64,
        /// Defaults to 1 - pg.
        #[arg(long = "pb")]
        p_b: Option<f64>,
        #[arg(long = "hg", allow_negative_numbers = true)]
        h_g: f64,
        #[arg(long = "hb", allow_negative_numbers = true)]
        h_b: f64,
    },
    /// Recompute a published table and compare.
    Reproduce {
        #[arg(value_enum)]
        table: TableId,
    },
    /// Pignistic transformation of a mass spec such as "A:0.4 A,W:0.6".
    Ppt { spec: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaceFilter {
    Narrow,
    Wide,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    T4,
    T5,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub exit_code: u8,
}

impl Cli {
    pub fn model_config(&self) -> Result<ModelConfig> {
        let config = ModelConfig {
            time: self.time.unwrap_or(DEFAULT_TIME),
            weights: MeasurementWeights {
                categorized: self.w_cd,
                decision_alone: self.w_d,
            },
            search: GridSearch {
                lower: self.h_min,
                upper: self.h_max,
                step: self.grid_step,
                ..GridSearch::default()
            },
        };
        config.validate()?;
        Ok(config)
    }
}

/// Runs a parsed command. When `-o` is given the report goes to that file
/// and the returned report is empty.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = cli.model_config()?;
    let outcome = match &cli.command {
        Command::Fit { face } => cmd_fit(cli, &config, *face)?,
        Command::Predict { p_g, p_b, h_g, h_b } => cmd_predict(
            cli.format,
            &config,
            *p_g,
            p_b.unwrap_or(1.0 - p_g),
            *h_g,
            *h_b,
        )?,
        Command::Reproduce { table } => cmd_reproduce(cli.format, &config, *table)?,
        Command::Ppt { spec } => cmd_ppt(cli.format, spec)?,
    };
    match &cli.output {
        Some(path) => {
            data::write_file(path, outcome.report.as_bytes())?;
            Ok(Outcome {
                report: String::new(),
                exit_code: outcome.exit_code,
            })
        }
        None => Ok(outcome),
    }
}

fn ok(report: String) -> Outcome {
    Outcome {
        report,
        exit_code: EXIT_OK,
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn pass_label(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_fit(cli: &Cli, config: &ModelConfig, face: Option<FaceFilter>) -> Result<Outcome> {
    let (records, default_face) = match &cli.input {
        Some(path) => (load_experiments(path)?, FaceFilter::All),
        None => (embedded_experiments(), FaceFilter::Narrow),
    };
    let face = face.unwrap_or(default_face);
    let mut results = Vec::new();
    for record in records {
        let keep = match face {
            FaceFilter::All => true,
            FaceFilter::Narrow => record.face_type == FaceType::Narrow,
            FaceFilter::Wide => record.face_type == FaceType::Wide,
        };
        if !keep {
            continue;
        }
        let fitted = fit_experiment_with(
            record.p_g,
            record.p_b,
            record.p_attack_given_good,
            record.p_attack_given_bad,
            config,
        )?;
        results.push(FitResult::new(record, &fitted));
    }

    let report = match cli.format {
        OutputFormat::Json => data::render_results(&results, FileFormat::Json)?,
        OutputFormat::Csv => data::render_results(&results, FileFormat::Csv)?,
        OutputFormat::Table => render_fit_table(&results),
    };
    Ok(ok(report))
}

fn render_fit_table(results: &[FitResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<6} {:>6} {:>9} {:>9} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "source",
        "face",
        "P(G)",
        "h_G",
        "h_B",
        "P(A|G)",
        "P(A|B)",
        "P(U|G)",
        "P(U|B)",
        "P_T",
        "P(A)",
        "P(A)-P_T"
    );
    for r in results {
        let _ = writeln!(
            s,
            "{:<14} {:<6} {:>6.4} {:>9.4} {:>9.4} {:>8.4} {:>8.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}",
            r.record.source_id,
            r.record.face_type,
            r.record.p_g,
            r.h_g,
            r.h_b,
            r.fitted_attack_given_good,
            r.fitted_attack_given_bad,
            r.p_uncertain_given_good,
            r.p_uncertain_given_bad,
            r.p_t_predicted,
            r.p_attack_predicted,
            r.interference,
        );
    }
    for r in results {
        if r.residual_good > crate::model::CLAMP_RESIDUAL
            || r.residual_bad > crate::model::CLAMP_RESIDUAL
        {
            let _ = writeln!(
                s,
                "warning: {} ({}) could not match observed conditionals: residuals {:.2e} / {:.2e}",
                r.record.source_id, r.record.face_type, r.residual_good, r.residual_bad
            );
        }
    }
    s
}

#[derive(Serialize)]
struct PredictReport {
    p_g: f64,
    p_b: f64,
    params: HamiltonianParams,
    weights: MeasurementWeights,
    prediction: Prediction,
}

pub fn cmd_predict(
    format: OutputFormat,
    config: &ModelConfig,
    p_g: f64,
    p_b: f64,
    h_g: f64,
    h_b: f64,
) -> Result<Outcome> {
    let params = HamiltonianParams::new(h_g, h_b, config.time)?;
    let prediction = predict_with(p_g, p_b, &params, &config.weights)?;
    let report = match format {
        OutputFormat::Json => to_json(&PredictReport {
            p_g,
            p_b,
            params,
            weights: config.weights,
            prediction,
        })?,
        OutputFormat::Csv => {
            let p = &prediction;
            format!(
                "p_g,p_b,h_g,h_b,t,p_attack_given_good,p_attack_given_bad,p_uncertain_given_good,p_uncertain_given_bad,p_total_cd,p_attack_d_alone,interference\n\
                 {},{},{},{},{},{},{},{},{},{},{},{}\n",
                p_g, p_b, h_g, h_b, params.t, p.p_attack_given_good, p.p_attack_given_bad,
                p.p_uncertain_given_good, p.p_uncertain_given_bad, p.p_total_cd,
                p.p_attack_d_alone, p.interference
            )
        }
        OutputFormat::Table => {
            let p = &prediction;
            let mut s = String::new();
            let _ = writeln!(s, "P(G)      = {:.4}", p_g);
            let _ = writeln!(s, "P(B)      = {:.4}", p_b);
            let _ = writeln!(s, "h_G       = {:.4}", h_g);
            let _ = writeln!(s, "h_B       = {:.4}", h_b);
            let _ = writeln!(s, "t         = {:.4}", params.t);
            let _ = writeln!(s, "P(A|G)    = {:.4}", p.p_attack_given_good);
            let _ = writeln!(s, "P(A|B)    = {:.4}", p.p_attack_given_bad);
            let _ = writeln!(s, "P(U|G)    = {:.4}", p.p_uncertain_given_good);
            let _ = writeln!(s, "P(U|B)    = {:.4}", p.p_uncertain_given_bad);
            let _ = writeln!(s, "P_T       = {:.4}", p.p_total_cd);
            let _ = writeln!(s, "P(A)      = {:.4}", p.p_attack_d_alone);
            let _ = writeln!(s, "P(A)-P_T  = {:.4}", p.interference);
            s
        }
    };
    Ok(ok(report))
}

#[derive(Serialize)]
struct Table4Report<'a> {
    tolerance: f64,
    mean_relative_error: f64,
    all_pass: bool,
    rows: &'a [report::Table4Row],
}

pub fn cmd_reproduce(
    format: OutputFormat,
    config: &ModelConfig,
    table: TableId,
) -> Result<Outcome> {
    match table {
        TableId::T4 => {
            let rows = report::table4(config)?;
            let all_pass = rows.iter().all(|r| r.pass);
            let mre = mean_relative_error(&rows);
            let body = match format {
                OutputFormat::Json => to_json(&Table4Report {
                    tolerance: TABLE4_TOLERANCE,
                    mean_relative_error: mre,
                    all_pass,
                    rows: &rows,
                })?,
                OutputFormat::Csv => {
                    let mut s = String::from(
                        "source_id,h_g,h_b,p_attack_given_good,p_attack_given_bad,p_t,p_attack,published_attack_given_good,published_attack_given_bad,published_p_t,published_p_attack,delta_p_t,delta_p_attack,status\n",
                    );
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                            r.source_id,
                            r.h_g,
                            r.h_b,
                            r.p_attack_given_good,
                            r.p_attack_given_bad,
                            r.p_t,
                            r.p_attack,
                            r.published_attack_given_good,
                            r.published_attack_given_bad,
                            r.published_p_t,
                            r.published_p_attack,
                            r.delta_p_t,
                            r.delta_p_attack,
                            pass_label(r.pass)
                        );
                    }
                    s
                }
                OutputFormat::Table => render_table4(&rows, mre),
            };
            Ok(Outcome {
                report: body,
                exit_code: if all_pass {
                    EXIT_OK
                } else {
                    EXIT_REPRODUCTION_FAIL
                },
            })
        }
        TableId::T5 => {
            let blocks = report::table5(config)?;
            let all_pass = blocks.iter().all(|b| b.pass());
            let body = match format {
                OutputFormat::Json => to_json(&blocks)?,
                OutputFormat::Csv => {
                    let mut s =
                        String::from("source_id,model,origin,p_t,p_attack,interference,status\n");
                    for b in &blocks {
                        for e in &b.entries {
                            let _ = writeln!(
                                s,
                                "{},{},{},{},{},{},{}",
                                b.source_id,
                                e.model,
                                e.origin,
                                e.p_t,
                                e.p_attack,
                                e.interference,
                                e.pass.map(pass_label).unwrap_or("")
                            );
                        }
                    }
                    s
                }
                OutputFormat::Table => render_table5(&blocks),
            };
            Ok(Outcome {
                report: body,
                exit_code: if all_pass {
                    EXIT_OK
                } else {
                    EXIT_REPRODUCTION_FAIL
                },
            })
        }
    }
}

fn render_table4(rows: &[report::Table4Row], mre: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>8} {:>8} {:>7} {:>7} | {:>8} {:>8} {:>7} {:>7} | {:>8} {:>8} | status",
        "source",
        "P(A|G)",
        "P(A|B)",
        "P_T",
        "P(A)",
        "pub A|G",
        "pub A|B",
        "pub P_T",
        "pub P(A)",
        "dP_T",
        "dP(A)"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<14} {:>8.4} {:>8.4} {:>7.4} {:>7.4} | {:>8.4} {:>8.4} {:>7.4} {:>7.4} | {:>+8.4} {:>+8.4} | {}",
            r.source_id,
            r.p_attack_given_good,
            r.p_attack_given_bad,
            r.p_t,
            r.p_attack,
            r.published_attack_given_good,
            r.published_attack_given_bad,
            r.published_p_t,
            r.published_p_attack,
            r.delta_p_t,
            r.delta_p_attack,
            pass_label(r.pass)
        );
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(
        s,
        "tolerance: +/-{TABLE4_TOLERANCE} on P_T and P(A); {passed}/{} rows PASS",
        rows.len()
    );
    let _ = writeln!(
        s,
        "mean relative error vs observed P_T and P(A): {:.2}% (limit {:.0}%)",
        100.0 * mre,
        100.0 * MAX_MEAN_RELATIVE_ERROR
    );
    s
}

fn render_table5(blocks: &[report::Table5Block]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<10} {:<10} {:>7} {:>7} {:>9} status",
        "source", "model", "origin", "P_T", "P(A)", "P(A)-P_T"
    );
    for b in blocks {
        for e in &b.entries {
            let model = if e.model == "MarkovBA" {
                "MarkovBA*"
            } else {
                e.model.as_str()
            };
            let _ = writeln!(
                s,
                "{:<14} {:<10} {:<10} {:>7.4} {:>7.4} {:>+9.4} {}",
                b.source_id,
                model,
                e.origin,
                e.p_t,
                e.p_attack,
                e.interference,
                e.pass.map(pass_label).unwrap_or("")
            );
        }
    }
    let _ = writeln!(
        s,
        "* MarkovBA rows are stored published figures; their fitting procedure is unknown and they are not recomputed."
    );
    let _ = writeln!(
        s,
        "  The computed Markov row applies the law of total probability to the observed conditionals."
    );
    s
}

pub fn cmd_ppt(format: OutputFormat, spec: &str) -> Result<Outcome> {
    let mass: MassFunction = spec.parse()?;
    let bet = pignistic_transform(&mass);
    let report = match format {
        OutputFormat::Json => to_json(&bet)?,
        OutputFormat::Csv => {
            let mut s = String::from("label,probability\n");
            for (k, v) in &bet {
                let _ = writeln!(s, "{k},{v}");
            }
            s
        }
        OutputFormat::Table => {
            let parts: Vec<String> = bet.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
            format!("{}\n", parts.join(" "))
        }
    };
    Ok(ok(report))
}
