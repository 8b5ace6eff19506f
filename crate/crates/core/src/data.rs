//! Published experiment data and file ingestion/export.
//!
//! Input files are JSON arrays of objects or CSV with a header, both using
//! the keys `source_id, face_type, p_g, p_attack_given_good, p_b,
//! p_attack_given_bad, p_t_observed, p_attack_observed`. Exported result
//! files start with the same columns, so they load back as records.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QdbError, Result};
use crate::model::FittedModel;

/// Published priors are rounded to two decimals.
pub const RECORD_PRIOR_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceType {
    Wide,
    Narrow,
}

impl fmt::Display for FaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaceType::Wide => "wide",
            FaceType::Narrow => "narrow",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub source_id: String,
    pub face_type: FaceType,
    pub p_g: f64,
    pub p_attack_given_good: f64,
    pub p_b: f64,
    pub p_attack_given_bad: f64,
    pub p_t_observed: f64,
    pub p_attack_observed: f64,
}

impl ExperimentRecord {
    /// Checks ranges and the prior sum; `Err((field, message))` on failure.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        let fields = [
            ("p_g", self.p_g),
            ("p_attack_given_good", self.p_attack_given_good),
            ("p_b", self.p_b),
            ("p_attack_given_bad", self.p_attack_given_bad),
            ("p_t_observed", self.p_t_observed),
            ("p_attack_observed", self.p_attack_observed),
        ];
        for (field, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err((field, format!("{value} is outside [0, 1]")));
            }
        }
        let sum = self.p_g + self.p_b;
        if (sum - 1.0).abs() > RECORD_PRIOR_TOLERANCE + 1e-12 {
            return Err((
                "p_b",
                format!("p_g + p_b = {sum} differs from 1 by more than {RECORD_PRIOR_TOLERANCE}"),
            ));
        }
        if self.source_id.trim().is_empty() {
            return Err(("source_id", "must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Observed,
    #[serde(rename = "QDB")]
    Qdb,
    #[serde(rename = "BAE")]
    Bae,
    MarkovBA,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Observed => "Observed",
            ModelKind::Qdb => "QDB",
            ModelKind::Bae => "BAE",
            ModelKind::MarkovBA => "MarkovBA",
        })
    }
}

/// Published model output for one narrow-face source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceValues {
    pub source_id: &'static str,
    pub model: ModelKind,
    pub p_t: f64,
    pub p_attack: f64,
    /// Reported conditionals, published for the QDB rows only.
    pub conditionals: Option<(f64, f64)>,
}

pub const SOURCES: [&str; 6] = [
    "Townsend2000",
    "Busemeyer2009",
    "Wang2016-E1",
    "Wang2016-E2",
    "Wang2016-E3",
    "Average",
];

// (source, face, P(G), P(A|G), P(B), P(A|B), P_T, P(A))
const EXPERIMENTS: [(&str, FaceType, [f64; 6]); 12] = [
    (
        "Townsend2000",
        FaceType::Wide,
        [0.84, 0.35, 0.16, 0.52, 0.37, 0.39],
    ),
    (
        "Townsend2000",
        FaceType::Narrow,
        [0.17, 0.41, 0.83, 0.63, 0.59, 0.69],
    ),
    (
        "Busemeyer2009",
        FaceType::Wide,
        [0.80, 0.37, 0.20, 0.53, 0.40, 0.39],
    ),
    (
        "Busemeyer2009",
        FaceType::Narrow,
        [0.20, 0.45, 0.80, 0.64, 0.60, 0.69],
    ),
    (
        "Wang2016-E1",
        FaceType::Wide,
        [0.78, 0.39, 0.22, 0.52, 0.42, 0.42],
    ),
    (
        "Wang2016-E1",
        FaceType::Narrow,
        [0.21, 0.41, 0.79, 0.58, 0.54, 0.59],
    ),
    (
        "Wang2016-E2",
        FaceType::Wide,
        [0.78, 0.33, 0.22, 0.53, 0.37, 0.37],
    ),
    (
        "Wang2016-E2",
        FaceType::Narrow,
        [0.24, 0.37, 0.76, 0.61, 0.55, 0.60],
    ),
    (
        "Wang2016-E3",
        FaceType::Wide,
        [0.77, 0.34, 0.23, 0.58, 0.40, 0.39],
    ),
    (
        "Wang2016-E3",
        FaceType::Narrow,
        [0.24, 0.33, 0.76, 0.66, 0.58, 0.62],
    ),
    (
        "Average",
        FaceType::Wide,
        [0.79, 0.36, 0.21, 0.54, 0.39, 0.39],
    ),
    (
        "Average",
        FaceType::Narrow,
        [0.21, 0.39, 0.79, 0.62, 0.57, 0.64],
    ),
];

// QDB: (P(A|G), P(A|B), P_T, P(A)); the others: (P_T, P(A)).
const QDB_REFERENCE: [(&str, [f64; 4]); 6] = [
    ("Townsend2000", [0.41, 0.6296, 0.5923, 0.6756]),
    ("Busemeyer2009", [0.4499, 0.6409, 0.6027, 0.6860]),
    ("Wang2016-E1", [0.41, 0.5802, 0.5444, 0.6278]),
    ("Wang2016-E2", [0.3702, 0.6104, 0.5528, 0.6361]),
    ("Wang2016-E3", [0.3296, 0.6604, 0.5810, 0.6644]),
    ("Average", [0.39, 0.6205, 0.5721, 0.6554]),
];

const OTHER_REFERENCE: [(&str, ModelKind, [f64; 2]); 18] = [
    ("Townsend2000", ModelKind::Observed, [0.59, 0.69]),
    ("Townsend2000", ModelKind::Bae, [0.56, 0.63]),
    ("Townsend2000", ModelKind::MarkovBA, [0.576, 0.576]),
    ("Busemeyer2009", ModelKind::Observed, [0.60, 0.69]),
    ("Busemeyer2009", ModelKind::Bae, [0.56, 0.63]),
    ("Busemeyer2009", ModelKind::MarkovBA, [0.621, 0.621]),
    ("Wang2016-E1", ModelKind::Observed, [0.54, 0.59]),
    ("Wang2016-E1", ModelKind::Bae, [0.5634, 0.6214]),
    ("Wang2016-E1", ModelKind::MarkovBA, [0.532, 0.532]),
    ("Wang2016-E2", ModelKind::Observed, [0.55, 0.60]),
    ("Wang2016-E2", ModelKind::Bae, [0.6065, 0.6315]),
    ("Wang2016-E2", ModelKind::MarkovBA, [0.5979, 0.5979]),
    ("Wang2016-E3", ModelKind::Observed, [0.58, 0.62]),
    ("Wang2016-E3", ModelKind::Bae, [0.6123, 0.6323]),
    ("Wang2016-E3", ModelKind::MarkovBA, [0.5316, 0.5316]),
    ("Average", ModelKind::Observed, [0.57, 0.64]),
    ("Average", ModelKind::Bae, [0.580, 0.629]),
    ("Average", ModelKind::MarkovBA, [0.572, 0.572]),
];

/// All twelve published rows, wide then narrow per source.
pub fn embedded_experiments() -> Vec<ExperimentRecord> {
    EXPERIMENTS
        .iter()
        .map(|&(source, face_type, v)| ExperimentRecord {
            source_id: source.to_string(),
            face_type,
            p_g: v[0],
            p_attack_given_good: v[1],
            p_b: v[2],
            p_attack_given_bad: v[3],
            p_t_observed: v[4],
            p_attack_observed: v[5],
        })
        .collect()
}

pub fn embedded_experiment(source_id: &str, face_type: FaceType) -> Option<ExperimentRecord> {
    embedded_experiments()
        .into_iter()
        .find(|r| r.source_id == source_id && r.face_type == face_type)
}

/// Narrow-face reference rows: observed, QDB, BAE and Markov BA per source.
pub fn embedded_references() -> Vec<ReferenceValues> {
    let mut out = Vec::with_capacity(24);
    for source in SOURCES {
        for &(s, model, [p_t, p_attack]) in OTHER_REFERENCE.iter().filter(|r| r.0 == source) {
            if model == ModelKind::Observed {
                out.push(ReferenceValues {
                    source_id: s,
                    model,
                    p_t,
                    p_attack,
                    conditionals: None,
                });
            }
        }
        let &(s, [g, b, p_t, p_attack]) = QDB_REFERENCE
            .iter()
            .find(|r| r.0 == source)
            .expect("every source has a QDB row");
        out.push(ReferenceValues {
            source_id: s,
            model: ModelKind::Qdb,
            p_t,
            p_attack,
            conditionals: Some((g, b)),
        });
        for &(s, model, [p_t, p_attack]) in OTHER_REFERENCE.iter().filter(|r| r.0 == source) {
            if model != ModelKind::Observed {
                out.push(ReferenceValues {
                    source_id: s,
                    model,
                    p_t,
                    p_attack,
                    conditionals: None,
                });
            }
        }
    }
    out
}

pub fn embedded_reference(source_id: &str, model: ModelKind) -> Option<ReferenceValues> {
    embedded_references()
        .into_iter()
        .find(|r| r.source_id == source_id && r.model == model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// By extension, falling back to sniffing the first non-blank byte.
    pub fn detect(path: &Path, content: &str) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(ext) if ext == "json" => FileFormat::Json,
            Some(ext) if ext == "csv" => FileFormat::Csv,
            _ => match content.trim_start().chars().next() {
                Some('[') | Some('{') => FileFormat::Json,
                _ => FileFormat::Csv,
            },
        }
    }
}

impl FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(FileFormat::Csv),
            "json" => Ok(FileFormat::Json),
            other => Err(format!("unknown file format `{other}`")),
        }
    }
}

pub fn load_experiments(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| QdbError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_experiments(&content, FileFormat::detect(path, &content), path)
}

/// Parses and validates records; `origin` only labels diagnostics. Rows are
/// numbered from 1 in file order, excluding the CSV header.
pub fn parse_experiments(
    content: &str,
    format: FileFormat,
    origin: &Path,
) -> Result<Vec<ExperimentRecord>> {
    if content.trim().is_empty() {
        return Ok(Vec::new());
    }
    let records = match format {
        FileFormat::Json => parse_json(content, origin)?,
        FileFormat::Csv => parse_csv(content, origin)?,
    };
    for (i, record) in records.iter().enumerate() {
        record
            .check()
            .map_err(|(field, message)| QdbError::Validation {
                path: origin.to_path_buf(),
                row: i + 1,
                field,
                message,
            })?;
    }
    Ok(records)
}

fn parse_json(content: &str, origin: &Path) -> Result<Vec<ExperimentRecord>> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(content).map_err(|e| QdbError::Parse {
            path: origin.to_path_buf(),
            row: 0,
            message: e.to_string(),
        })?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v).map_err(|e| QdbError::Parse {
                path: origin.to_path_buf(),
                row: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn parse_csv(content: &str, origin: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    reader
        .deserialize::<ExperimentRecord>()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| QdbError::Parse {
                path: origin.to_path_buf(),
                row: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// One exported row: the input record, the fit and, when published, the
/// published QDB values for the same source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(flatten)]
    pub record: ExperimentRecord,
    pub h_g: f64,
    pub h_b: f64,
    pub residual_good: f64,
    pub residual_bad: f64,
    pub fitted_attack_given_good: f64,
    pub fitted_attack_given_bad: f64,
    pub p_uncertain_given_good: f64,
    pub p_uncertain_given_bad: f64,
    pub p_t_predicted: f64,
    pub p_attack_predicted: f64,
    pub interference: f64,
    pub delta_p_t_observed: f64,
    pub delta_p_attack_observed: f64,
    pub p_t_published: Option<f64>,
    pub p_attack_published: Option<f64>,
    pub delta_p_t_published: Option<f64>,
    pub delta_p_attack_published: Option<f64>,
}

impl FitResult {
    pub fn new(record: ExperimentRecord, fitted: &FittedModel) -> Self {
        let p = &fitted.prediction;
        let published = (record.face_type == FaceType::Narrow)
            .then(|| embedded_reference(&record.source_id, ModelKind::Qdb))
            .flatten();
        FitResult {
            h_g: fitted.params.h_g,
            h_b: fitted.params.h_b,
            residual_good: fitted.residual_good,
            residual_bad: fitted.residual_bad,
            fitted_attack_given_good: p.p_attack_given_good,
            fitted_attack_given_bad: p.p_attack_given_bad,
            p_uncertain_given_good: p.p_uncertain_given_good,
            p_uncertain_given_bad: p.p_uncertain_given_bad,
            p_t_predicted: p.p_total_cd,
            p_attack_predicted: p.p_attack_d_alone,
            interference: p.interference,
            delta_p_t_observed: p.p_total_cd - record.p_t_observed,
            delta_p_attack_observed: p.p_attack_d_alone - record.p_attack_observed,
            p_t_published: published.as_ref().map(|r| r.p_t),
            p_attack_published: published.as_ref().map(|r| r.p_attack),
            delta_p_t_published: published.as_ref().map(|r| p.p_total_cd - r.p_t),
            delta_p_attack_published: published.as_ref().map(|r| p.p_attack_d_alone - r.p_attack),
            record,
        }
    }
}

pub fn render_results(results: &[FitResult], format: FileFormat) -> Result<String> {
    match format {
        FileFormat::Json => {
            let mut s = serde_json::to_string_pretty(results)?;
            s.push('\n');
            Ok(s)
        }
        FileFormat::Csv => {
            // `csv` cannot serialize flattened structs, so go through JSON
            // objects whose key order is the struct's field order.
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(result_columns())?;
            for r in results {
                let value = serde_json::to_value(r)?;
                let obj = value
                    .as_object()
                    .expect("FitResult serializes to an object");
                let row: Vec<String> = result_columns()
                    .iter()
                    .map(|k| match &obj[*k] {
                        serde_json::Value::Null => String::new(),
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                writer.write_record(&row)?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| csv::Error::from(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
    }
}

/// CSV header of exported results; the first eight columns are the record schema.
pub fn result_columns() -> &'static [&'static str] {
    &[
        "source_id",
        "face_type",
        "p_g",
        "p_attack_given_good",
        "p_b",
        "p_attack_given_bad",
        "p_t_observed",
        "p_attack_observed",
        "h_g",
        "h_b",
        "residual_good",
        "residual_bad",
        "fitted_attack_given_good",
        "fitted_attack_given_bad",
        "p_uncertain_given_good",
        "p_uncertain_given_bad",
        "p_t_predicted",
        "p_attack_predicted",
        "interference",
        "delta_p_t_observed",
        "delta_p_attack_observed",
        "p_t_published",
        "p_attack_published",
        "delta_p_t_published",
        "delta_p_attack_published",
    ]
}

pub fn export_results(
    results: &[FitResult],
    path: impl AsRef<Path>,
    format: FileFormat,
) -> Result<()> {
    let path = path.as_ref();
    let body = render_results(results, format)?;
    write_file(path, body.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| QdbError::Io {
        path: PathBuf::from(path),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    Ok(())
}
