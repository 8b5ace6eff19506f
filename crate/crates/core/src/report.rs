//! Reproduction of the published comparison tables.

use serde::Serialize;

use crate::data::{embedded_experiment, embedded_reference, FaceType, ModelKind, SOURCES};
use crate::error::Result;
use crate::model::{fit_experiment_with, markov_predict, FittedModel, ModelConfig};

/// Allowed absolute gap between computed and published QDB `P_T` and `P(A)`.
pub const TABLE4_TOLERANCE: f64 = 0.004;

/// Ceiling on the mean relative error against observed `P_T` and `P(A)`.
pub const MAX_MEAN_RELATIVE_ERROR: f64 = 0.05;

// Published values carry four decimals; don't fail on representation noise.
const FLOAT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Table4Row {
    pub source_id: String,
    pub p_g: f64,
    pub p_b: f64,
    pub observed_attack_given_good: f64,
    pub observed_attack_given_bad: f64,
    pub observed_p_t: f64,
    pub observed_p_attack: f64,
    pub h_g: f64,
    pub h_b: f64,
    pub p_attack_given_good: f64,
    pub p_attack_given_bad: f64,
    pub p_t: f64,
    pub p_attack: f64,
    pub interference: f64,
    pub published_attack_given_good: f64,
    pub published_attack_given_bad: f64,
    pub published_p_t: f64,
    pub published_p_attack: f64,
    pub delta_p_t: f64,
    pub delta_p_attack: f64,
    pub pass: bool,
}

impl Table4Row {
    fn build(source: &str, fitted: &FittedModel) -> Self {
        let rec = embedded_experiment(source, FaceType::Narrow).expect("embedded source");
        let published = embedded_reference(source, ModelKind::Qdb).expect("embedded QDB row");
        let (pub_g, pub_b) = published.conditionals.expect("QDB rows carry conditionals");
        let p = &fitted.prediction;
        let delta_p_t = p.p_total_cd - published.p_t;
        let delta_p_attack = p.p_attack_d_alone - published.p_attack;
        Table4Row {
            source_id: source.to_string(),
            p_g: rec.p_g,
            p_b: rec.p_b,
            observed_attack_given_good: rec.p_attack_given_good,
            observed_attack_given_bad: rec.p_attack_given_bad,
            observed_p_t: rec.p_t_observed,
            observed_p_attack: rec.p_attack_observed,
            h_g: fitted.params.h_g,
            h_b: fitted.params.h_b,
            p_attack_given_good: p.p_attack_given_good,
            p_attack_given_bad: p.p_attack_given_bad,
            p_t: p.p_total_cd,
            p_attack: p.p_attack_d_alone,
            interference: p.interference,
            published_attack_given_good: pub_g,
            published_attack_given_bad: pub_b,
            published_p_t: published.p_t,
            published_p_attack: published.p_attack,
            delta_p_t,
            delta_p_attack,
            pass: delta_p_t.abs() <= TABLE4_TOLERANCE + FLOAT_SLACK
                && delta_p_attack.abs() <= TABLE4_TOLERANCE + FLOAT_SLACK,
        }
    }
}

/// Fits every narrow-face source and lines it up with the published QDB row.
pub fn table4(config: &ModelConfig) -> Result<Vec<Table4Row>> {
    SOURCES
        .iter()
        .map(|&source| {
            let rec = embedded_experiment(source, FaceType::Narrow).expect("embedded source");
            let fitted = fit_experiment_with(
                rec.p_g,
                rec.p_b,
                rec.p_attack_given_good,
                rec.p_attack_given_bad,
                config,
            )?;
            Ok(Table4Row::build(source, &fitted))
        })
        .collect()
}

/// Mean of `|predicted - observed| / observed` over `P_T` and `P(A)` of every row.
pub fn mean_relative_error(rows: &[Table4Row]) -> f64 {
    let errors: Vec<f64> = rows
        .iter()
        .flat_map(|r| {
            [
                (r.p_t - r.observed_p_t).abs() / r.observed_p_t,
                (r.p_attack - r.observed_p_attack).abs() / r.observed_p_attack,
            ]
        })
        .collect();
    if errors.is_empty() {
        return 0.0;
    }
    errors.iter().sum::<f64>() / errors.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct Table5Entry {
    pub model: String,
    /// `computed` or `published`.
    pub origin: &'static str,
    pub p_t: f64,
    pub p_attack: f64,
    pub interference: f64,
    /// Only set for the computed QDB row, checked against the published one.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table5Block {
    pub source_id: String,
    pub entries: Vec<Table5Entry>,
}

impl Table5Block {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass != Some(false))
    }
}

pub fn table5(config: &ModelConfig) -> Result<Vec<Table5Block>> {
    let t4 = table4(config)?;
    let published = |source: &str, model: ModelKind| {
        let r = embedded_reference(source, model).expect("embedded reference");
        Table5Entry {
            model: model.to_string(),
            origin: "published",
            p_t: r.p_t,
            p_attack: r.p_attack,
            interference: r.p_attack - r.p_t,
            pass: None,
        }
    };
    t4.iter()
        .map(|row| {
            let markov = markov_predict(
                row.p_g,
                row.observed_attack_given_good,
                row.p_b,
                row.observed_attack_given_bad,
            )?;
            let s = row.source_id.as_str();
            Ok(Table5Block {
                source_id: row.source_id.clone(),
                entries: vec![
                    published(s, ModelKind::Observed),
                    Table5Entry {
                        model: "QDB".into(),
                        origin: "computed",
                        p_t: row.p_t,
                        p_attack: row.p_attack,
                        interference: row.interference,
                        pass: Some(row.pass),
                    },
                    published(s, ModelKind::Qdb),
                    published(s, ModelKind::Bae),
                    Table5Entry {
                        model: "Markov".into(),
                        origin: "computed",
                        p_t: markov.p_total_cd,
                        p_attack: markov.p_attack_d_alone,
                        interference: markov.interference(),
                        pass: None,
                    },
                    published(s, ModelKind::MarkovBA),
                ],
            })
        })
        .collect()
}
