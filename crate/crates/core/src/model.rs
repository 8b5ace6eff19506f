//! End-to-end predictions, the Markov baseline and parameter fitting.
//!
//! The Hamiltonian and the measurement operators are block diagonal, so each
//! category is an independent three-state problem. A reported conditional is
//! the attack probability of the evolved, uniformly initialized block plus a
//! fixed share of its uncertain probability (0.25 after categorizing, 0.5
//! when deciding alone).

use serde::{Deserialize, Serialize};

use crate::belief::{
    build_block_hamiltonian, evolve, validate_priors, BlockState, HamiltonianParams, DEFAULT_TIME,
};
use crate::error::{QdbError, Result};
use crate::measurement::{
    action_probabilities, reported_conditional_attack, ActionProbabilities, CD_UNCERTAIN_WEIGHT,
    D_ALONE_UNCERTAIN_WEIGHT,
};
use crate::search::GridSearch;

/// A block fit whose residual exceeds this is flagged as clamped.
pub const CLAMP_RESIDUAL: f64 = 1e-6;

/// Uncertain-state weights for the two experimental conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementWeights {
    pub categorized: f64,
    pub decision_alone: f64,
}

impl Default for MeasurementWeights {
    fn default() -> Self {
        Self {
            categorized: CD_UNCERTAIN_WEIGHT,
            decision_alone: D_ALONE_UNCERTAIN_WEIGHT,
        }
    }
}

/// Everything a fit or prediction can be tuned by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub time: f64,
    pub weights: MeasurementWeights,
    pub search: GridSearch,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            time: DEFAULT_TIME,
            weights: MeasurementWeights::default(),
            search: GridSearch::default(),
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        for (name, value) in [("w_cd", w.categorized), ("w_d", w.decision_alone)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(QdbError::InvalidParameter {
                    name,
                    value,
                    reason: "weight must lie in [0, 1]",
                });
            }
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(QdbError::InvalidParameter {
                name: "t",
                value: self.time,
                reason: "must be finite and non-negative",
            });
        }
        let s = &self.search;
        if !(s.step.is_finite() && s.step > 0.0) {
            return Err(QdbError::InvalidParameter {
                name: "grid_step",
                value: s.step,
                reason: "must be positive",
            });
        }
        if !(s.lower.is_finite() && s.upper.is_finite() && s.lower <= s.upper) {
            return Err(QdbError::InvalidParameter {
                name: "h_max",
                value: s.upper,
                reason: "h range must be finite with h_min <= h_max",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub p_attack_given_good: f64,
    pub p_attack_given_bad: f64,
    pub p_uncertain_given_good: f64,
    pub p_uncertain_given_bad: f64,
    pub p_total_cd: f64,
    pub p_attack_d_alone: f64,
    pub interference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockFit {
    pub h: f64,
    /// Reported conditional at the fitted `h`.
    pub fitted: f64,
    pub residual: f64,
}

impl BlockFit {
    /// The target could not be matched within [`CLAMP_RESIDUAL`].
    pub fn clamped(&self) -> bool {
        self.residual > CLAMP_RESIDUAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedModel {
    pub params: HamiltonianParams,
    pub residual_good: f64,
    pub residual_bad: f64,
    pub prediction: Prediction,
}

impl FittedModel {
    pub fn clamped(&self) -> bool {
        self.residual_good > CLAMP_RESIDUAL || self.residual_bad > CLAMP_RESIDUAL
    }
}

/// Action probabilities of a uniformly initialized block after evolving
/// under `build_block_hamiltonian(h)` for time `t`.
pub fn block_action_probabilities(h: f64, t: f64) -> ActionProbabilities {
    let evolved = evolve(&BlockState::uniform(), &build_block_hamiltonian(h), t)
        .expect("block state and block Hamiltonian are both 3-dimensional");
    action_probabilities(&evolved)
}

pub fn qdb_conditional(h: f64, t: f64, uncertain_weight: f64) -> f64 {
    reported_conditional_attack(&block_action_probabilities(h, t), uncertain_weight)
}

/// Analytic form of [`qdb_conditional`] at `t = pi/2`.
///
/// Uncertain is decoupled and keeps probability 1/3. Attack and Withdraw form
/// the 2x2 generator `A = [[h, 1], [1, -h]]` with `A^2 = (1 + h^2) I`, so
/// `exp(-iAt) = cos(lt) I - i sin(lt) A / l` with `l = sqrt(1 + h^2)`. From
/// equal amplitudes the attack amplitude is
/// `(cos(lt) - i sin(lt) (1 + h) / l) / sqrt(3)`.
pub fn closed_form_conditional(h: f64, uncertain_weight: f64) -> f64 {
    let lambda = (1.0 + h * h).sqrt();
    let phase = lambda * DEFAULT_TIME;
    let (s, c) = phase.sin_cos();
    let mix = (1.0 + h) / lambda;
    uncertain_weight / 3.0 + (c * c + s * s * mix * mix) / 3.0
}

pub fn predict(p_g: f64, p_b: f64, params: &HamiltonianParams) -> Result<Prediction> {
    predict_with(p_g, p_b, params, &MeasurementWeights::default())
}

pub fn predict_with(
    p_g: f64,
    p_b: f64,
    params: &HamiltonianParams,
    weights: &MeasurementWeights,
) -> Result<Prediction> {
    validate_priors(p_g, p_b)?;
    let good = block_action_probabilities(params.h_g, params.t);
    let bad = block_action_probabilities(params.h_b, params.t);

    let p_total_cd = p_g * reported_conditional_attack(&good, weights.categorized)
        + p_b * reported_conditional_attack(&bad, weights.categorized);
    let p_attack_d_alone = p_g * reported_conditional_attack(&good, weights.decision_alone)
        + p_b * reported_conditional_attack(&bad, weights.decision_alone);

    Ok(Prediction {
        p_attack_given_good: reported_conditional_attack(&good, weights.categorized),
        p_attack_given_bad: reported_conditional_attack(&bad, weights.categorized),
        p_uncertain_given_good: good.uncertain,
        p_uncertain_given_bad: bad.uncertain,
        p_total_cd,
        p_attack_d_alone,
        interference: p_attack_d_alone - p_total_cd,
    })
}

/// Law of total probability; the Markov model predicts the same value for
/// deciding alone, so it never shows interference.
pub fn markov_total_probability(
    p_g: f64,
    p_attack_given_good: f64,
    p_b: f64,
    p_attack_given_bad: f64,
) -> Result<f64> {
    validate_priors(p_g, p_b)?;
    for (name, value) in [
        ("p_attack_given_good", p_attack_given_good),
        ("p_attack_given_bad", p_attack_given_bad),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(QdbError::InvalidProbability { name, value });
        }
    }
    Ok(p_g * p_attack_given_good + p_b * p_attack_given_bad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovPrediction {
    pub p_total_cd: f64,
    pub p_attack_d_alone: f64,
}

impl MarkovPrediction {
    pub fn interference(&self) -> f64 {
        self.p_attack_d_alone - self.p_total_cd
    }
}

pub fn markov_predict(
    p_g: f64,
    p_attack_given_good: f64,
    p_b: f64,
    p_attack_given_bad: f64,
) -> Result<MarkovPrediction> {
    let p = markov_total_probability(p_g, p_attack_given_good, p_b, p_attack_given_bad)?;
    Ok(MarkovPrediction {
        p_total_cd: p,
        p_attack_d_alone: p,
    })
}

pub fn fit_block_param(target: f64, uncertain_weight: f64) -> BlockFit {
    fit_block_param_with(
        target,
        uncertain_weight,
        DEFAULT_TIME,
        &GridSearch::default(),
    )
}

/// Least-squares fit of `h` so the reported conditional matches `target`.
///
/// The search runs on `|conditional - target|`, which has the same minimizers
/// as the squared error but keeps the tie tolerance on the residual's scale.
pub fn fit_block_param_with(
    target: f64,
    uncertain_weight: f64,
    t: f64,
    search: &GridSearch,
) -> BlockFit {
    let best = search.minimize(|h| (qdb_conditional(h, t, uncertain_weight) - target).abs());
    let fitted = qdb_conditional(best.x, t, uncertain_weight);
    BlockFit {
        h: best.x,
        fitted,
        residual: (fitted - target).abs(),
    }
}

pub fn fit_experiment(
    p_g: f64,
    p_b: f64,
    observed_attack_given_good: f64,
    observed_attack_given_bad: f64,
) -> Result<FittedModel> {
    fit_experiment_with(
        p_g,
        p_b,
        observed_attack_given_good,
        observed_attack_given_bad,
        &ModelConfig::default(),
    )
}

/// Fits `h_g` and `h_b` independently, then predicts with the fitted pair.
///
/// Priors are renormalized to sum to one, since published rows are rounded.
pub fn fit_experiment_with(
    p_g: f64,
    p_b: f64,
    observed_attack_given_good: f64,
    observed_attack_given_bad: f64,
    config: &ModelConfig,
) -> Result<FittedModel> {
    config.validate()?;
    for (name, value) in [
        ("p_g", p_g),
        ("p_b", p_b),
        ("p_attack_given_good", observed_attack_given_good),
        ("p_attack_given_bad", observed_attack_given_bad),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(QdbError::InvalidProbability { name, value });
        }
    }
    let total = p_g + p_b;
    if total <= 0.0 {
        return Err(QdbError::InvalidPriors { p_g, p_b });
    }
    let (p_g, p_b) = (p_g / total, p_b / total);

    let w = config.weights.categorized;
    let good = fit_block_param_with(observed_attack_given_good, w, config.time, &config.search);
    let bad = fit_block_param_with(observed_attack_given_bad, w, config.time, &config.search);
    let params = HamiltonianParams::new(good.h, bad.h, config.time)?;
    let prediction = predict_with(p_g, p_b, &params, &config.weights)?;
    Ok(FittedModel {
        params,
        residual_good: good.residual,
        residual_bad: bad.residual,
        prediction,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    #[test]
    fn conditional_examples() {
        assert!((qdb_conditional(0.0, FRAC_PI_2, 0.25) - 5.0 / 12.0).abs() < 1e-12);
        assert!((qdb_conditional(0.0, 0.0, 0.25) - 5.0 / 12.0).abs() < 1e-12);
        // Cross-checked against an independent Pade-based expm.
        assert!((qdb_conditional(1.0, FRAC_PI_2, 0.25) - 0.627_709_223_673_569).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        assert!((closed_form_conditional(0.0, 0.25) - 5.0 / 12.0).abs() < 1e-15);
        let expected = (2f64.sqrt() * FRAC_PI_2).cos().powi(2) / 3.0;
        assert!((closed_form_conditional(-1.0, 0.0) - expected).abs() < 1e-15);
        assert!((expected - 0.122_290_776_326_431).abs() < 1e-12);
    }

    #[test]
    fn predict_symmetric() {
        let p = predict(
            0.5,
            0.5,
            &HamiltonianParams::at_default_time(0.0, 0.0).unwrap(),
        )
        .unwrap();
        assert!((p.p_total_cd - 5.0 / 12.0).abs() < 1e-12);
        assert!((p.p_attack_d_alone - 0.5).abs() < 1e-12);
        assert!((p.interference - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(p.interference, p.p_attack_d_alone - p.p_total_cd);
    }

    #[test]
    fn predict_rejects_bad_priors() {
        let params = HamiltonianParams::at_default_time(0.0, 0.0).unwrap();
        assert!(matches!(
            predict(0.5, 0.6, &params),
            Err(QdbError::InvalidPriors { .. })
        ));
    }

    #[test]
    fn markov_examples() {
        assert!((markov_total_probability(0.17, 0.41, 0.83, 0.63).unwrap() - 0.5926).abs() < 1e-12);
        assert_eq!(markov_total_probability(1.0, 0.3, 0.0, 0.9).unwrap(), 0.3);
        assert!((markov_total_probability(0.5, 0.4, 0.5, 0.6).unwrap() - 0.5).abs() < 1e-15);
        let m = markov_predict(0.17, 0.41, 0.83, 0.63).unwrap();
        assert_eq!(m.interference(), 0.0);
        assert!(markov_total_probability(0.5, 1.4, 0.5, 0.6).is_err());
    }

    #[test]
    fn fit_examples() {
        let f = fit_block_param(5.0 / 12.0, 0.25);
        assert!(f.h.abs() < 1e-6, "{f:?}");
        assert!(f.residual < 1e-9);

        let f = fit_block_param(0.41, 0.25);
        assert!(f.residual < 1e-9 && (f.fitted - 0.41).abs() < 1e-9);

        let f = fit_block_param(0.63, 0.25);
        assert!((f.fitted - 0.63).abs() < 1e-6);
        assert!(!f.clamped());
    }

    #[test]
    fn unreachable_target_is_clamped() {
        let grid: Vec<f64> = (0..=20_000)
            .map(|i| closed_form_conditional(-10.0 + i as f64 * 1e-3, 0.25))
            .collect();
        let max = grid.iter().copied().fold(f64::MIN, f64::max);
        let min = grid.iter().copied().fold(f64::MAX, f64::min);

        let f = fit_block_param(0.95, 0.25);
        assert!(f.clamped());
        assert!(f.fitted >= max - 1e-9, "{f:?} vs {max}");
        let f = fit_block_param(0.0, 0.25);
        assert!(f.clamped());
        assert!(f.fitted <= min + 1e-9, "{f:?} vs {min}");
    }

    #[test]
    fn fit_townsend() {
        let m = fit_experiment(0.17, 0.83, 0.41, 0.63).unwrap();
        assert!((m.prediction.p_total_cd - 0.5923).abs() <= 0.004);
        assert!((m.prediction.p_attack_d_alone - 0.6756).abs() <= 0.004);
        assert!((m.prediction.p_total_cd - 0.5926).abs() < 1e-5);
        assert!((m.prediction.p_attack_d_alone - 0.6759).abs() < 1e-4);
        assert!(!m.clamped());
    }

    #[test]
    fn fit_average() {
        let m = fit_experiment(0.21, 0.79, 0.39, 0.62).unwrap();
        assert!((m.prediction.p_total_cd - 0.5721).abs() <= 0.004);
        assert!((m.prediction.p_attack_d_alone - 0.6554).abs() <= 0.004);
    }

    #[test]
    fn fit_synthetic_round_trip() {
        let target = qdb_conditional(1.7, FRAC_PI_2, 0.25);
        let f = fit_block_param(target, 0.25);
        assert!((f.fitted - target).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let mut c = ModelConfig::default();
        assert!(c.validate().is_ok());
        c.weights.categorized = 1.5;
        assert!(c.validate().is_err());
        let mut c = ModelConfig::default();
        c.search.step = 0.0;
        assert!(c.validate().is_err());
        let c = ModelConfig {
            time: -1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
