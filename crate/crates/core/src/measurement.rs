//! Measurement operators and the pignistic split of the uncertain state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::belief::{BlockState, StateVector};
use crate::error::{QdbError, Result};

/// Probability-level weight of the uncertain state in categorize-then-decide
/// reports: the amplitude coefficient 0.5 squared.
pub const CD_UNCERTAIN_WEIGHT: f64 = 0.25;

/// Probability-level weight of the uncertain state when deciding alone: the
/// amplitude coefficient `1/sqrt(2)` squared.
pub const D_ALONE_UNCERTAIN_WEIGHT: f64 = 0.5;

const MASS_SUM_TOLERANCE: f64 = 1e-12;
const ACTION_SUM_TOLERANCE: f64 = 1e-10;

/// Diagonal operator with amplitude-level coefficients in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    diagonal: Vec<f64>,
}

impl MeasurementOperator {
    pub fn new(diagonal: Vec<f64>) -> Result<Self> {
        if let Some(&value) = diagonal.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(QdbError::InvalidProbability {
                name: "measurement coefficient",
                value,
            });
        }
        Ok(Self { diagonal })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Block-diagonal operator acting on a full belief state.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut diagonal = self.diagonal.clone();
        diagonal.extend_from_slice(&other.diagonal);
        Self { diagonal }
    }
}

/// `diag(1, 0, 0)`: picks out Attack.
pub fn attack_measurement_operator() -> MeasurementOperator {
    MeasurementOperator {
        diagonal: vec![1.0, 0.0, 0.0],
    }
}

/// `diag(0, 1, 0)`: picks out Uncertain.
pub fn uncertain_measurement_operator() -> MeasurementOperator {
    MeasurementOperator {
        diagonal: vec![0.0, 1.0, 0.0],
    }
}

/// Attack plus half the uncertain amplitude, for reports given a category.
pub fn cd_measurement_operator() -> MeasurementOperator {
    MeasurementOperator {
        diagonal: vec![1.0, 0.5, 0.0],
    }
}

/// Attack plus `1/sqrt(2)` of the uncertain amplitude, for uncategorized decisions.
pub fn d_alone_measurement_operator() -> MeasurementOperator {
    MeasurementOperator {
        diagonal: vec![1.0, std::f64::consts::FRAC_1_SQRT_2, 0.0],
    }
}

/// `||M s||^2`.
pub fn measure_probability<S: StateVector>(state: &S, op: &MeasurementOperator) -> Result<f64> {
    let amps = state.amplitudes();
    if amps.len() != op.diagonal.len() {
        return Err(QdbError::DimensionMismatch {
            expected: op.diagonal.len(),
            found: amps.len(),
        });
    }
    Ok(amps
        .iter()
        .zip(&op.diagonal)
        .map(|(z, c)| c * c * z.norm_sqr())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionProbabilities {
    pub attack: f64,
    pub uncertain: f64,
    pub withdraw: f64,
}

impl ActionProbabilities {
    pub fn new(attack: f64, uncertain: f64, withdraw: f64) -> Result<Self> {
        for (name, value) in [
            ("attack", attack),
            ("uncertain", uncertain),
            ("withdraw", withdraw),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(QdbError::InvalidProbability { name, value });
            }
        }
        let sum = attack + uncertain + withdraw;
        if (sum - 1.0).abs() > ACTION_SUM_TOLERANCE {
            return Err(QdbError::InvalidMass(format!(
                "action probabilities sum to {sum}"
            )));
        }
        Ok(Self {
            attack,
            uncertain,
            withdraw,
        })
    }

    pub fn sum(&self) -> f64 {
        self.attack + self.uncertain + self.withdraw
    }
}

pub fn action_probabilities(state: &BlockState) -> ActionProbabilities {
    ActionProbabilities {
        attack: state.attack().norm_sqr(),
        uncertain: state.uncertain().norm_sqr(),
        withdraw: state.withdraw().norm_sqr(),
    }
}

/// Reported attack probability with `uncertain_weight` of the uncertain mass
/// credited to attacking.
pub fn reported_conditional_attack(probs: &ActionProbabilities, uncertain_weight: f64) -> f64 {
    probs.attack + uncertain_weight * probs.uncertain
}

/// Even split of uncertain mass into (attack, withdraw).
pub fn split_uncertain(p_uncertain: f64) -> (f64, f64) {
    let half = 0.5 * p_uncertain;
    (half, half)
}

/// Basic probability assignment over non-empty subsets of a finite frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: BTreeSet<String>,
    masses: BTreeMap<BTreeSet<String>, f64>,
}

impl MassFunction {
    /// Frame is the union of all focal elements plus `extra_frame`.
    pub fn new<I, S>(focal: I, extra_frame: &[&str]) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let mut masses: BTreeMap<BTreeSet<String>, f64> = BTreeMap::new();
        let mut frame: BTreeSet<String> = extra_frame.iter().map(|s| s.to_string()).collect();
        for (subset, mass) in focal {
            let subset: BTreeSet<String> = subset.into_iter().map(Into::into).collect();
            if subset.is_empty() {
                return Err(QdbError::InvalidMass("empty focal element".into()));
            }
            if !(mass.is_finite() && mass >= 0.0) {
                return Err(QdbError::InvalidMass(format!(
                    "mass {mass} on {} is negative or non-finite",
                    fmt_subset(&subset)
                )));
            }
            frame.extend(subset.iter().cloned());
            *masses.entry(subset).or_insert(0.0) += mass;
        }
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(QdbError::InvalidMass(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Self { frame, masses })
    }

    pub fn frame(&self) -> &BTreeSet<String> {
        &self.frame
    }

    pub fn focal_elements(&self) -> impl Iterator<Item = (&BTreeSet<String>, f64)> {
        self.masses.iter().map(|(s, &m)| (s, m))
    }
}

fn fmt_subset(s: &BTreeSet<String>) -> String {
    let parts: Vec<&str> = s.iter().map(String::as_str).collect();
    format!("{{{}}}", parts.join(","))
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .masses
            .iter()
            .map(|(s, m)| {
                let labels: Vec<&str> = s.iter().map(String::as_str).collect();
                format!("{}:{}", labels.join(","), m)
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Parses whitespace-separated `label[,label...]:mass` pairs, e.g. `A,W:0.6 A:0.4`.
/// Error positions are 1-based character columns.
impl FromStr for MassFunction {
    type Err = QdbError;

    fn from_str(spec: &str) -> Result<Self> {
        let mut focal = Vec::new();
        let mut offset = 0;
        for token in spec.split_whitespace() {
            let start = offset + spec[offset..].find(token).expect("token comes from spec");
            offset = start + token.len();
            let column = spec[..start].chars().count() + 1;

            let (labels, mass) = token.rsplit_once(':').ok_or_else(|| QdbError::MassSpec {
                position: column,
                message: format!("expected `subset:mass`, found `{token}`"),
            })?;
            let mass_column = column + labels.chars().count() + 1;
            let mass: f64 = mass.parse().map_err(|_| QdbError::MassSpec {
                position: mass_column,
                message: format!("`{mass}` is not a number"),
            })?;

            let mut subset = BTreeSet::new();
            let mut label_column = column;
            for label in labels.split(',') {
                if label.is_empty() || label.contains(':') {
                    return Err(QdbError::MassSpec {
                        position: label_column,
                        message: format!("bad label `{label}`"),
                    });
                }
                if !subset.insert(label.to_string()) {
                    return Err(QdbError::MassSpec {
                        position: label_column,
                        message: format!("label `{label}` repeated within a subset"),
                    });
                }
                label_column += label.chars().count() + 1;
            }
            focal.push((subset, mass));
        }
        if focal.is_empty() {
            return Err(QdbError::MassSpec {
                position: 1,
                message: "no focal elements".into(),
            });
        }
        MassFunction::new(focal, &[])
    }
}

/// `bet(x) = sum over focal S containing x of m(S) / |S|`.
pub fn pignistic_transform(mass: &MassFunction) -> BTreeMap<String, f64> {
    let mut bet: BTreeMap<String, f64> = mass.frame.iter().map(|x| (x.clone(), 0.0)).collect();
    for (subset, m) in &mass.masses {
        let share = m / subset.len() as f64;
        for x in subset {
            *bet.get_mut(x).expect("focal labels are in the frame") += share;
        }
    }
    bet
}
