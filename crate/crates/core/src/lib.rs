//! Quantum dynamic belief (QDB) model of how categorizing a stimulus
//! interferes with the decision that follows it.
//!
//! A participant's belief is a unit vector over six states: attack, uncertain
//! or withdraw, each given a "good" or "bad" categorization. Categorizing
//! collapses the state onto one block; deliberation evolves it unitarily
//! under a block-diagonal Hamiltonian; the final decision splits the
//! uncertain probability between attacking and withdrawing. Because that
//! split is weighted differently with and without an explicit categorization
//! step, the model violates the law of total probability that a Markov
//! baseline obeys.
//!
//! ```
//! use qdb_core::{fit_experiment, embedded_experiment, FaceType};
//!
//! let r = embedded_experiment("Townsend2000", FaceType::Narrow).unwrap();
//! let fit = fit_experiment(r.p_g, r.p_b, r.p_attack_given_good, r.p_attack_given_bad).unwrap();
//! assert!((fit.prediction.interference - 1.0 / 12.0).abs() < 1e-9);
//! ```

pub mod belief;
pub mod cli;
pub mod data;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod report;
pub mod search;

pub use belief::{
    block_weights, build_block_hamiltonian, build_full_hamiltonian, condition_on_category, evolve,
    initial_state_from_priors, uniform_initial_state, BeliefState, BlockState, Category,
    HamiltonianParams, StateVector, DEFAULT_TIME,
};
pub use data::{
    embedded_experiment, embedded_experiments, embedded_reference, embedded_references,
    export_results, load_experiments, ExperimentRecord, FaceType, FileFormat, FitResult, ModelKind,
    ReferenceValues,
};
pub use error::{QdbError, Result};
pub use linalg::{
    matrix_exponential_unitary, norm_squared, transition_matrix, Complex, ComplexVector,
    HermitianMatrix, SquareMatrix, TransitionMatrix, UnitaryMatrix,
};
pub use measurement::{
    action_probabilities, cd_measurement_operator, d_alone_measurement_operator,
    measure_probability, pignistic_transform, reported_conditional_attack, split_uncertain,
    ActionProbabilities, MassFunction, MeasurementOperator,
};
pub use model::{
    closed_form_conditional, fit_block_param, fit_experiment, markov_total_probability, predict,
    qdb_conditional, BlockFit, FittedModel, MeasurementWeights, ModelConfig, Prediction,
};
