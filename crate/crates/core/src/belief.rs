//! Six-dimensional belief states and the block Hamiltonian that drives them.
//!
//! Basis order is fixed everywhere as `(AG, UG, WG, AB, UB, WB)`: the first
//! three coordinates are attack / uncertain / withdraw given a "good"
//! categorization, the last three the same given "bad".

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{QdbError, Result};
use crate::linalg::{matrix_exponential_unitary, norm_squared, Complex, HermitianMatrix};

/// Norm tolerance for belief and block states.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Tolerance on `p_g + p_b = 1` for model inputs.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_TIME: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    Good,
    Bad,
}

impl Category {
    fn offset(self) -> usize {
        match self {
            Category::Good => 0,
            Category::Bad => 3,
        }
    }
}

/// Anything that can be pushed through a unitary of matching dimension.
pub trait StateVector: Sized {
    fn amplitudes(&self) -> &[Complex];

    /// Rebuild from amplitudes produced by a norm-preserving map.
    fn from_evolved(amplitudes: Vec<Complex>) -> Self;

    fn norm_squared(&self) -> f64 {
        norm_squared(self.amplitudes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState([Complex; 6]);

impl BeliefState {
    pub fn new(amplitudes: [Complex; 6]) -> Result<Self> {
        check_unit(&amplitudes)?;
        Ok(Self(amplitudes))
    }

    pub fn from_real(amplitudes: [f64; 6]) -> Result<Self> {
        Self::new(amplitudes.map(|x| Complex::new(x, 0.0)))
    }

    pub fn amplitude(&self, index: usize) -> Complex {
        self.0[index]
    }

    pub fn block(&self, category: Category) -> [Complex; 3] {
        let o = category.offset();
        [self.0[o], self.0[o + 1], self.0[o + 2]]
    }
}

impl StateVector for BeliefState {
    fn amplitudes(&self) -> &[Complex] {
        &self.0
    }

    fn from_evolved(amplitudes: Vec<Complex>) -> Self {
        Self(
            amplitudes
                .try_into()
                .expect("belief state has 6 amplitudes"),
        )
    }
}

/// Conditioned state over `(Attack, Uncertain, Withdraw)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockState([Complex; 3]);

impl BlockState {
    pub fn new(amplitudes: [Complex; 3]) -> Result<Self> {
        check_unit(&amplitudes)?;
        Ok(Self(amplitudes))
    }

    pub fn from_real(amplitudes: [f64; 3]) -> Result<Self> {
        Self::new(amplitudes.map(|x| Complex::new(x, 0.0)))
    }

    /// Equal real amplitudes `1/sqrt(3)`.
    pub fn uniform() -> Self {
        let a = Complex::new(1.0 / 3f64.sqrt(), 0.0);
        Self([a; 3])
    }

    pub fn attack(&self) -> Complex {
        self.0[0]
    }

    pub fn uncertain(&self) -> Complex {
        self.0[1]
    }

    pub fn withdraw(&self) -> Complex {
        self.0[2]
    }
}

impl StateVector for BlockState {
    fn amplitudes(&self) -> &[Complex] {
        &self.0
    }

    fn from_evolved(amplitudes: Vec<Complex>) -> Self {
        Self(amplitudes.try_into().expect("block state has 3 amplitudes"))
    }
}

fn check_unit(amplitudes: &[Complex]) -> Result<()> {
    if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
        return Err(QdbError::NonFinite { index });
    }
    let n = norm_squared(amplitudes);
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(QdbError::NotNormalized { norm_squared: n });
    }
    Ok(())
}

/// Reward parameters of the two blocks plus the deliberation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub h_g: f64,
    pub h_b: f64,
    pub t: f64,
}

impl HamiltonianParams {
    pub fn new(h_g: f64, h_b: f64, t: f64) -> Result<Self> {
        for (name, value) in [("h_g", h_g), ("h_b", h_b)] {
            if !value.is_finite() {
                return Err(QdbError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(QdbError::InvalidParameter {
                name: "t",
                value: t,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self { h_g, h_b, t })
    }

    /// Parameters at the default time `pi/2`.
    pub fn at_default_time(h_g: f64, h_b: f64) -> Result<Self> {
        Self::new(h_g, h_b, DEFAULT_TIME)
    }

    pub fn h(&self, category: Category) -> f64 {
        match category {
            Category::Good => self.h_g,
            Category::Bad => self.h_b,
        }
    }
}

pub fn uniform_initial_state() -> BeliefState {
    let a = Complex::new(1.0 / 6f64.sqrt(), 0.0);
    BeliefState([a; 6])
}

pub(crate) fn validate_priors(p_g: f64, p_b: f64) -> Result<()> {
    for (name, value) in [("p_g", p_g), ("p_b", p_b)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(QdbError::InvalidProbability { name, value });
        }
    }
    if (p_g + p_b - 1.0).abs() > PRIOR_SUM_TOLERANCE {
        return Err(QdbError::InvalidPriors { p_g, p_b });
    }
    Ok(())
}

/// Real state with block totals `p_g`, `p_b` spread evenly within each block.
pub fn initial_state_from_priors(p_g: f64, p_b: f64) -> Result<BeliefState> {
    validate_priors(p_g, p_b)?;
    // Renormalize so the state is exactly unit even when the priors are only
    // within tolerance of summing to one.
    let total = p_g + p_b;
    let g = Complex::new((p_g / total / 3.0).sqrt(), 0.0);
    let b = Complex::new((p_b / total / 3.0).sqrt(), 0.0);
    Ok(BeliefState([g, g, g, b, b, b]))
}

pub fn condition_on_category(state: &BeliefState, category: Category) -> Result<BlockState> {
    let block = state.block(category);
    let weight = norm_squared(&block);
    if weight == 0.0 {
        return Err(QdbError::ZeroBlock(category));
    }
    let scale = 1.0 / weight.sqrt();
    Ok(BlockState(block.map(|z| z * scale)))
}

/// `(P(G), P(B))` as the squared norms of the two blocks.
pub fn block_weights(state: &BeliefState) -> (f64, f64) {
    (
        norm_squared(&state.block(Category::Good)),
        norm_squared(&state.block(Category::Bad)),
    )
}

/// `[[h, 0, 1], [0, 1, 0], [1, 0, -h]]` in (Attack, Uncertain, Withdraw) order.
pub fn build_block_hamiltonian(h: f64) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(&[&[h, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, -h]])
        .expect("block Hamiltonian is real symmetric")
}

pub fn build_full_hamiltonian(params: &HamiltonianParams) -> HermitianMatrix {
    build_block_hamiltonian(params.h_g).direct_sum(&build_block_hamiltonian(params.h_b))
}

/// `exp(-i H t) * state`.
pub fn evolve<S: StateVector>(state: &S, hamiltonian: &HermitianMatrix, t: f64) -> Result<S> {
    let n = state.amplitudes().len();
    if hamiltonian.dim() != n {
        return Err(QdbError::DimensionMismatch {
            expected: n,
            found: hamiltonian.dim(),
        });
    }
    let u = matrix_exponential_unitary(hamiltonian, t)?;
    Ok(S::from_evolved(u.apply(state.amplitudes())?))
}
