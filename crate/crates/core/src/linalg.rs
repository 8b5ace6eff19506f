//! Small dense complex linear algebra.
//!
//! Everything here is sized for the belief model (3x3 and 6x6 operators), so
//! matrices are plain row-major `Vec`s. The matrix exponential of a Hermitian
//! generator goes through a cyclic Jacobi eigendecomposition of a real
//! symmetric matrix: real generators are decomposed directly, complex ones
//! through their `2n x 2n` real embedding.

use std::fmt;

use num_complex::Complex64;

use crate::error::{QdbError, Result};

pub type Complex = Complex64;

/// Absolute tolerance for `H[i][j] == conj(H[j][i])`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Maximum entry deviation of `U^H U` from the identity.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Sum of squared moduli.
pub fn norm_squared(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|z| !z.is_finite()) {
            return Err(QdbError::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex> {
        self.0
    }

    pub fn norm_squared(&self) -> f64 {
        norm_squared(&self.0)
    }
}

/// Row-major `n x n` complex matrix with no structural guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

impl SquareMatrix {
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QdbError::NotSquare { len: entries.len() });
        }
        if let Some(index) = entries.iter().position(|z| !z.is_finite()) {
            return Err(QdbError::NonFinite { index });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a real matrix from rows; all rows must have the same length as
    /// the row count.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<Complex> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex::new(x, 0.0)))
            .collect();
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if rhs.dim != self.dim {
            return Err(QdbError::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.dim {
            return Err(QdbError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|k| self.get(i, k) * v[k]).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn hermiticity_defect(&self) -> Option<(usize, usize, f64)> {
        let n = self.dim;
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if worst.map_or(true, |(_, _, w)| d > w) {
                    worst = Some((i, j, d));
                }
            }
        }
        worst
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(SquareMatrix);

impl HermitianMatrix {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        if let Some((row, col, deviation)) = matrix.hermiticity_defect() {
            if deviation > HERMITIAN_TOLERANCE {
                return Err(QdbError::NotHermitian {
                    row,
                    col,
                    deviation,
                });
            }
        }
        Ok(Self(matrix))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(SquareMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.0.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.entries.iter().all(|z| z.im == 0.0)
    }

    /// Block-diagonal assembly `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let zero = Complex::new(0.0, 0.0);
        Self(SquareMatrix::from_fn(n + m, |i, j| match (i < n, j < n) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - n, j - n),
            _ => zero,
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(SquareMatrix);

impl UnitaryMatrix {
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        let defect = unitarity_defect(&matrix);
        if defect.is_nan() || defect >= UNITARY_TOLERANCE {
            return Err(QdbError::InvalidParameter {
                name: "unitarity defect",
                value: defect,
                reason: "U^H U deviates from the identity",
            });
        }
        Ok(Self(matrix))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.0.get(row, col)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        self.0.apply(v)
    }

    /// `max |(U^H U - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }
}

fn unitarity_defect(m: &SquareMatrix) -> f64 {
    let n = m.dim;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..n {
                acc += m.get(k, i).conj() * m.get(k, j);
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// `T_ij = |U_ij|^2`; doubly stochastic when `U` is unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

pub fn transition_matrix(u: &UnitaryMatrix) -> TransitionMatrix {
    TransitionMatrix {
        dim: u.dim(),
        entries: u.0.entries.iter().map(|z| z.norm_sqr()).collect(),
    }
}

/// Eigenpairs of a real symmetric matrix. `vectors` is row-major with the
/// k-th eigenvector in column k.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

/// Cyclic Jacobi eigendecomposition of the row-major symmetric matrix `a`.
pub fn symmetric_eigen(a: &[f64], n: usize) -> SymmetricEigen {
    assert_eq!(a.len(), n * n, "symmetric_eigen: bad shape");
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            break;
        }

        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Once converging, drop entries below the diagonal's resolution.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }

                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: v,
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn matrix_exponential_unitary(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    if !t.is_finite() {
        return Err(QdbError::InvalidParameter {
            name: "t",
            value: t,
            reason: "evolution time must be finite",
        });
    }
    let n = h.dim();
    if h.is_real() {
        let real: Vec<f64> = h.0.entries.iter().map(|z| z.re).collect();
        let eig = symmetric_eigen(&real, n);
        let phases: Vec<Complex> = eig
            .values
            .iter()
            .map(|&lambda| Complex::from_polar(1.0, -lambda * t))
            .collect();
        let vec = &eig.vectors;
        let u = SquareMatrix::from_fn(n, |j, k| {
            (0..n)
                .map(|m| phases[m] * (vec[j * n + m] * vec[k * n + m]))
                .sum()
        });
        return Ok(UnitaryMatrix(u));
    }

    // Real embedding [[A, -B], [B, A]] of H = A + iB. Functions of the
    // embedding keep that block form, so cos(Ht) and sin(Ht) can be read off
    // its blocks and exp(-iHt) = cos(Ht) - i sin(Ht).
    let m = 2 * n;
    let mut embed = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            embed[i * m + j] = z.re;
            embed[(i + n) * m + (j + n)] = z.re;
            embed[i * m + (j + n)] = -z.im;
            embed[(i + n) * m + j] = z.im;
        }
    }
    let eig = symmetric_eigen(&embed, m);
    let cos: Vec<f64> = eig.values.iter().map(|&l| (l * t).cos()).collect();
    let sin: Vec<f64> = eig.values.iter().map(|&l| (l * t).sin()).collect();
    let vec = &eig.vectors;
    let apply = |coef: &[f64], r: usize, c: usize| -> f64 {
        (0..m)
            .map(|k| coef[k] * vec[r * m + k] * vec[c * m + k])
            .sum()
    };
    let u = SquareMatrix::from_fn(n, |j, k| {
        let cos_re = apply(&cos, j, k);
        let cos_im = apply(&cos, j + n, k);
        let sin_re = apply(&sin, j, k);
        let sin_im = apply(&sin, j + n, k);
        Complex::new(cos_re + sin_im, cos_im - sin_re)
    });
    Ok(UnitaryMatrix(u))
}
