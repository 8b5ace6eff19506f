//! Test-only references that do not share code with the eigendecomposition path.
#![allow(dead_code)]

use qdb_core::{Complex, HermitianMatrix, SquareMatrix};

fn add(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    SquareMatrix::from_fn(a.dim(), |i, j| a.get(i, j) + b.get(i, j))
}

/// `sum_{k < terms} A^k / k!`.
pub fn taylor(a: &SquareMatrix, terms: usize) -> SquareMatrix {
    let n = a.dim();
    let mut term = SquareMatrix::identity(n);
    let mut sum = SquareMatrix::identity(n);
    for k in 1..terms {
        term = term
            .matmul(a)
            .unwrap()
            .scale(Complex::new(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    sum
}

/// `exp(-iHt)` from a 30-term power series. The argument is first scaled
/// by `2^-s` so its Frobenius norm is at most 1/2, then the result is squared
/// `s` times; the plain series is used whenever no scaling is needed.
pub fn series_exp(h: &HermitianMatrix, t: f64) -> SquareMatrix {
    let a = h.matrix().scale(Complex::new(0.0, -t));
    let norm = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let scaled = a.scale(Complex::new(1.0 / 2f64.powi(s), 0.0));
    let mut u = taylor(&scaled, 30);
    for _ in 0..s {
        u = u.matmul(&u).unwrap();
    }
    u
}

pub fn random_hermitian(rng: &mut impl rand::Rng, n: usize, scale: f64) -> HermitianMatrix {
    let mut entries = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        entries[i * n + i] = Complex::new(rng.random_range(-scale..scale), 0.0);
        for j in i + 1..n {
            let z = Complex::new(
                rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
            );
            entries[i * n + j] = z;
            entries[j * n + i] = z.conj();
        }
    }
    HermitianMatrix::new(SquareMatrix::new(n, entries).unwrap()).unwrap()
}

pub fn frobenius(h: &HermitianMatrix) -> f64 {
    h.matrix()
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
