//! Dense Hermitian kernels: eigendecomposition, propagators, PSD square roots.

use nalgebra::SymmetricEigen;

use super::{CMatrix, C64};

/// Largest entrywise modulus of `a - a^dagger`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `u^dagger u - I`.
pub fn unitary_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Spectral decomposition `A = V diag(values) V^dagger` of a Hermitian matrix,
/// eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decompose `a`. The input is symmetrised first; callers are expected to
    /// have checked Hermiticity at their own tolerance.
    pub fn new(a: &CMatrix) -> Self {
        let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
        let n = sym.nrows();
        if n == 0 {
            return HermitianEigen {
                values: Vec::new(),
                vectors: sym,
            };
        }
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        HermitianEigen { values, vectors }
    }

    /// `V f(D) V^dagger` for a complex-valued spectral function.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i A t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.map(|lam| C64::from_polar(1.0, -lam * t))
    }
}

/// Square root of a positive semidefinite matrix; negative eigenvalues from
/// rounding are clamped to zero.
pub fn sqrt_psd(a: &CMatrix) -> CMatrix {
    HermitianEigen::new(a).map(|lam| C64::new(lam.max(0.0).sqrt(), 0.0))
}

pub fn trace(a: &CMatrix) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// `A B - B A`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `A B + B A`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}
