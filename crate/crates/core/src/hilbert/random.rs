//! Seeded random states and operators.
//!
//! All randomness in the workbench flows from [`seeded`], a ChaCha8 stream
//! generator keyed by a 64-bit seed, so fixtures are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, DensityOperator, Operator, StateVector, C64};

pub type WorkbenchRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal)) / c(std::f64::consts::SQRT_2, 0.0)
}

pub fn ginibre<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| complex_normal(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> StateVector {
    let n: usize = dims.iter().product();
    let v = CVector::from_fn(n, |_, _| complex_normal(rng));
    StateVector::normalized(dims.to_vec(), v).expect("Gaussian vector is non-zero")
}

/// Random full-rank density operator `G G^dagger / Tr`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityOperator {
    let n: usize = dims.iter().product();
    random_density_rank(dims, n, rng)
}

pub fn random_density_rank<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let n: usize = dims.iter().product();
    let g = ginibre(n, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = super::linalg::trace(&m);
    DensityOperator::hermitized(dims.to_vec(), m / tr)
}

/// Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Operator {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    let h = (&g + g.adjoint()) * c(0.5, 0.0);
    Operator::from_parts_unchecked(dims.to_vec(), h)
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Operator {
    let n: usize = dims.iter().product();
    let g = ginibre(n, n, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Operator::from_parts_unchecked(dims.to_vec(), q)
}

/// Uniform real in `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}
