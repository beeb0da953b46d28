//! Expectation values and the coherence/distance measures.

use super::linalg::{sqrt_psd, HermitianEigen};
use super::{c, DensityOperator, Operator, C64};
use crate::error::{Error, Result};

fn same_dims(a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(Error::dims(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// `Tr(rho O)`.
pub fn expectation(rho: &DensityOperator, obs: &Operator) -> Result<C64> {
    same_dims(rho.dims(), obs.dims())?;
    let (r, o) = (rho.matrix(), obs.matrix());
    let n = r.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += r[(i, j)] * o[(j, i)];
        }
    }
    Ok(acc)
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityOperator) -> f64 {
    // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho.
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `1/2 ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.dims(), sigma.dims())?;
    let diff = rho.matrix() - sigma.matrix();
    let eig = HermitianEigen::new(&diff);
    let d = 0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, in `[0, 1]`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dims(rho.dims(), sigma.dims())?;
    let s = sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let eig = HermitianEigen::new(&inner);
    let root: f64 = eig.values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `sum_{i != j} |rho_ij|` in the computational basis.
pub fn l1_coherence(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}
