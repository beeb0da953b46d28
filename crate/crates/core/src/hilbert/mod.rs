//! Finite-dimensional Hilbert spaces: states, operators, density operators,
//! tensor composition, partial traces and the coherence/distance measures the
//! rest of the workbench is built on.
//!
//! Subsystems are ordered big-endian: subsystem 0 is the leftmost tensor
//! factor and the most significant digit of a flat basis index. `hbar = 1`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub mod linalg;
pub mod measures;
pub mod random;
pub mod wire;

pub use linalg::HermitianEigen;
pub use measures::{expectation, fidelity, l1_coherence, purity, trace_distance};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Normalisation tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unit-trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for the positive-semidefinite check.
pub const PSD_FLOOR: f64 = -1e-10;
/// Unitarity tolerance for propagators and circuit pieces.
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::InvalidSubsystems("dims must list at least one subsystem".into()));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidSubsystems(format!("subsystem {pos} has dimension 0")));
    }
    Ok(dims.iter().product())
}

/// A normalised pure state on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: CVector,
}

impl StateVector {
    /// Wraps `amps`, requiring unit norm within [`NORM_TOL`].
    pub fn new(dims: Vec<usize>, amps: CVector) -> Result<Self> {
        let n = check_dims(&dims)?;
        if amps.len() != n {
            return Err(Error::dims(format!(
                "{} amplitudes for composite dimension {n}",
                amps.len()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(StateVector { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: Vec<usize>, amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero or non-finite vector".into()));
        }
        Self::new(dims, amps.unscale(norm))
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n = check_dims(&dims)?;
        if index >= n {
            return Err(Error::param("index", format!("{index} out of range for dimension {n}")));
        }
        let mut amps = CVector::zeros(n);
        amps[index] = c(1.0, 0.0);
        Ok(StateVector { dims, amps })
    }

    /// `n`-qubit basis state labelled by a bit string such as `"010"`.
    pub fn qubits(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for ch in bits.chars() {
            index = index * 2
                + match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::param("bits", format!("unexpected character {other:?}")))
                    }
                };
        }
        Self::basis(vec![2; bits.len()], index)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amps: CVector) -> Self {
        StateVector { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::dims(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `op |self>`; the result must stay normalised (use for unitaries).
    pub fn apply(&self, op: &Operator) -> Result<StateVector> {
        if op.dims != self.dims {
            return Err(Error::dims(format!(
                "operator dims {:?} vs state dims {:?}",
                op.dims, self.dims
            )));
        }
        StateVector::new(self.dims.clone(), &op.mat * &self.amps)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            dims: concat(&self.dims, &other.dims),
            amps: self.amps.kronecker(&other.amps),
        }
    }
}

/// A square operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl Operator {
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let n = check_dims(&dims)?;
        if mat.nrows() != mat.ncols() {
            return Err(Error::dims(format!("operator is {}x{}", mat.nrows(), mat.ncols())));
        }
        if mat.nrows() != n {
            return Err(Error::dims(format!(
                "operator side {} for composite dimension {n}",
                mat.nrows()
            )));
        }
        Ok(Operator { dims, mat })
    }

    /// Single-subsystem operator with `dims = [side]`.
    pub fn single(mat: CMatrix) -> Result<Self> {
        let n = mat.nrows();
        Self::new(vec![n], mat)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mat: CMatrix) -> Self {
        Operator { dims, mat }
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        Ok(Operator { dims, mat: CMatrix::identity(n, n) })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        Ok(Operator { dims, mat: CMatrix::zeros(n, n) })
    }

    /// Real diagonal operator.
    pub fn diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let n = check_dims(&dims)?;
        if diag.len() != n {
            return Err(Error::dims(format!("{} diagonal entries for dimension {n}", diag.len())));
        }
        let mut mat = CMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = c(d, 0.0);
        }
        Ok(Operator { dims, mat })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn adjoint(&self) -> Operator {
        Operator { dims: self.dims.clone(), mat: self.mat.adjoint() }
    }

    pub fn scale(&self, k: C64) -> Operator {
        Operator { dims: self.dims.clone(), mat: &self.mat * k }
    }

    pub fn scale_real(&self, k: f64) -> Operator {
        self.scale(c(k, 0.0))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        linalg::unitary_deviation(&self.mat) <= tol
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let dev = linalg::unitary_deviation(&self.mat);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator {
            dims: concat(&self.dims, &other.dims),
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Places `local` on subsystem `site` of a space with subsystem `dims`,
    /// identity elsewhere.
    pub fn embed(local: &Operator, site: usize, dims: &[usize]) -> Result<Operator> {
        check_dims(dims)?;
        if site >= dims.len() {
            return Err(Error::InvalidSubsystems(format!(
                "site {site} out of range for {} subsystems",
                dims.len()
            )));
        }
        if local.dim() != dims[site] {
            return Err(Error::dims(format!(
                "local operator side {} on subsystem of dimension {}",
                local.dim(),
                dims[site]
            )));
        }
        let mut acc: Option<Operator> = None;
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == site {
                Operator::single(local.mat.clone())?
            } else {
                Operator::identity(vec![d])?
            };
            acc = Some(match acc {
                None => factor,
                Some(a) => a.tensor(&factor),
            });
        }
        Ok(acc.expect("dims non-empty"))
    }

    /// `exp(-i H t)` via the Hermitian eigendecomposition of `self`.
    pub fn propagator(&self, t: f64) -> Result<Operator> {
        self.ensure_hermitian()?;
        let eig = HermitianEigen::new(&self.mat);
        Ok(Operator { dims: self.dims.clone(), mat: eig.propagator(t) })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        self.assert_same(other);
        Operator {
            dims: self.dims.clone(),
            mat: linalg::commutator(&self.mat, &other.mat),
        }
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Spectral norm of a Hermitian operator (largest |eigenvalue|).
    pub fn hermitian_norm(&self) -> f64 {
        HermitianEigen::new(&self.mat)
            .values
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Partial trace keeping subsystems `keep` (in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let (kept_dims, mat) = partial_trace_matrix(&self.mat, &self.dims, keep)?;
        Ok(Operator { dims: kept_dims, mat })
    }

    fn assert_same(&self, other: &Operator) {
        assert_eq!(self.dims, other.dims, "operator dimension mismatch");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same(rhs);
        Operator { dims: self.dims.clone(), mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same(rhs);
        Operator { dims: self.dims.clone(), mat: &self.mat - &rhs.mat }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same(rhs);
        Operator { dims: self.dims.clone(), mat: &self.mat * &rhs.mat }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { dims: self.dims.clone(), mat: -&self.mat }
    }
}

/// A Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityOperator {
    /// Validates all three density-operator invariants. Eigenvalues in
    /// `[PSD_FLOOR, 0)` are accepted as rounding noise.
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let op = Operator::new(dims, mat)?;
        let rho = DensityOperator { dims: op.dims, mat: op.mat };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitian-symmetrises and renormalises `mat`, clamping eigenvalues in
    /// `[PSD_FLOOR, 0)` to zero. Larger negative eigenvalues are an error.
    pub fn normalize(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let op = Operator::new(dims, mat)?;
        let eig = HermitianEigen::new(&op.mat);
        let tr: f64 = eig.values.iter().sum();
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        if let Some(&low) = eig.values.first() {
            if low / tr < PSD_FLOOR {
                return Err(Error::InvalidState(format!(
                    "eigenvalue {:.3e} below floor {PSD_FLOOR:e}",
                    low / tr
                )));
            }
        }
        let mat = eig.map(|lam| c(lam.max(0.0) / tr, 0.0));
        Ok(DensityOperator { dims: op.dims, mat })
    }

    /// Symmetrises an integrator output without re-validating it.
    pub(crate) fn hermitized(dims: Vec<usize>, mat: CMatrix) -> Self {
        let mat = (&mat + mat.adjoint()) * c(0.5, 0.0);
        DensityOperator { dims, mat }
    }

    pub fn pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        Ok(DensityOperator { dims, mat: CMatrix::identity(n, n) / c(n as f64, 0.0) })
    }

    /// Checks Hermiticity, unit trace and the eigenvalue floor.
    pub fn validate(&self) -> Result<()> {
        let dev = linalg::hermitian_deviation(&self.mat);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = linalg::trace(&self.mat);
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let low = self.min_eigenvalue();
        if low < PSD_FLOOR {
            return Err(Error::InvalidState(format!(
                "eigenvalue {low:.3e} below floor {PSD_FLOOR:e}"
            )));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        HermitianEigen::new(&self.mat).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn as_operator(&self) -> Operator {
        Operator { dims: self.dims.clone(), mat: self.mat.clone() }
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            dims: concat(&self.dims, &other.dims),
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Reduced state on subsystems `keep`. The result lists the kept
    /// subsystems in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let (dims, mat) = partial_trace_matrix(&self.mat, &self.dims, keep)?;
        Ok(DensityOperator { dims, mat })
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &Operator) -> Result<DensityOperator> {
        if u.dims != self.dims {
            return Err(Error::dims(format!(
                "operator dims {:?} vs state dims {:?}",
                u.dims, self.dims
            )));
        }
        Ok(DensityOperator::hermitized(
            self.dims.clone(),
            &u.mat * &self.mat * u.mat.adjoint(),
        ))
    }
}

/// Kronecker composition; `dims` concatenate and norms/traces multiply.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector::tensor(self, other)
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Operator::tensor(self, other)
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        DensityOperator::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Free-function form of [`DensityOperator::partial_trace`].
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

/// `exp(-i H t)`; `h` must be Hermitian.
pub fn matrix_exp(h: &Operator, t: f64) -> Result<Operator> {
    h.propagator(t)
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b.iter()).copied().collect()
}

/// Mixed-radix digits of `index` for subsystem `dims` (big-endian).
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub(crate) fn partial_trace_matrix(
    mat: &CMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<(Vec<usize>, CMatrix)> {
    if keep.is_empty() {
        return Err(Error::InvalidSubsystems("keep set is empty".into()));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidSubsystems(format!(
            "index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = traced_dims.iter().product();

    // Stride of each subsystem in the flat index.
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |sel: &[usize], sel_dims: &[usize], idx: usize| -> usize {
        digits(idx, sel_dims)
            .iter()
            .zip(sel)
            .map(|(d, &k)| d * strides[k])
            .sum()
    };
    let kept_off: Vec<usize> = (0..nk).map(|i| offset(&keep, &kept_dims, i)).collect();
    let traced_off: Vec<usize> = (0..nt).map(|i| offset(&traced, &traced_dims, i)).collect();

    let mut out = CMatrix::zeros(nk, nk);
    for r in 0..nk {
        for col in 0..nk {
            let mut acc = c(0.0, 0.0);
            for &t in &traced_off {
                acc += mat[(kept_off[r] + t, kept_off[col] + t)];
            }
            out[(r, col)] = acc;
        }
    }
    Ok((kept_dims, out))
}

/// Pauli matrices, ladder operators and a few standard gates.
pub mod pauli {
    use super::{c, CMatrix, Operator};

    fn op2(m: [[(f64, f64); 2]; 2]) -> Operator {
        let mat = CMatrix::from_fn(2, 2, |i, j| c(m[i][j].0, m[i][j].1));
        Operator::from_parts_unchecked(vec![2], mat)
    }

    pub fn identity() -> Operator {
        op2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]])
    }

    pub fn x() -> Operator {
        op2([[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]])
    }

    pub fn y() -> Operator {
        op2([[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]])
    }

    pub fn z() -> Operator {
        op2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]])
    }

    /// `|0><1|`: the jump operator for an excited `|1>` decaying into `|0>`.
    pub fn lowering() -> Operator {
        op2([[(0.0, 0.0), (1.0, 0.0)], [(0.0, 0.0), (0.0, 0.0)]])
    }

    /// `|1><0|`.
    pub fn raising() -> Operator {
        lowering().adjoint()
    }

    pub fn hadamard() -> Operator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        op2([[(s, 0.0), (s, 0.0)], [(s, 0.0), (-s, 0.0)]])
    }

    /// The four Paulis in the order I, X, Y, Z.
    pub fn all() -> [Operator; 4] {
        [identity(), x(), y(), z()]
    }
}
