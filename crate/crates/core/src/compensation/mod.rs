//! Decoherence compensation: decoherence-free subspaces, redundant encoding,
//! error discretization and coherent (measurement-free) error correction.

pub mod circuit;

use crate::error::{Error, Result};
use crate::evolution::{evolve_lindblad, Jump, LindbladModel};
use crate::hilbert::{c, measures, CMatrix, CVector, HermitianEigen, Operator, StateVector, C64};

pub use circuit::{Circuit, Gate, Pauli};

/// Default eigenvalue clustering tolerance for [`find_dfs`].
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Hermitian system–environment coupling operators `S_alpha` on one space.
#[derive(Debug, Clone)]
pub struct InteractionSet {
    ops: Vec<Operator>,
}

impl InteractionSet {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::param("interactions", "empty set"));
        };
        for (k, op) in ops.iter().enumerate() {
            op.ensure_hermitian()?;
            if op.dims() != first.dims() {
                return Err(Error::dims(format!("operator {k} dims {:?} vs {:?}", op.dims(), first.dims())));
            }
        }
        Ok(InteractionSet { ops })
    }

    /// `sum_k sigma_z^(k)` on `n` qubits.
    pub fn collective_dephasing(n: usize) -> Result<Self> {
        let dims = vec![2; n];
        let mut total = Operator::zeros(dims.clone())?;
        for k in 0..n {
            total = &total + &Operator::embed(&crate::hilbert::pauli::z(), k, &dims)?;
        }
        Self::new(vec![total])
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn dims(&self) -> &[usize] {
        self.ops[0].dims()
    }
}

/// Orthonormal basis of a common eigenspace, with the eigenvalue of each
/// interaction operator on it.
#[derive(Debug, Clone)]
pub struct DFSBasis {
    pub vectors: Vec<StateVector>,
    pub labels: Vec<f64>,
}

impl DFSBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Largest of `|<v_i|v_j> - delta_ij|` and `||S_a v - lambda_a v||`.
    pub fn defect(&self, interactions: &InteractionSet) -> Result<f64> {
        if self.labels.len() != interactions.ops().len() {
            return Err(Error::dims(format!(
                "{} labels for {} interaction operators",
                self.labels.len(),
                interactions.ops().len()
            )));
        }
        let mut worst = 0.0f64;
        for (i, v) in self.vectors.iter().enumerate() {
            for (j, w) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v.inner(w)? - c(target, 0.0)).norm());
            }
            for (op, &lam) in interactions.ops().iter().zip(&self.labels) {
                let sv = op.matrix() * v.amplitudes();
                worst = worst.max((sv - v.amplitudes() * c(lam, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// Equal-weight superposition of the basis vectors.
    pub fn uniform_superposition(&self) -> Result<StateVector> {
        let first = self.vectors.first().ok_or_else(|| Error::InvalidState("empty basis".into()))?;
        let mut amps = CVector::zeros(first.dim());
        for v in &self.vectors {
            amps += v.amplitudes();
        }
        StateVector::normalized(first.dims().to_vec(), amps)
    }
}

/// Eigenvalue clusters of a Hermitian matrix: sorted eigenvalues split
/// wherever consecutive gaps exceed `tol`; each cluster is represented by
/// its mean.
fn eigen_clusters(values: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            let group = &values[start..k];
            out.push(group.iter().sum::<f64>() / group.len() as f64);
            start = k;
        }
    }
    out
}

/// Columns of `v` spanning `{v u : ||(S - lambda) v u|| <= tol}`, from the
/// right singular vectors of `(S - lambda) v`.
fn restrict_to_eigenspace(s: &CMatrix, lambda: f64, v: &CMatrix, tol: f64) -> Option<CMatrix> {
    let n = s.nrows();
    let a = (s - CMatrix::identity(n, n) * c(lambda, 0.0)) * v;
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let null: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= tol).collect();
    if null.is_empty() {
        return None;
    }
    let u = CMatrix::from_fn(v.ncols(), null.len(), |r, k| v_t[(null[k], r)].conj());
    Some(v * u)
}

/// Deterministic orthonormal basis of `span(w)`: computational basis
/// vectors are projected in order of largest remaining weight (ties to the
/// lower index) and orthogonalised; the result is sorted by pivot index.
fn canonical_basis(w: &CMatrix) -> Vec<CVector> {
    let n = w.nrows();
    let k = w.ncols();
    let proj = w * w.adjoint();
    let mut chosen: Vec<(usize, CVector)> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, CVector, f64)> = None;
        for p in 0..n {
            if chosen.iter().any(|(q, _)| *q == p) {
                continue;
            }
            let mut r = proj.column(p).into_owned();
            for (_, q) in &chosen {
                let overlap = q.dotc(&r);
                r -= q * overlap;
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|b| norm > b.2 + 1e-9) {
                best = Some((p, r, norm));
            }
        }
        let (p, r, norm) = best.expect("subspace rank exceeds ambient dimension");
        chosen.push((p, r / c(norm, 0.0)));
    }
    chosen.sort_by_key(|(p, _)| *p);
    chosen.into_iter().map(|(_, v)| v).collect()
}

/// Maximal common eigenspaces of all interaction operators. Every returned
/// subspace carries one eigenvalue per operator; together they cover the
/// whole space only when the operators commute.
pub fn find_dfs(interactions: &InteractionSet, degeneracy_tol: f64) -> Result<Vec<DFSBasis>> {
    if !(degeneracy_tol > 0.0) {
        return Err(Error::param("degeneracy_tol", "must be positive"));
    }
    let n: usize = interactions.dims().iter().product();
    let mut spaces: Vec<(CMatrix, Vec<f64>)> = vec![(CMatrix::identity(n, n), Vec::new())];
    for op in interactions.ops() {
        let eig = HermitianEigen::new(op.matrix());
        let clusters = eigen_clusters(&eig.values, degeneracy_tol);
        let mut next = Vec::new();
        for (v, labels) in &spaces {
            for &lam in &clusters {
                if let Some(w) = restrict_to_eigenspace(op.matrix(), lam, v, degeneracy_tol) {
                    let mut l = labels.clone();
                    l.push(lam);
                    next.push((w, l));
                }
            }
        }
        spaces = next;
    }
    let dims = interactions.dims().to_vec();
    spaces
        .into_iter()
        .map(|(w, labels)| {
            let vectors = canonical_basis(&w)
                .into_iter()
                .map(|amps| StateVector::new(dims.clone(), amps))
                .collect::<Result<Vec<_>>>()?;
            Ok(DFSBasis { vectors, labels })
        })
        .collect()
}

/// Lindblad model with `H = 0` and one jump `L_a = S_a` per interaction.
fn noise_model(interactions: &InteractionSet, rates: &[f64]) -> Result<LindbladModel> {
    if rates.len() != interactions.ops().len() {
        return Err(Error::dims(format!("{} rates for {} interactions", rates.len(), interactions.ops().len())));
    }
    let jumps = interactions
        .ops()
        .iter()
        .zip(rates)
        .map(|(op, &rate)| Jump { op: op.clone(), rate })
        .collect();
    LindbladModel::new(Operator::zeros(interactions.dims().to_vec())?, jumps)
}

/// Samples on `[0, horizon]` used by the noise checks.
const NOISE_SAMPLES: usize = 101;

/// Largest trace distance between `|psi><psi|` and its evolution under the
/// pure-noise model over `[0, horizon]`.
pub fn noise_deviation(psi: &StateVector, interactions: &InteractionSet, rates: &[f64], horizon: f64) -> Result<f64> {
    if psi.dims() != interactions.dims() {
        return Err(Error::dims(format!("state {:?} vs interactions {:?}", psi.dims(), interactions.dims())));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::param("horizon", "must be non-negative"));
    }
    let model = noise_model(interactions, rates)?;
    let rho0 = psi.to_density();
    let times: Vec<f64> = (0..NOISE_SAMPLES).map(|k| horizon * k as f64 / (NOISE_SAMPLES - 1) as f64).collect();
    let traj = evolve_lindblad(&model, &rho0, &times)?;
    traj.states
        .iter()
        .map(|s| measures::trace_distance(s, &rho0))
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// [`noise_deviation`] of the equal superposition of the basis vectors.
pub fn verify_dfs(basis: &DFSBasis, interactions: &InteractionSet, rates: &[f64], horizon: f64) -> Result<f64> {
    noise_deviation(&basis.uniform_superposition()?, interactions, rates, horizon)
}

/// Errors a code is built to correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correctable {
    SingleBitFlip,
    SinglePhaseFlip,
    ArbitrarySingleQubit,
}

impl Correctable {
    pub fn covers(self, p: Pauli) -> bool {
        match self {
            Correctable::SingleBitFlip => matches!(p, Pauli::I | Pauli::X),
            Correctable::SinglePhaseFlip => matches!(p, Pauli::I | Pauli::Z),
            Correctable::ArbitrarySingleQubit => true,
        }
    }
}

/// Syndrome extraction into fresh ancillas followed by ancilla-controlled
/// Pauli corrections, on `n_code + n_ancilla` qubits (code first).
#[derive(Debug, Clone)]
pub struct SyndromeCircuit {
    pub n_code: usize,
    pub n_ancilla: usize,
    pub extraction: Circuit,
    pub correction: Circuit,
}

impl SyndromeCircuit {
    pub fn n_total(&self) -> usize {
        self.n_code + self.n_ancilla
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    pub name: &'static str,
    pub n_physical: usize,
    pub k_logical: usize,
    /// Maps `|psi> (x) |0...0>` to the codeword.
    pub encoder: Circuit,
    pub correctable: Correctable,
    pub syndrome: SyndromeCircuit,
}

/// Patterns `(a, b)` of two parity ancillas and the position they flag
/// among three: (1,0) first, (1,1) middle, (0,1) last.
const PARITY_TABLE: [((bool, bool), usize); 3] = [((true, false), 0), ((true, true), 1), ((false, true), 2)];

/// Parity CNOTs `(q0,q1) -> a0`, `(q1,q2) -> a1`.
fn parity_gates(q: [usize; 3], a: [usize; 2]) -> Vec<Gate> {
    vec![Gate::cnot(q[0], a[0]), Gate::cnot(q[1], a[0]), Gate::cnot(q[1], a[1]), Gate::cnot(q[2], a[1])]
}

fn keyed_corrections(a: [usize; 2], p: Pauli, targets: [usize; 3]) -> Vec<Gate> {
    PARITY_TABLE
        .iter()
        .map(|&((v0, v1), pos)| Gate::keyed(vec![(a[0], v0), (a[1], v1)], p, targets[pos]))
        .collect()
}

impl StabilizerCode {
    /// `|0> -> |000>`, `|1> -> |111>` by CNOTs from qubit 0 to 1 and 2.
    pub fn bit_flip() -> Self {
        let encoder = Circuit::new(3).with([Gate::cnot(0, 1), Gate::cnot(0, 2)]);
        let extraction = Circuit::new(5).with(parity_gates([0, 1, 2], [3, 4]));
        let correction = Circuit::new(5).with(keyed_corrections([3, 4], Pauli::X, [0, 1, 2]));
        StabilizerCode {
            name: "bitflip",
            n_physical: 3,
            k_logical: 1,
            encoder,
            correctable: Correctable::SingleBitFlip,
            syndrome: SyndromeCircuit { n_code: 3, n_ancilla: 2, extraction, correction },
        }
    }

    /// The bit-flip code conjugated by Hadamards: `|0> -> |+++>`.
    pub fn phase_flip() -> Self {
        let hs = |n| (0..n).map(Gate::h).collect::<Vec<_>>();
        let encoder = Circuit::new(3).with([Gate::cnot(0, 1), Gate::cnot(0, 2)]).with(hs(3));
        let extraction = Circuit::new(5).with(hs(3)).with(parity_gates([0, 1, 2], [3, 4])).with(hs(3));
        let correction = Circuit::new(5).with(keyed_corrections([3, 4], Pauli::Z, [0, 1, 2]));
        StabilizerCode {
            name: "phaseflip",
            n_physical: 3,
            k_logical: 1,
            encoder,
            correctable: Correctable::SinglePhaseFlip,
            syndrome: SyndromeCircuit { n_code: 3, n_ancilla: 2, extraction, correction },
        }
    }

    /// Shor's nine-qubit code (phase-flip code of bit-flip blocks). Eight
    /// ancillas: two bit-flip parities per block (9..=14) and two block-sign
    /// parities (15, 16).
    pub fn shor9() -> Self {
        let mut enc = vec![Gate::cnot(0, 3), Gate::cnot(0, 6), Gate::h(0), Gate::h(3), Gate::h(6)];
        for b in [0, 3, 6] {
            enc.push(Gate::cnot(b, b + 1));
            enc.push(Gate::cnot(b, b + 2));
        }
        let encoder = Circuit::new(9).with(enc);

        let mut ext = Vec::new();
        let mut cor = Vec::new();
        for blk in 0..3 {
            let q = [3 * blk, 3 * blk + 1, 3 * blk + 2];
            let a = [9 + 2 * blk, 10 + 2 * blk];
            ext.extend(parity_gates(q, a));
            cor.extend(keyed_corrections(a, Pauli::X, q));
        }
        // Block-sign parities: X^{(x)6} on blocks (0,1) and (1,2), read out by
        // a Hadamard-sandwiched ancilla controlling X on each qubit.
        for (anc, blocks) in [(15, [0, 1]), (16, [1, 2])] {
            ext.push(Gate::h(anc));
            for b in blocks {
                for q in 3 * b..3 * b + 3 {
                    ext.push(Gate::cnot(anc, q));
                }
            }
            ext.push(Gate::h(anc));
        }
        cor.extend(keyed_corrections([15, 16], Pauli::Z, [0, 3, 6]));
        StabilizerCode {
            name: "shor9",
            n_physical: 9,
            k_logical: 1,
            encoder,
            correctable: Correctable::ArbitrarySingleQubit,
            syndrome: SyndromeCircuit {
                n_code: 9,
                n_ancilla: 8,
                extraction: Circuit::new(17).with(ext),
                correction: Circuit::new(17).with(cor),
            },
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "bitflip" => Ok(Self::bit_flip()),
            "phaseflip" => Ok(Self::phase_flip()),
            "shor9" => Ok(Self::shor9()),
            other => Err(Error::param("code", format!("unknown code `{other}` (bitflip, phaseflip, shor9)"))),
        }
    }

    /// Dense encoder matrix on the physical qubits.
    pub fn encoder_operator(&self) -> Result<Operator> {
        self.encoder.to_operator()
    }
}

/// `encoder (logical (x) |0...0>)`: a unitary map on the enlarged space, not
/// a copy of the logical state.
pub fn encode_redundant(logical: &StateVector, code: &StabilizerCode) -> Result<StateVector> {
    let expect = vec![2; code.k_logical];
    if logical.dims() != expect.as_slice() {
        return Err(Error::dims(format!("logical dims {:?}, code expects {expect:?}", logical.dims())));
    }
    let padded = logical.tensor(&zero_register(code.n_physical - code.k_logical));
    code.encoder.apply(&padded)
}

fn zero_register(n: usize) -> StateVector {
    let mut amps = CVector::zeros(1 << n);
    amps[0] = c(1.0, 0.0);
    StateVector::from_parts_unchecked(vec![2; n], amps)
}

/// `state (x) |0...0>` with `n_ancilla` fresh ancillas.
pub fn with_fresh_ancillas(state: &StateVector, n_ancilla: usize) -> StateVector {
    state.tensor(&zero_register(n_ancilla))
}

/// Expansion coefficients `(c_I, c_X, c_Y, c_Z)` with `c_P = Tr(P^dagger e) / 2`.
pub fn discretize_error(e: &Operator) -> Result<[C64; 4]> {
    if e.dim() != 2 {
        return Err(Error::dims(format!("single-qubit error expected, got dimension {}", e.dim())));
    }
    let m = e.matrix();
    let mut out = [c(0.0, 0.0); 4];
    for (slot, p) in out.iter_mut().zip(Pauli::ALL) {
        let pm = p.matrix();
        let mut tr = c(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                tr += pm[j][i].conj() * m[(j, i)];
            }
        }
        *slot = tr * 0.5;
    }
    Ok(out)
}

/// `exp(-i theta P / 2)`.
pub fn pauli_rotation(p: Pauli, theta: f64) -> Operator {
    let (s, co) = (theta / 2.0).sin_cos();
    let pm = p.matrix();
    let id = Pauli::I.matrix();
    let mat = CMatrix::from_fn(2, 2, |i, j| id[i][j] * co - pm[i][j] * c(0.0, s));
    Operator::from_parts_unchecked(vec![2], mat)
}

/// Applies a single-qubit unitary error on `qubit` of a qubit register.
pub fn apply_error(state: &StateVector, qubit: usize, error: &Operator) -> Result<StateVector> {
    if error.dim() != 2 {
        return Err(Error::dims("error operator must be 2x2"));
    }
    error.ensure_unitary()?;
    let m = error.matrix();
    let gate = Gate::Single { qubit, m: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]] };
    let mut circ = Circuit::new(state.dims().len());
    circ.push(gate)?;
    circ.apply(state)
}

/// Extraction followed by correction on `noisy (code (x) ancillas)`.
/// Nothing is measured; the ancillas end up holding the error record.
pub fn correct_without_measurement(
    noisy: &StateVector,
    code: &StabilizerCode,
    circuit: &SyndromeCircuit,
) -> Result<StateVector> {
    if circuit.n_code != code.n_physical {
        return Err(Error::dims(format!(
            "syndrome circuit for {} code qubits, code has {}",
            circuit.n_code, code.n_physical
        )));
    }
    let extracted = circuit.extraction.apply(noisy)?;
    circuit.correction.apply(&extracted)
}

/// `<c| Tr_anc |psi><psi| |c>` for a register laid out as code (x) ancillas.
pub fn code_space_fidelity(joint: &StateVector, codeword: &StateVector, n_ancilla: usize) -> Result<f64> {
    let na = 1usize << n_ancilla;
    if joint.dim() != codeword.dim() * na {
        return Err(Error::dims(format!(
            "joint dimension {} vs codeword {} x {na} ancilla states",
            joint.dim(),
            codeword.dim()
        )));
    }
    let (psi, cw) = (joint.amplitudes(), codeword.amplitudes());
    let mut total = 0.0;
    for a in 0..na {
        let amp: C64 = (0..cw.len()).map(|k| cw[k].conj() * psi[k * na + a]).sum();
        total += amp.norm_sqr();
    }
    Ok(total)
}

/// Encode, apply `error` on `qubit`, correct, and report the code-space
/// fidelity with the error-free codeword.
pub fn recovery_fidelity(code: &StabilizerCode, logical: &StateVector, qubit: usize, error: &Operator) -> Result<f64> {
    if qubit >= code.n_physical {
        return Err(Error::param("qubit", format!("{qubit} outside {} code qubits", code.n_physical)));
    }
    let codeword = encode_redundant(logical, code)?;
    let joint = with_fresh_ancillas(&codeword, code.syndrome.n_ancilla);
    let noisy = apply_error(&joint, qubit, error)?;
    let recovered = correct_without_measurement(&noisy, code, &code.syndrome)?;
    code_space_fidelity(&recovered, &codeword, code.syndrome.n_ancilla)
}

/// Recovery fidelity for rotations `exp(-i theta P / 2)` on `qubit`, one per
/// angle in degrees.
pub fn fidelity_sweep(
    code: &StabilizerCode,
    logical: &StateVector,
    axis: Pauli,
    qubit: usize,
    thetas_deg: &[f64],
) -> Result<Vec<f64>> {
    thetas_deg
        .iter()
        .map(|&deg| recovery_fidelity(code, logical, qubit, &pauli_rotation(axis, deg.to_radians())))
        .collect()
}
