//! Qubit gate lists applied directly to state vectors.
//!
//! Qubit 0 is the most significant bit of the basis index.

use crate::error::{Error, Result};
use crate::hilbert::{c, CMatrix, CVector, Operator, StateVector, C64};

/// Largest register for which [`Circuit::to_operator`] builds a dense matrix.
pub const DENSE_QUBIT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        match self {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

const HADAMARD: [[C64; 2]; 2] = {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]]
};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Arbitrary 2x2 matrix on one qubit (need not be unitary; used to
    /// inject error operators).
    Single { qubit: usize, m: [[C64; 2]; 2] },
    /// `m` on `target` when every `(qubit, value)` control matches.
    Controlled { controls: Vec<(usize, bool)>, target: usize, m: [[C64; 2]; 2] },
}

impl Gate {
    pub fn pauli(p: Pauli, qubit: usize) -> Gate {
        Gate::Single { qubit, m: p.matrix() }
    }

    pub fn h(qubit: usize) -> Gate {
        Gate::Single { qubit, m: HADAMARD }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Controlled { controls: vec![(control, true)], target, m: Pauli::X.matrix() }
    }

    /// Pauli on `target` conditioned on an exact control pattern.
    pub fn keyed(controls: Vec<(usize, bool)>, p: Pauli, target: usize) -> Gate {
        Gate::Controlled { controls, target, m: p.matrix() }
    }

    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Single { qubit, .. } => vec![*qubit],
            Gate::Controlled { controls, target, .. } => {
                let mut q: Vec<usize> = controls.iter().map(|c| c.0).collect();
                q.push(*target);
                q
            }
        }
    }
}

/// Ordered gate list on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        let qs = gate.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n) {
            return Err(Error::param("gate", format!("qubit {q} outside a {}-qubit register", self.n)));
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return Err(Error::param("gate", "control and target qubits must differ"));
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub(crate) fn with(mut self, gates: impl IntoIterator<Item = Gate>) -> Self {
        for g in gates {
            self.push(g).expect("internal circuit construction");
        }
        self
    }

    /// Same gates acting on a register of `n` qubits, shifted by `offset`.
    pub fn embedded(&self, n: usize, offset: usize) -> Result<Circuit> {
        let shift = |q: usize| q + offset;
        let mut out = Circuit::new(n);
        for g in &self.gates {
            let moved = match g {
                Gate::Single { qubit, m } => Gate::Single { qubit: shift(*qubit), m: *m },
                Gate::Controlled { controls, target, m } => Gate::Controlled {
                    controls: controls.iter().map(|&(q, v)| (shift(q), v)).collect(),
                    target: shift(*target),
                    m: *m,
                },
            };
            out.push(moved)?;
        }
        Ok(out)
    }

    pub fn then(mut self, other: &Circuit) -> Result<Circuit> {
        if other.n != self.n {
            return Err(Error::dims(format!("{}-qubit vs {}-qubit circuit", self.n, other.n)));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    /// Applies the gates to raw amplitudes in place.
    pub fn apply_in_place(&self, amps: &mut CVector) -> Result<()> {
        if amps.len() != 1usize << self.n {
            return Err(Error::dims(format!("{} amplitudes for {} qubits", amps.len(), self.n)));
        }
        for g in &self.gates {
            match g {
                Gate::Single { qubit, m } => apply_local(amps, self.n, *qubit, m, |_| true),
                Gate::Controlled { controls, target, m } => {
                    let masks: Vec<(usize, bool)> =
                        controls.iter().map(|&(q, v)| (1usize << (self.n - 1 - q), v)).collect();
                    apply_local(amps, self.n, *target, m, |idx| masks.iter().all(|&(b, v)| (idx & b != 0) == v))
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dims().iter().any(|&d| d != 2) || state.dims().len() != self.n {
            return Err(Error::dims(format!("{}-qubit circuit on state with dims {:?}", self.n, state.dims())));
        }
        let mut amps = state.amplitudes().clone();
        self.apply_in_place(&mut amps)?;
        Ok(StateVector::from_parts_unchecked(state.dims().to_vec(), amps))
    }

    /// Dense matrix of the circuit, column `k` being the image of `|k>`.
    pub fn to_operator(&self) -> Result<Operator> {
        if self.n > DENSE_QUBIT_LIMIT {
            return Err(Error::DimensionCeiling { dim: 1 << self.n, ceiling: 1 << DENSE_QUBIT_LIMIT });
        }
        let dim = 1usize << self.n;
        let mut mat = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut col = CVector::zeros(dim);
            col[k] = c(1.0, 0.0);
            self.apply_in_place(&mut col)?;
            mat.set_column(k, &col);
        }
        Operator::new(vec![2; self.n], mat)
    }
}

fn apply_local<F: Fn(usize) -> bool>(amps: &mut CVector, n: usize, qubit: usize, m: &[[C64; 2]; 2], active: F) {
    let bit = 1usize << (n - 1 - qubit);
    for idx in 0..amps.len() {
        if idx & bit != 0 || !active(idx) {
            continue;
        }
        let j = idx | bit;
        let (a0, a1) = (amps[idx], amps[j]);
        amps[idx] = m[0][0] * a0 + m[0][1] * a1;
        amps[j] = m[1][0] * a0 + m[1][1] * a1;
    }
}
