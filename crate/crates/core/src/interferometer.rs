//! Two-path and N-path interference with environmental which-path records.
//!
//! Screen geometry is reduced to a relative phase `phi(x)`; the default is
//! `phi(x) = 2 pi x`, one fringe per unit of screen coordinate.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{c, CVector, DensityOperator, Operator, StateVector, C64, NORM_TOL};

/// Default fringe wavenumber: one fringe per unit `x`.
pub const DEFAULT_KAPPA: f64 = TAU;

/// Relative phase as a function of screen position.
#[derive(Clone)]
pub struct PhaseFn(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl PhaseFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PhaseFn(Arc::new(f))
    }

    /// `phi(x) = kappa x + offset`.
    pub fn linear(kappa: f64, offset: f64) -> Self {
        Self::new(move |x| kappa * x + offset)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl Default for PhaseFn {
    fn default() -> Self {
        Self::linear(DEFAULT_KAPPA, 0.0)
    }
}

impl fmt::Debug for PhaseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PhaseFn(..)")
    }
}

/// Path amplitudes plus the environment record each path leaves behind.
#[derive(Debug, Clone)]
pub struct TwoPathState {
    amp1: C64,
    amp2: C64,
    env1: StateVector,
    env2: StateVector,
    phase: PhaseFn,
}

impl TwoPathState {
    pub fn new(amp1: C64, amp2: C64, env1: StateVector, env2: StateVector, phase: PhaseFn) -> Result<Self> {
        let norm = amp1.norm_sqr() + amp2.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("|amp1|^2 + |amp2|^2 = {norm}")));
        }
        if env1.dims() != env2.dims() {
            return Err(Error::dims(format!(
                "environment records {:?} vs {:?}",
                env1.dims(),
                env2.dims()
            )));
        }
        Ok(TwoPathState { amp1, amp2, env1, env2, phase })
    }

    /// Equal path amplitudes, default phase.
    pub fn balanced(env1: StateVector, env2: StateVector) -> Result<Self> {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(a, a, env1, env2, PhaseFn::default())
    }

    /// Balanced state with qubit records `E1 = |0>` and
    /// `E2 = conj(overlap)|0> + sqrt(1 - |overlap|^2)|1>`, so `<E2|E1> = overlap`.
    pub fn with_overlap(overlap: C64) -> Result<Self> {
        let m = overlap.norm();
        if m > 1.0 + 1e-12 {
            return Err(Error::param("overlap", format!("|overlap| = {m} exceeds 1")));
        }
        let e1 = StateVector::basis(vec![2], 0)?;
        let perp = (1.0 - m * m).max(0.0).sqrt();
        let e2 = StateVector::normalized(vec![2], CVector::from_vec(vec![overlap.conj(), c(perp, 0.0)]))?;
        Self::balanced(e1, e2)
    }

    pub fn with_phase(mut self, phase: PhaseFn) -> Self {
        self.phase = phase;
        self
    }

    pub fn amplitudes(&self) -> (C64, C64) {
        (self.amp1, self.amp2)
    }

    pub fn records(&self) -> (&StateVector, &StateVector) {
        (&self.env1, &self.env2)
    }

    /// `<E2|E1>`.
    pub fn overlap(&self) -> C64 {
        self.env2.inner(&self.env1).expect("record dims checked on construction")
    }

    /// Off-diagonal element of the path-reduced density operator.
    pub fn path_coherence(&self) -> C64 {
        self.amp1 * self.amp2.conj() * self.overlap()
    }
}

/// `|Psi><Psi|` on path (dim 2) tensor environment, where
/// `|Psi> = amp1 |0>|E1> + amp2 |1>|E2>`.
pub fn joint_density(state: &TwoPathState) -> DensityOperator {
    let d = state.env1.dim();
    let mut amps = CVector::zeros(2 * d);
    for k in 0..d {
        amps[k] = state.amp1 * state.env1.amplitudes()[k];
        amps[d + k] = state.amp2 * state.env2.amplitudes()[k];
    }
    let mut dims = vec![2];
    dims.extend_from_slice(state.env1.dims());
    StateVector::from_parts_unchecked(dims, amps).to_density()
}

/// Sampled screen pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenProfile {
    pub xs: Vec<f64>,
    pub intensities: Vec<f64>,
}

impl ScreenProfile {
    /// CSV with header `x,intensity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,intensity\n");
        for (x, i) in self.xs.iter().zip(&self.intensities) {
            out.push_str(&format!("{x},{i}\n"));
        }
        out
    }

    /// Trapezoid integral of the intensity over the sampled range.
    pub fn integral(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.intensities.windows(2))
            .map(|(x, i)| 0.5 * (x[1] - x[0]) * (i[0] + i[1]))
            .sum()
    }
}

/// `n` evenly spaced points covering `[lo, hi)`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

/// `I(x) = |a1|^2 + |a2|^2 + 2 Re[a1 conj(a2) <E2|E1> e^{i phi(x)}]`.
pub fn screen_intensity(state: &TwoPathState, xs: &[f64]) -> ScreenProfile {
    let base = state.amp1.norm_sqr() + state.amp2.norm_sqr();
    let cross = state.path_coherence();
    let intensities = xs
        .iter()
        .map(|&x| {
            let i = base + 2.0 * (cross * C64::from_polar(1.0, state.phase.eval(x))).re;
            i.max(0.0)
        })
        .collect();
    ScreenProfile { xs: xs.to_vec(), intensities }
}

/// `(Imax - Imin) / (Imax + Imin)` over the sampled profile.
pub fn visibility(profile: &ScreenProfile) -> Result<f64> {
    if profile.intensities.len() < 2 {
        return Err(Error::param("profile", "need at least two samples"));
    }
    let (lo, hi) = profile
        .intensities
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi + lo <= 0.0 {
        return Err(Error::Undefined("visibility of an all-zero profile".into()));
    }
    Ok(((hi - lo) / (hi + lo)).clamp(0.0, 1.0))
}

/// Quantum eraser / screen move: rotates the record left by path 2,
/// `E2 -> U E2`, leaving `E1` alone. On the joint space this is the
/// path-controlled unitary `|0><0| (x) I + |1><1| (x) U`. Path amplitudes are
/// untouched; if `U E2 = E1` up to phase the fringes return at full contrast.
pub fn recohere(state: &TwoPathState, env_unitary: &Operator) -> Result<TwoPathState> {
    env_unitary.ensure_unitary()?;
    let env2 = state.env2.apply(env_unitary)?;
    Ok(TwoPathState { env2, ..state.clone() })
}

/// The joint-space unitary [`recohere`] implements.
pub fn recohere_joint_unitary(env_unitary: &Operator) -> Result<Operator> {
    env_unitary.ensure_unitary()?;
    let d = env_unitary.dim();
    let mut m = crate::hilbert::CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, i)] = c(1.0, 0.0);
        for j in 0..d {
            m[(d + i, d + j)] = env_unitary.matrix()[(i, j)];
        }
    }
    let mut dims = vec![2];
    dims.extend_from_slice(env_unitary.dims());
    Operator::new(dims, m)
}

/// One path of a multi-path model: complex weight and `phi_k(x)`.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub weight: C64,
    pub phase: PhaseFn,
}

/// N-path interferometer with pruning and a global phase shift.
#[derive(Debug, Clone)]
pub struct MultiPathModel {
    paths: Vec<PathSpec>,
    alive: Vec<bool>,
    pub global_shift: f64,
}

impl MultiPathModel {
    pub fn new(paths: Vec<PathSpec>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::param("n_paths", "must be positive"));
        }
        let alive = vec![true; paths.len()];
        Ok(MultiPathModel { paths, alive, global_shift: 0.0 })
    }

    /// Two slit groups at `y = -1/2` and `y = +1/2` (slit separation 1),
    /// `n_paths / 2` paths spread uniformly across a slit of width
    /// `slit_width` in each group. Path at source position `y` carries
    /// `phi(x) = kappa y x + pi y^2` so the two slit centres differ by
    /// `kappa x` and each path picks up a quadratic offset.
    pub fn two_slit(n_paths: usize, slit_width: f64, kappa: f64) -> Result<Self> {
        if n_paths < 2 || !n_paths.is_multiple_of(2) {
            return Err(Error::param("n_paths", "must be an even number >= 2"));
        }
        let per = n_paths / 2;
        let w = c(1.0 / (n_paths as f64).sqrt(), 0.0);
        let mut paths = Vec::with_capacity(n_paths);
        for centre in [-0.5, 0.5] {
            for k in 0..per {
                let u = if per == 1 { 0.0 } else { slit_width * (k as f64 / (per - 1) as f64 - 0.5) };
                let y: f64 = centre + u;
                paths.push(PathSpec {
                    weight: w,
                    phase: PhaseFn::new(move |x| kappa * y * x + PI * y * y),
                });
            }
        }
        Self::new(paths)
    }

    /// Twelve paths, slit width 0.1, one fringe per unit `x`.
    pub fn default_twelve() -> Self {
        Self::two_slit(12, 0.1, DEFAULT_KAPPA).expect("valid defaults")
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn alive(&self) -> &[bool] {
        &self.alive
    }

    pub fn paths(&self) -> &[PathSpec] {
        &self.paths
    }

    /// Marks paths as destroyed by decoherence.
    pub fn prune(mut self, indices: &[usize]) -> Result<Self> {
        for &k in indices {
            if k >= self.paths.len() {
                return Err(Error::param("prune", format!("path {k} out of range")));
            }
            self.alive[k] = false;
        }
        Ok(self)
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.global_shift = shift;
        self
    }
}

/// `I(x) = |sum_alive w_k e^{i(phi_k(x) + shift)}|^2` with the alive weights
/// renormalised to unit total probability.
pub fn multipath_intensity(model: &MultiPathModel, xs: &[f64]) -> Result<ScreenProfile> {
    let live: Vec<&PathSpec> = model
        .paths
        .iter()
        .zip(&model.alive)
        .filter_map(|(p, &a)| a.then_some(p))
        .collect();
    if live.is_empty() {
        return Err(Error::param("alive", "no surviving paths"));
    }
    let norm: f64 = live.iter().map(|p| p.weight.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::param("weights", "surviving paths carry zero weight"));
    }
    let intensities = xs
        .iter()
        .map(|&x| {
            live.iter()
                .map(|p| p.weight / norm * C64::from_polar(1.0, p.phase.eval(x) + model.global_shift))
                .sum::<C64>()
                .norm_sqr()
        })
        .collect();
    Ok(ScreenProfile { xs: xs.to_vec(), intensities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_state, random_unitary, seeded, uniform};
    use crate::hilbert::{pauli, partial_trace};

    fn fine_grid() -> Vec<f64> {
        grid(0.0, 1.0, 4096)
    }

    #[test]
    fn identical_records_keep_full_coherence() {
        let e = StateVector::basis(vec![2], 0).unwrap();
        let s = TwoPathState::balanced(e.clone(), e).unwrap();
        let path = partial_trace(&joint_density(&s), &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((path.get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn orthogonal_records_kill_interference_terms() {
        let s = TwoPathState::with_overlap(c(0.0, 0.0)).unwrap();
        let path = partial_trace(&joint_density(&s), &[0]).unwrap();
        assert!(path.get(0, 1).norm() < 1e-15);
        assert!((path.get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        let prof = screen_intensity(&s, &fine_grid());
        assert!(prof.intensities.iter().all(|&i| (i - 1.0).abs() < 1e-15));
        assert!(visibility(&prof).unwrap() < 1e-15);
    }

    #[test]
    fn half_overlap_matches_traced_joint_matrix() {
        // Oracle: build the 2d x 2d joint matrix by hand, trace the record out.
        let s = TwoPathState::with_overlap(c(0.5, 0.0)).unwrap();
        let (a1, a2) = s.amplitudes();
        let (e1, e2) = s.records();
        let mut off = c(0.0, 0.0);
        for k in 0..2 {
            off += a1 * e1.amplitudes()[k] * (a2 * e2.amplitudes()[k]).conj();
        }
        assert!((off.norm() - 0.25).abs() < 1e-15);
        let path = partial_trace(&joint_density(&s), &[0]).unwrap();
        assert!((path.get(0, 1) - off).norm() < 1e-12);
        assert!((path.get(0, 1) - s.path_coherence()).norm() < 1e-12);
    }

    #[test]
    fn textbook_fringes_for_unit_overlap() {
        let s = TwoPathState::with_overlap(c(1.0, 0.0)).unwrap();
        let xs = fine_grid();
        let prof = screen_intensity(&s, &xs);
        for (x, i) in xs.iter().zip(&prof.intensities) {
            assert!((i - (1.0 + (TAU * x).cos())).abs() < 1e-12);
        }
        assert!((visibility(&prof).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_overlap_shifts_fringe_maximum() {
        let o = C64::from_polar(0.5, PI / 3.0);
        let s = TwoPathState::with_overlap(o).unwrap();
        // Dense scan over one period of phi; locate the maximum numerically.
        let n = 1 << 16;
        let xs: Vec<f64> = (0..n).map(|k| -0.5 + k as f64 / n as f64).collect();
        let prof = screen_intensity(&s, &xs);
        let (kmax, _) = prof
            .intensities
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
        let phi_max = TAU * xs[kmax];
        assert!((phi_max + PI / 3.0).abs() < 2.0 * TAU / n as f64);
        assert!((visibility(&prof).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn visibility_examples_and_errors() {
        let xs = grid(0.0, TAU, 4096);
        let prof = ScreenProfile { intensities: xs.iter().map(|x| 1.0 + x.cos()).collect(), xs: xs.clone() };
        assert!((visibility(&prof).unwrap() - 1.0).abs() < 1e-12);
        let flat = ScreenProfile { intensities: vec![0.3; xs.len()], xs: xs.clone() };
        assert_eq!(visibility(&flat).unwrap(), 0.0);
        let dark = ScreenProfile { intensities: vec![0.0; xs.len()], xs };
        assert!(matches!(visibility(&dark), Err(Error::Undefined(_))));
        let s = TwoPathState::with_overlap(c(0.73, 0.0)).unwrap();
        let v = visibility(&screen_intensity(&s, &fine_grid())).unwrap();
        assert!((v - 0.73).abs() < 1e-6);
        assert!((v - s.overlap().norm()).abs() < 1e-6);
    }

    #[test]
    fn eraser_restores_full_visibility() {
        let s = TwoPathState::with_overlap(c(0.0, 0.0)).unwrap();
        assert!(visibility(&screen_intensity(&s, &fine_grid())).unwrap() < 1e-12);
        // Records are |0> and |1>; X maps E2 onto E1.
        let after = recohere(&s, &pauli::x()).unwrap();
        let v = visibility(&screen_intensity(&after, &fine_grid())).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recohere_agrees_with_joint_controlled_unitary() {
        let mut rng = seeded(4);
        let s = TwoPathState::balanced(random_state(&[2], &mut rng), random_state(&[2], &mut rng)).unwrap();
        let u = random_unitary(&[2], &mut rng);
        let cu = recohere_joint_unitary(&u).unwrap();
        let evolved = joint_density(&s).conjugate(&cu).unwrap();
        let direct = joint_density(&recohere(&s, &u).unwrap());
        assert!(crate::hilbert::linalg::max_abs_diff(evolved.matrix(), direct.matrix()) < 1e-12);
    }

    #[test]
    fn identity_recohere_is_a_no_op() {
        let s = TwoPathState::with_overlap(c(0.3, 0.4)).unwrap();
        let same = recohere(&s, &Operator::identity(vec![2]).unwrap()).unwrap();
        assert_eq!(same.records().0, s.records().0);
        assert_eq!(same.records().1, s.records().1);
        assert!(recohere(&s, &pauli::lowering()).is_err());
    }

    #[test]
    fn random_unitary_visibility_is_inner_product() {
        let mut rng = seeded(42);
        for _ in 0..10 {
            let e1 = random_state(&[3], &mut rng);
            let e2 = random_state(&[3], &mut rng);
            let s = TwoPathState::balanced(e1.clone(), e2.clone()).unwrap();
            let u = random_unitary(&[3], &mut rng);
            let after = recohere(&s, &u).unwrap();
            let oracle = e2.apply(&u).unwrap().inner(&e1).unwrap().norm();
            let v = visibility(&screen_intensity(&after, &fine_grid())).unwrap();
            assert!((v - oracle).abs() < 1e-6);
            let (a1, a2) = after.amplitudes();
            assert_eq!((a1, a2), s.amplitudes());
        }
    }

    fn brute_force(model: &MultiPathModel, x: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        let mut norm = 0.0;
        for (p, &alive) in model.paths().iter().zip(model.alive()) {
            if alive {
                norm += p.weight.norm_sqr();
            }
        }
        for (p, &alive) in model.paths().iter().zip(model.alive()) {
            if !alive {
                continue;
            }
            let ph = p.phase.eval(x) + model.global_shift;
            let w = p.weight / norm.sqrt();
            re += w.re * ph.cos() - w.im * ph.sin();
            im += w.re * ph.sin() + w.im * ph.cos();
        }
        re * re + im * im
    }

    #[test]
    fn twelve_paths_make_fringes() {
        let model = MultiPathModel::default_twelve();
        let xs = grid(0.0, 1.0, 1024);
        let prof = multipath_intensity(&model, &xs).unwrap();
        for (x, i) in xs.iter().zip(&prof.intensities) {
            assert!((i - brute_force(&model, *x)).abs() < 1e-12);
        }
        assert!(visibility(&prof).unwrap() > 0.9);
    }

    #[test]
    fn symmetric_pruning_keeps_fringes() {
        let xs = grid(0.0, 1.0, 1024);
        let full = visibility(&multipath_intensity(&MultiPathModel::default_twelve(), &xs).unwrap()).unwrap();
        let pruned = MultiPathModel::default_twelve().prune(&[0, 5, 6, 11]).unwrap();
        let prof = multipath_intensity(&pruned, &xs).unwrap();
        let v = visibility(&prof).unwrap();
        assert!(v > 0.5, "pruned visibility {v} (full {full})");
        assert!(prof.intensities.iter().all(|&i| i >= 0.0));
        assert!(prof.integral() > 0.0);
    }

    #[test]
    fn one_slit_group_alone_loses_most_fringes() {
        let xs = grid(0.0, 1.0, 1024);
        let one_side = MultiPathModel::default_twelve().prune(&[6, 7, 8, 9, 10, 11]).unwrap();
        let v = visibility(&multipath_intensity(&one_side, &xs).unwrap()).unwrap();
        assert!(v < 0.1, "single-slit visibility {v}");
    }

    #[test]
    fn global_shift_leaves_visibility_unchanged() {
        let xs = grid(0.0, 1.0, 1024);
        let base = MultiPathModel::default_twelve();
        let shifted = base.clone().with_shift(PI / 2.0);
        let a = multipath_intensity(&base, &xs).unwrap();
        let b = multipath_intensity(&shifted, &xs).unwrap();
        for (x, y) in a.intensities.iter().zip(&b.intensities) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(visibility(&a).unwrap(), visibility(&b).unwrap());
    }

    #[test]
    fn zero_alive_paths_is_an_error() {
        let all: Vec<usize> = (0..12).collect();
        let dead = MultiPathModel::default_twelve().prune(&all).unwrap();
        assert!(multipath_intensity(&dead, &[0.0]).is_err());
    }

    #[test]
    fn overlap_constructor_validates() {
        assert!(TwoPathState::with_overlap(c(1.5, 0.0)).is_err());
        let mut rng = seeded(1);
        let o = C64::from_polar(uniform(&mut rng, 0.0, 1.0), uniform(&mut rng, -PI, PI));
        let s = TwoPathState::with_overlap(o).unwrap();
        assert!((s.overlap() - o).norm() < 1e-12);
        let bad = TwoPathState::new(
            c(1.0, 0.0),
            c(1.0, 0.0),
            StateVector::qubits("0").unwrap(),
            StateVector::qubits("0").unwrap(),
            PhaseFn::default(),
        );
        assert!(bad.is_err());
        let mismatch = TwoPathState::balanced(StateVector::qubits("0").unwrap(), StateVector::qubits("00").unwrap());
        assert!(matches!(mismatch, Err(Error::DimensionMismatch(_))));
    }
}
