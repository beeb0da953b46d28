//! Minimal radical-pair model: two electron spins and one spin-1/2 nucleus
//! hyperfine-coupled to electron 1, with Zeeman coupling to a static field,
//! an optional RF field, and Haberkorn singlet/triplet recombination.
//!
//! Space ordering is `electron1 (x) electron2 (x) nucleus`; Hamiltonians are in
//! rad/s and times in seconds.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{c, CMatrix, CVector, HermitianEigen, Operator};

/// Electron gyromagnetic ratio, MHz/mT.
pub const GAMMA_E: f64 = 28.025;

/// Largest surviving radical-pair population accepted at the horizon.
pub const SURVIVAL_THRESHOLD: f64 = 1e-4;

/// RF steps per period before refinement.
pub const RF_MIN_STEPS: usize = 64;
const RF_MAX_STEPS: usize = 4096;
/// Step-doubling target for RF yields.
pub const RF_YIELD_TOL: f64 = 1e-7;

const DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadicalPairModel {
    /// Isotropic hyperfine constant, mT.
    pub a_iso: f64,
    /// Axial anisotropy along the molecular z axis, mT.
    pub a_axial: f64,
    /// Static field, μT.
    pub b_static: [f64; 3],
    /// RF amplitude, μT.
    pub rf_amplitude: f64,
    /// RF frequency, Hz.
    pub rf_frequency: f64,
    pub rf_axis: [f64; 3],
    /// Singlet recombination rate, 1/s.
    pub k_s: f64,
    /// Triplet recombination rate, 1/s.
    pub k_t: f64,
    /// MHz/mT.
    pub gamma_e: f64,
}

impl Default for RadicalPairModel {
    fn default() -> Self {
        RadicalPairModel {
            a_iso: 0.5,
            a_axial: 0.0,
            b_static: [0.0, 0.0, 50.0],
            rf_amplitude: 0.0,
            rf_frequency: 0.0,
            rf_axis: [1.0, 0.0, 0.0],
            k_s: 1e6,
            k_t: 1e6,
            gamma_e: GAMMA_E,
        }
    }
}

impl RadicalPairModel {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a_iso, self.a_axial, self.rf_amplitude, self.rf_frequency, self.k_s, self.k_t, self.gamma_e]
            .iter()
            .chain(&self.b_static)
            .chain(&self.rf_axis)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("model", "non-finite parameter"));
        }
        if self.k_s < 0.0 || self.k_t < 0.0 {
            return Err(Error::param("k_s/k_t", "recombination rates must be non-negative"));
        }
        if self.gamma_e <= 0.0 {
            return Err(Error::param("gamma_e", "must be positive"));
        }
        if self.rf_amplitude < 0.0 {
            return Err(Error::param("rf_amplitude", "must be non-negative"));
        }
        if self.rf_amplitude > 0.0 {
            let norm = self.rf_axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::param("rf_axis", format!("|axis| = {norm}, expected 1")));
            }
            if self.rf_frequency <= 0.0 {
                return Err(Error::param("rf_frequency", "must be positive when RF is on"));
            }
        }
        Ok(())
    }

    fn has_rf(&self) -> bool {
        self.rf_amplitude > 0.0
    }

    /// Static field rotated to polar angle `theta` from the molecular z axis
    /// (in the x–z plane), keeping its magnitude.
    pub fn with_field_angle(&self, theta: f64) -> Self {
        let b = self.b_static.iter().map(|v| v * v).sum::<f64>().sqrt();
        RadicalPairModel { b_static: [b * theta.sin(), 0.0, b * theta.cos()], ..self.clone() }
    }

    pub fn without_rf(&self) -> Self {
        RadicalPairModel { rf_amplitude: 0.0, ..self.clone() }
    }

    /// `2 pi 10^6 gamma_e`: rad/s per mT.
    fn omega_per_mt(&self) -> f64 {
        TAU * 1e6 * self.gamma_e
    }
}

/// Spin-1/2 operators `(S_x, S_y, S_z)`.
fn spin_half() -> [CMatrix; 3] {
    let (o, z, i) = (c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.5));
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn place(op: &CMatrix, site: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let factors: [&CMatrix; 3] = match site {
        0 => [op, &id, &id],
        1 => [&id, op, &id],
        _ => [&id, &id, op],
    };
    factors[0].kronecker(factors[1]).kronecker(factors[2])
}

struct SpinOps {
    s1: [CMatrix; 3],
    s2: [CMatrix; 3],
    i: [CMatrix; 3],
}

fn spin_ops() -> SpinOps {
    let s = spin_half();
    SpinOps {
        s1: [place(&s[0], 0), place(&s[1], 0), place(&s[2], 0)],
        s2: [place(&s[0], 1), place(&s[1], 1), place(&s[2], 1)],
        i: [place(&s[0], 2), place(&s[1], 2), place(&s[2], 2)],
    }
}

/// Two-electron singlet projector on the full space.
pub fn singlet_projector() -> CMatrix {
    let (z, h) = (c(0.0, 0.0), c(0.5, 0.0));
    let s = CMatrix::from_row_slice(4, 4, &[z, z, z, z, z, h, -h, z, z, -h, h, z, z, z, z, z]);
    s.kronecker(&CMatrix::identity(2, 2))
}

/// Field (μT) at time `t`, including the RF term.
fn field_at(model: &RadicalPairModel, t: f64) -> [f64; 3] {
    let rf = if model.has_rf() { model.rf_amplitude * (TAU * model.rf_frequency * t).cos() } else { 0.0 };
    [0, 1, 2].map(|k| model.b_static[k] + rf * model.rf_axis[k])
}

#[allow(clippy::needless_range_loop)]
fn hamiltonian_for_field(model: &RadicalPairModel, ops: &SpinOps, b_ut: [f64; 3]) -> CMatrix {
    let w = model.omega_per_mt();
    let mut h = CMatrix::zeros(DIM, DIM);
    for k in 0..3 {
        let b = b_ut[k] * 1e-3;
        if b != 0.0 {
            h += (&ops.s1[k] + &ops.s2[k]) * c(w * b, 0.0);
        }
        let a = if k == 2 { model.a_iso + model.a_axial } else { model.a_iso };
        if a != 0.0 {
            h += &ops.i[k] * &ops.s1[k] * c(w * a, 0.0);
        }
    }
    (&h + h.adjoint()) * c(0.5, 0.0)
}

/// `H(t) = gamma_e B(t).(S1 + S2) + I.A.S1` in rad/s with
/// `A = diag(a_iso, a_iso, a_iso + a_axial)`.
pub fn build_hamiltonian(model: &RadicalPairModel, t: f64) -> Result<Operator> {
    model.validate()?;
    let h = hamiltonian_for_field(model, &spin_ops(), field_at(model, t));
    Operator::new(vec![2, 2, 2], h)
}

/// Distinct transition frequencies `|E_i - E_j| / 2 pi` (Hz) of the static
/// Hamiltonian, ascending; values closer than `1e-6` relative are merged.
pub fn level_splittings(model: &RadicalPairModel) -> Result<Vec<f64>> {
    let h = build_hamiltonian(&model.without_rf(), 0.0)?;
    let eig = HermitianEigen::new(h.matrix());
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut out: Vec<f64> = Vec::new();
    for i in 0..DIM {
        for j in i + 1..DIM {
            let f = (eig.values[j] - eig.values[i]).abs() / TAU;
            if f * TAU > 1e-9 * scale {
                out.push(f);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * b.abs());
    Ok(out)
}

fn initial_state() -> CMatrix {
    singlet_projector() * c(0.5, 0.0)
}

fn expect(q: &CMatrix, rho: &CMatrix) -> f64 {
    (q * rho).trace().re
}

/// `p_S(t) = Tr[(Q_S (x) I) rho(t)]` from `rho(0) = Q_S / 2`, recombination
/// off. RF fields use a piecewise-constant Hamiltonian with
/// [`RF_MIN_STEPS`] midpoint steps per period. `p_S(0) = 1` exactly; later
/// values are clamped to `[0, 1]` against rounding.
pub fn singlet_probability(model: &RadicalPairModel, times: &[f64]) -> Result<Vec<f64>> {
    model.validate()?;
    if model.k_s != 0.0 || model.k_t != 0.0 {
        return Err(Error::param("k_s/k_t", "singlet_probability needs recombination off; use singlet_yield"));
    }
    check_times(times)?;
    let ops = spin_ops();
    let q = singlet_projector();
    let rho0 = initial_state();
    let at = |u: &CMatrix| expect(&q, &(u * &rho0 * u.adjoint())).clamp(0.0, 1.0);
    if !model.has_rf() {
        let eig = HermitianEigen::new(&hamiltonian_for_field(model, &ops, model.b_static));
        return Ok(times.iter().map(|&t| if t == 0.0 { 1.0 } else { at(&eig.propagator(t)) }).collect());
    }
    let dt = 1.0 / (model.rf_frequency * RF_MIN_STEPS as f64);
    let step_eigs: Vec<HermitianEigen> = (0..RF_MIN_STEPS)
        .map(|k| HermitianEigen::new(&hamiltonian_for_field(model, &ops, field_at(model, (k as f64 + 0.5) * dt))))
        .collect();
    let step_props: Vec<CMatrix> = step_eigs.iter().map(|e| e.propagator(dt)).collect();
    let mut u = CMatrix::identity(DIM, DIM);
    let mut step = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while (step + 1) as f64 * dt <= t {
            u = &step_props[step % RF_MIN_STEPS] * &u;
            step += 1;
        }
        if t == 0.0 {
            out.push(1.0);
            continue;
        }
        let rest = t - step as f64 * dt;
        let partial = step_eigs[step % RF_MIN_STEPS].propagator(rest);
        out.push(at(&(partial * &u)));
    }
    Ok(out)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::param("times", "must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("times", "must be non-decreasing"));
    }
    Ok(())
}

/// Outcome of a recombination run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YieldResult {
    pub singlet_yield: f64,
    pub triplet_yield: f64,
    /// `Tr rho(horizon)`.
    pub surviving: f64,
    /// Horizon actually integrated (rounded up to whole RF steps).
    pub horizon: f64,
    /// `(t, p_S(t), Tr rho(t))` samples, when requested.
    pub curve: Option<Vec<[f64; 3]>>,
}

const AUG: usize = DIM * DIM + 2;

/// Exact map of `x = [vec rho; Y_S; Y_T]` (column-stacked `vec`) over a step
/// of length `dt` at constant `h` under
/// `d rho/dt = -i (H_eff rho - rho H_eff^dagger)`,
/// `H_eff = h - i k_s Q_S / 2 - i k_t Q_T / 2`, `dY_S/dt = k_s Tr(Q_S rho)`.
///
/// With `A = -i H_eff` and `V = exp(A dt)`, `rho -> V rho V^dagger` and
/// `Y_S += k_s Tr(F_S rho)` where `F_S = int_0^dt exp(A^dagger s) Q_S exp(A s) ds`
/// is read off the block exponential `exp([[-A^dagger, Q], [0, A]] dt)`.
///
/// The step is split into `2^m` pieces with `max(k) dt / 2^m <= 1` so the
/// growing `-A^dagger` block stays well conditioned, then squared back up.
fn step_map(model: &RadicalPairModel, h: &CMatrix, q_s: &CMatrix, q_t: &CMatrix, dt: f64) -> CMatrix {
    let rate = model.k_s.max(model.k_t) * dt;
    let halvings = if rate > 1.0 { rate.log2().ceil() as u32 } else { 0 };
    let mut m = substep_map(model, h, q_s, q_t, dt / 2f64.powi(halvings as i32));
    for _ in 0..halvings {
        m = &m * &m;
    }
    m
}

fn substep_map(model: &RadicalPairModel, h: &CMatrix, q_s: &CMatrix, q_t: &CMatrix, dt: f64) -> CMatrix {
    let a = (h - q_s * c(0.0, 0.5 * model.k_s) - q_t * c(0.0, 0.5 * model.k_t)) * c(0.0, -1.0);
    let v = (&a * c(dt, 0.0)).exp();
    let gram = |q: &CMatrix| {
        let mut block = CMatrix::zeros(2 * DIM, 2 * DIM);
        block.view_mut((0, 0), (DIM, DIM)).copy_from(&(-a.adjoint()));
        block.view_mut((0, DIM), (DIM, DIM)).copy_from(q);
        block.view_mut((DIM, DIM), (DIM, DIM)).copy_from(&a);
        let e = (block * c(dt, 0.0)).exp();
        v.adjoint() * e.view((0, DIM), (DIM, DIM))
    };
    let (f_s, f_t) = (gram(q_s), gram(q_t));
    let mut m = CMatrix::zeros(AUG, AUG);
    m.view_mut((0, 0), (DIM * DIM, DIM * DIM)).copy_from(&v.conjugate().kronecker(&v));
    for col in 0..DIM {
        for row in 0..DIM {
            // Tr(F rho) = sum_{ij} F_ji rho_ij and rho_ij sits at j*DIM + i.
            let idx = col * DIM + row;
            m[(DIM * DIM, idx)] = f_s[(col, row)] * model.k_s;
            m[(DIM * DIM + 1, idx)] = f_t[(col, row)] * model.k_t;
        }
    }
    m[(DIM * DIM, DIM * DIM)] = c(1.0, 0.0);
    m[(DIM * DIM + 1, DIM * DIM + 1)] = c(1.0, 0.0);
    m
}

fn augmented_start() -> CVector {
    let rho = initial_state();
    let mut x = CVector::zeros(AUG);
    for col in 0..DIM {
        for row in 0..DIM {
            x[col * DIM + row] = rho[(row, col)];
        }
    }
    x
}

fn read_out(x: &CVector, q_s: &CMatrix) -> (f64, f64, f64, f64) {
    let rho = CMatrix::from_fn(DIM, DIM, |r, col| x[col * DIM + r]);
    (x[DIM * DIM].re, x[DIM * DIM + 1].re, rho.trace().re, expect(q_s, &rho))
}

fn matrix_power(m: &CMatrix, mut p: u64) -> CMatrix {
    let mut result = CMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while p > 0 {
        if p & 1 == 1 {
            result = &base * &result;
        }
        base = &base * &base;
        p >>= 1;
    }
    result
}

/// Evolves the augmented state to `horizon` and returns it with the horizon
/// reached. Static fields use one exact exponential; RF uses `steps`
/// midpoint steps per period.
fn propagate(model: &RadicalPairModel, horizon: f64, steps: usize) -> (CVector, f64) {
    let ops = spin_ops();
    let q_s = singlet_projector();
    let q_t = CMatrix::identity(DIM, DIM) - &q_s;
    let x0 = augmented_start();
    if !model.has_rf() {
        let h = hamiltonian_for_field(model, &ops, model.b_static);
        return (step_map(model, &h, &q_s, &q_t, horizon) * x0, horizon);
    }
    let dt = 1.0 / (model.rf_frequency * steps as f64);
    let total = (horizon / dt - 1e-9).ceil().max(0.0) as u64;
    let step_maps: Vec<CMatrix> = (0..steps)
        .map(|k| {
            let h = hamiltonian_for_field(model, &ops, field_at(model, (k as f64 + 0.5) * dt));
            step_map(model, &h, &q_s, &q_t, dt)
        })
        .collect();
    let mut period = CMatrix::identity(AUG, AUG);
    for m in &step_maps {
        period = m * &period;
    }
    let (periods, rest) = (total / steps as u64, (total % steps as u64) as usize);
    let mut x = matrix_power(&period, periods) * x0;
    for m in &step_maps[..rest] {
        x = m * x;
    }
    (x, total as f64 * dt)
}

/// Horizon after which at most [`SURVIVAL_THRESHOLD`] remains when both
/// channels decay at the slower rate, `ln(1/threshold) / min(k)` with a
/// safety factor of 1.25.
pub fn default_horizon(model: &RadicalPairModel) -> Result<f64> {
    let rates: Vec<f64> = [model.k_s, model.k_t].into_iter().filter(|&k| k > 0.0).collect();
    let k = rates.iter().copied().fold(f64::INFINITY, f64::min);
    if !k.is_finite() {
        return Err(Error::param("k_s/k_t", "at least one recombination rate must be positive"));
    }
    Ok(1.25 * (1.0 / SURVIVAL_THRESHOLD).ln() / k)
}

/// Singlet and triplet yields with Haberkorn recombination up to `horizon`.
pub fn singlet_yield(model: &RadicalPairModel, horizon: f64) -> Result<YieldResult> {
    model.validate()?;
    if model.k_s <= 0.0 && model.k_t <= 0.0 {
        return Err(Error::param("k_s/k_t", "singlet_yield needs a positive recombination rate"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param("horizon", "must be positive"));
    }
    let q_s = singlet_projector();
    let (x, reached) = if model.has_rf() {
        let mut steps = RF_MIN_STEPS;
        let mut prev = propagate(model, horizon, steps);
        loop {
            steps *= 2;
            let next = propagate(model, horizon, steps);
            let diff = (read_out(&next.0, &q_s).0 - read_out(&prev.0, &q_s).0).abs();
            prev = next;
            if diff <= RF_YIELD_TOL {
                break prev;
            }
            if steps >= RF_MAX_STEPS {
                return Err(Error::StepSizeFailure { t: horizon, estimate: diff, tolerance: RF_YIELD_TOL });
            }
        }
    } else {
        propagate(model, horizon, RF_MIN_STEPS)
    };
    let (ys, yt, surviving, _) = read_out(&x, &q_s);
    if surviving > SURVIVAL_THRESHOLD {
        return Err(Error::HorizonTooShort { surviving, threshold: SURVIVAL_THRESHOLD });
    }
    Ok(YieldResult { singlet_yield: ys, triplet_yield: yt, surviving, horizon: reached, curve: None })
}

/// Static-field recombination run sampled at `times`: `(t, p_S, Tr rho)`.
pub fn recombination_curve(model: &RadicalPairModel, times: &[f64]) -> Result<Vec<[f64; 3]>> {
    model.validate()?;
    if model.has_rf() {
        return Err(Error::param("rf_amplitude", "recombination curves are static-field only"));
    }
    check_times(times)?;
    let ops = spin_ops();
    let q_s = singlet_projector();
    let q_t = CMatrix::identity(DIM, DIM) - &q_s;
    let h = hamiltonian_for_field(model, &ops, model.b_static);
    let x0 = augmented_start();
    Ok(times
        .iter()
        .map(|&t| {
            let x = step_map(model, &h, &q_s, &q_t, t) * &x0;
            let (_, _, norm, ps) = read_out(&x, &q_s);
            [t, ps, norm]
        })
        .collect())
}

/// Yield against RF frequency.
#[derive(Debug, Clone, Serialize)]
pub struct RfScan {
    pub frequencies: Vec<f64>,
    pub yields: Vec<f64>,
    pub baseline: f64,
    /// Index of the largest `|yield - baseline|`.
    pub peak_index: usize,
}

impl RfScan {
    pub fn deviations(&self) -> Vec<f64> {
        self.yields.iter().map(|y| y - self.baseline).collect()
    }
}

/// Singlet yield with RF on at each frequency of `freq_grid`, against the
/// no-RF baseline. Frequencies are evaluated in parallel.
pub fn rf_disruption_scan(model: &RadicalPairModel, freq_grid: &[f64], horizon: f64) -> Result<RfScan> {
    if freq_grid.is_empty() {
        return Err(Error::param("freq_grid", "empty frequency grid"));
    }
    let baseline = singlet_yield(&model.without_rf(), horizon)?.singlet_yield;
    let yields = freq_grid
        .par_iter()
        .map(|&f| {
            let m = RadicalPairModel { rf_frequency: f, ..model.clone() };
            singlet_yield(&m, horizon).map(|r| r.singlet_yield)
        })
        .collect::<Result<Vec<_>>>()?;
    let peak_index = (0..yields.len())
        .max_by(|&a, &b| (yields[a] - baseline).abs().total_cmp(&(yields[b] - baseline).abs()))
        .unwrap_or(0);
    Ok(RfScan { frequencies: freq_grid.to_vec(), yields, baseline, peak_index })
}

/// Singlet yield against the angle between the static field and the
/// molecular axis.
pub fn orientation_sweep(model: &RadicalPairModel, angles: &[f64], horizon: f64) -> Result<Vec<f64>> {
    angles
        .par_iter()
        .map(|&theta| singlet_yield(&model.with_field_angle(theta), horizon).map(|r| r.singlet_yield))
        .collect()
}

/// `n` angles evenly covering `[0, pi]`.
pub fn angle_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect(),
    }
}
