//! Gaussian influence functionals for a linearly coupled harmonic bath.
//!
//! Conventions: `hbar = 1`, unit mass in bare actions, and the influence
//! functional is `F = exp(-gamma + i phi)` so that
//! `exp(i A) = exp(i (S[x] - S[x'])) F` with `A = S[x] - S[x'] + phi + i gamma`.

use crate::error::{Error, Result};
use crate::hilbert::{c, C64};

/// Frequency nodes of the composite Simpson rule (4096 intervals).
pub const QUADRATURE_POINTS: usize = 4097;
/// Upper frequency limit in units of the cutoff.
pub const QUADRATURE_SPAN: f64 = 20.0;

/// Relative tolerance on grid uniformity.
pub const GRID_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ohmic,
    Supraohmic,
    SingleMode,
}

/// `J(w) = eta w^s cutoff^(1-s) exp(-w/cutoff)`, or a single mode
/// `J(w) = eta delta(w - mode_freq)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub family: Family,
    pub exponent: f64,
    pub coupling: f64,
    pub cutoff: f64,
    pub mode_freq: f64,
    pub temperature: f64,
}

impl SpectralDensity {
    pub fn ohmic(coupling: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        Self {
            family: Family::Ohmic,
            exponent: 1.0,
            coupling,
            cutoff,
            mode_freq: 0.0,
            temperature,
        }
        .validated()
    }

    /// Power-law family with exponent `s` (3 is the usual choice).
    pub fn supraohmic(exponent: f64, coupling: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        Self {
            family: Family::Supraohmic,
            exponent,
            coupling,
            cutoff,
            mode_freq: 0.0,
            temperature,
        }
        .validated()
    }

    /// One oscillator of frequency `mode_freq`; `strength` multiplies both
    /// kernels.
    pub fn single_mode(strength: f64, mode_freq: f64, temperature: f64) -> Result<Self> {
        Self {
            family: Family::SingleMode,
            exponent: 1.0,
            coupling: strength,
            cutoff: 1.0,
            mode_freq,
            temperature,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be positive and finite")))
            }
        };
        positive("eta", self.coupling)?;
        positive("cutoff", self.cutoff)?;
        if !(self.exponent >= 1.0) || !self.exponent.is_finite() {
            return Err(Error::param("s", format!("{} must be >= 1", self.exponent)));
        }
        if self.family == Family::Ohmic && self.exponent != 1.0 {
            return Err(Error::param("s", "ohmic family has s = 1"));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::param("temperature", format!("{} must be >= 0", self.temperature)));
        }
        if self.family == Family::SingleMode {
            positive("mode_freq", self.mode_freq)?;
        }
        Ok(self)
    }

    /// Continuous density at `w` (zero for the single-mode family).
    pub fn density(&self, w: f64) -> f64 {
        if self.family == Family::SingleMode || w <= 0.0 {
            return 0.0;
        }
        let s = self.exponent;
        self.coupling * w.powf(s) * self.cutoff.powf(1.0 - s) * (-w / self.cutoff).exp()
    }

    /// `J(w) coth(w / 2T)`, including its finite `w -> 0` limit.
    fn thermal_density(&self, w: f64) -> f64 {
        let t = self.temperature;
        if w == 0.0 {
            return if t > 0.0 && self.exponent == 1.0 { 2.0 * t * self.coupling } else { 0.0 };
        }
        self.density(w) * thermal_factor(w, t)
    }
}

/// `coth(w / 2T)`, with `T = 0` giving 1.
fn thermal_factor(w: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        1.0 / (w / (2.0 * temperature)).tanh()
    }
}

/// Checks that `grid` is uniform and increasing; returns its step.
fn grid_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::param("tgrid", "need at least two points"));
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::param("tgrid", "must be increasing and finite"));
    }
    for (k, &t) in grid.iter().enumerate() {
        let expect = grid[0] + step * k as f64;
        if (t - expect).abs() > GRID_TOL * step.max(expect.abs()).max(1.0) {
            return Err(Error::param("tgrid", format!("non-uniform spacing at index {k}")));
        }
    }
    Ok(step)
}

/// `n` intervals on `[0, horizon]`.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| horizon * k as f64 / n as f64).collect()
}

/// Two sampled histories on a shared uniform grid.
#[derive(Debug, Clone)]
pub struct PathPair {
    tgrid: Vec<f64>,
    step: f64,
    x: Vec<f64>,
    x_prime: Vec<f64>,
}

impl PathPair {
    pub fn new(tgrid: Vec<f64>, x: Vec<f64>, x_prime: Vec<f64>) -> Result<Self> {
        let step = grid_step(&tgrid)?;
        if x.len() != tgrid.len() || x_prime.len() != tgrid.len() {
            return Err(Error::dims(format!(
                "grid has {} points, paths have {} and {}",
                tgrid.len(),
                x.len(),
                x_prime.len()
            )));
        }
        if x.iter().chain(&x_prime).any(|v| !v.is_finite()) {
            return Err(Error::param("paths", "non-finite sample"));
        }
        Ok(PathPair { tgrid, step, x, x_prime })
    }

    /// Constant histories `x = a`, `x' = b`.
    pub fn static_pair(tgrid: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        let n = tgrid.len();
        Self::new(tgrid, vec![a; n], vec![b; n])
    }

    pub fn tgrid(&self) -> &[f64] {
        &self.tgrid
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn x_prime(&self) -> &[f64] {
        &self.x_prime
    }

    pub fn len(&self) -> usize {
        self.tgrid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tgrid.is_empty()
    }

    fn difference(&self) -> Vec<f64> {
        self.x.iter().zip(&self.x_prime).map(|(a, b)| a - b).collect()
    }

    fn sum(&self) -> Vec<f64> {
        self.x.iter().zip(&self.x_prime).map(|(a, b)| a + b).collect()
    }
}

/// Noise `nu(t)` and dissipation `eta(t)` kernels sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct BathKernels {
    pub tgrid: Vec<f64>,
    pub nu: Vec<f64>,
    pub eta: Vec<f64>,
}

impl BathKernels {
    /// Identically zero kernels (closed system).
    pub fn zero(tgrid: Vec<f64>) -> Self {
        let n = tgrid.len();
        BathKernels { tgrid, nu: vec![0.0; n], eta: vec![0.0; n] }
    }

    /// Largest `|nu(t) - nu(-t)|` over grid points whose mirror image is
    /// also on the grid.
    pub fn evenness_defect(&self) -> f64 {
        let Some(z) = self.zero_index() else { return 0.0 };
        let span = z.min(self.tgrid.len() - 1 - z);
        (1..=span)
            .map(|m| (self.nu[z + m] - self.nu[z - m]).abs())
            .fold(0.0, f64::max)
    }

    fn zero_index(&self) -> Option<usize> {
        let step = grid_step(&self.tgrid).ok()?;
        let k = (-self.tgrid[0] / step).round();
        if k < 0.0 || k as usize >= self.tgrid.len() {
            return None;
        }
        let k = k as usize;
        (self.tgrid[k].abs() <= 1e-9 * step).then_some(k)
    }

    /// Lag-indexed views `nu(m dt)`, `eta(m dt)` for `m = 0..n`.
    fn lags(&self, step: f64, n: usize) -> Result<(&[f64], &[f64])> {
        let own = grid_step(&self.tgrid)?;
        if (own - step).abs() > GRID_TOL * step.max(1.0) * 1e3 {
            return Err(Error::dims(format!("kernel step {own} vs path step {step}")));
        }
        let z = self
            .zero_index()
            .ok_or_else(|| Error::dims("kernel grid does not contain t = 0"))?;
        if z + n > self.tgrid.len() {
            return Err(Error::dims(format!(
                "kernel grid covers {} non-negative lags, paths need {n}",
                self.tgrid.len() - z
            )));
        }
        Ok((&self.nu[z..z + n], &self.eta[z..z + n]))
    }
}

/// Samples the bath kernels on `tgrid` with the default quadrature.
pub fn kernels_from_spectral_density(j: &SpectralDensity, tgrid: &[f64]) -> Result<BathKernels> {
    kernels_with_quadrature(j, tgrid, QUADRATURE_POINTS)
}

/// As [`kernels_from_spectral_density`] with `points` Simpson nodes on
/// `[0, QUADRATURE_SPAN * cutoff]` (`points` odd, at least 3).
pub fn kernels_with_quadrature(j: &SpectralDensity, tgrid: &[f64], points: usize) -> Result<BathKernels> {
    let j = j.validated()?;
    grid_step(tgrid)?;
    if j.family == Family::SingleMode {
        let strength = j.coupling;
        let coth = thermal_factor(j.mode_freq, j.temperature);
        let w = j.mode_freq;
        return Ok(BathKernels {
            tgrid: tgrid.to_vec(),
            nu: tgrid.iter().map(|t| strength * coth * (w * t).cos()).collect(),
            eta: tgrid.iter().map(|t| strength * (w * t).sin()).collect(),
        });
    }
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::param("points", "Simpson rule needs an odd node count >= 3"));
    }
    let h = QUADRATURE_SPAN * j.cutoff / (points - 1) as f64;
    let mut nodes = Vec::with_capacity(points);
    for k in 0..points {
        let w = h * k as f64;
        let simpson = if k == 0 || k == points - 1 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let weight = simpson * h / 3.0;
        nodes.push((w, weight * j.thermal_density(w), weight * j.density(w)));
    }
    let mut nu = Vec::with_capacity(tgrid.len());
    let mut eta = Vec::with_capacity(tgrid.len());
    for &t in tgrid {
        let (mut a, mut b) = (0.0, 0.0);
        for &(w, wn, we) in &nodes {
            let (s, c) = (w * t).sin_cos();
            a += wn * c;
            b += we * s;
        }
        nu.push(a);
        eta.push(b);
    }
    if nu.iter().chain(&eta).any(|v| !v.is_finite()) {
        return Err(Error::Undefined("non-finite bath kernel".into()));
    }
    Ok(BathKernels { tgrid: tgrid.to_vec(), nu, eta })
}

/// Decoherence exponent and phase of `F[x, x']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceResult {
    pub gamma: f64,
    pub phi: f64,
}

impl InfluenceResult {
    /// `F = exp(-gamma + i phi)`.
    pub fn value(&self) -> C64 {
        C64::from_polar((-self.gamma).exp(), self.phi)
    }
}

/// Trapezoid weights on `n` points; a single point has zero measure.
fn trapezoid(n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    if n == 1 {
        w[0] = 0.0;
    } else if n > 1 {
        w[0] = 0.5;
        w[n - 1] = 0.5;
    }
    w
}

/// `gamma = sum_{j<=i} c_i c_j w_ij D_i nu(t_i - t_j) D_j dt^2` and
/// `phi = sum_{j<=i} c_i c_j w_ij D_i eta(t_i - t_j) S_j dt^2` with
/// `D = x - x'`, `S = x + x'`, trapezoid weights `c` and `w_ii = 1/2`.
pub fn influence_functional(paths: &PathPair, kernels: &BathKernels) -> Result<InfluenceResult> {
    let n = paths.len();
    let (nu, eta) = kernels.lags(paths.step, n)?;
    let d = paths.difference();
    let s = paths.sum();
    let cw = trapezoid(n);
    let (mut gamma, mut phi) = (0.0, 0.0);
    for i in 0..n {
        if d[i] == 0.0 {
            continue;
        }
        let (mut g_row, mut p_row) = (0.5 * cw[i] * nu[0] * d[i], 0.5 * cw[i] * eta[0] * s[i]);
        for j in 0..i {
            g_row += cw[j] * nu[i - j] * d[j];
            p_row += cw[j] * eta[i - j] * s[j];
        }
        gamma += cw[i] * d[i] * g_row;
        phi += cw[i] * d[i] * p_row;
    }
    let dt2 = paths.step * paths.step;
    Ok(InfluenceResult { gamma: gamma * dt2, phi: phi * dt2 })
}

/// `S[x] = sum_k c_k L(x_k, xdot_k, t_k) dt` with central differences for
/// `xdot` in the interior and one-sided differences at the ends.
pub fn bare_action<L: Fn(f64, f64, f64) -> f64>(tgrid: &[f64], x: &[f64], lagrangian: &L) -> Result<f64> {
    let step = grid_step(tgrid)?;
    if x.len() != tgrid.len() {
        return Err(Error::dims(format!("grid has {} points, path {}", tgrid.len(), x.len())));
    }
    let n = x.len();
    let cw = trapezoid(n);
    let mut total = 0.0;
    for k in 0..n {
        let v = if k == 0 {
            (x[1] - x[0]) / step
        } else if k == n - 1 {
            (x[n - 1] - x[n - 2]) / step
        } else {
            (x[k + 1] - x[k - 1]) / (2.0 * step)
        };
        total += cw[k] * lagrangian(x[k], v, tgrid[k]);
    }
    Ok(total * step)
}

/// Free-particle Lagrangian `xdot^2 / 2`.
pub fn free_particle(_x: f64, v: f64, _t: f64) -> f64 {
    0.5 * v * v
}

/// `A = S[x] - S[x'] + phi + i gamma`.
pub fn effective_action<L: Fn(f64, f64, f64) -> f64>(
    paths: &PathPair,
    lagrangian: &L,
    kernels: &BathKernels,
) -> Result<C64> {
    let sx = bare_action(&paths.tgrid, &paths.x, lagrangian)?;
    let sxp = bare_action(&paths.tgrid, &paths.x_prime, lagrangian)?;
    let f = influence_functional(paths, kernels)?;
    Ok(c(sx - sxp + f.phi, f.gamma))
}

/// `gamma(t)` and `phi(t)` for two static paths at `+d/2` and `-d/2`.
#[derive(Debug, Clone)]
pub struct ExponentCurve {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
}

impl ExponentCurve {
    /// `t,gamma,phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,gamma,phi\n");
        for k in 0..self.times.len() {
            out.push_str(&format!("{},{},{}\n", self.times[k], self.gamma[k], self.phi[k]));
        }
        out
    }

    /// Linearly interpolated `gamma` at `t` (clamped to the window).
    pub fn gamma_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if n == 0 {
            return f64::NAN;
        }
        if t <= self.times[0] {
            return self.gamma[0];
        }
        if t >= self.times[n - 1] {
            return self.gamma[n - 1];
        }
        let step = self.times[1] - self.times[0];
        let k = (((t - self.times[0]) / step).floor() as usize).min(n - 2);
        let f = (t - self.times[k]) / step;
        self.gamma[k] * (1.0 - f) + self.gamma[k + 1] * f
    }
}

/// Evaluates the static two-path exponent at every grid time
/// `t_k = k horizon / n_steps` in `O(n)` using lag-weight prefix sums:
/// `gamma_k = d^2 dt^2 [ (k - 1/2) nu_0 / 2 + sum_{0<m<k} (k - m) nu_m + nu_k / 4 ]`.
pub fn decoherence_exponent_curve(j: &SpectralDensity, d: f64, horizon: f64, n_steps: usize) -> Result<ExponentCurve> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::param("d", format!("{d} must be a non-negative separation")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param("horizon", format!("{horizon} must be positive")));
    }
    if n_steps == 0 {
        return Err(Error::param("steps", "need at least one step"));
    }
    let times = uniform_grid(horizon, n_steps);
    let kernels = kernels_from_spectral_density(j, &times)?;
    let dt = horizon / n_steps as f64;
    let scale = d * d * dt * dt;
    let nu = &kernels.nu;
    let mut gamma = Vec::with_capacity(times.len());
    gamma.push(0.0);
    // a = sum_{0<m<k} nu_m, b = sum_{0<m<k} m nu_m
    let (mut a, mut b) = (0.0, 0.0);
    for k in 1..times.len() {
        let kf = k as f64;
        let g = 0.5 * (kf - 0.5) * nu[0] + kf * a - b + 0.25 * nu[k];
        gamma.push(scale * g);
        a += nu[k];
        b += kf * nu[k];
    }
    let phi = vec![0.0; times.len()];
    Ok(ExponentCurve { times, gamma, phi })
}

#[cfg(test)]
mod tests;
