//! C ABI over `openq`.
//!
//! Conventions:
//! - every fallible call returns an [`OqStatus`]; results go through out-pointers;
//! - objects are opaque handles created by `oq_*_new`/`oq_*_from_*` and released
//!   with the matching `oq_*_free` (null is accepted and ignored);
//! - after a failure, `oq_last_error_message` describes it (thread-local);
//! - strings returned by the library are released with `oq_string_free`;
//! - complex arrays are passed as separate real and imaginary arrays;
//! - matrices are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use openq::compensation::{self, InteractionSet, Pauli, StabilizerCode, DEGENERACY_TOL};
use openq::evolution::{self, LindbladModel, Trajectory};
use openq::hilbert::{purity, CMatrix, CVector, DensityOperator, Operator, StateVector, C64};
use openq::influence::{self, SpectralDensity};
use openq::interferometer::{self, TwoPathState};
use openq::radical_pair::{self, RadicalPairModel};
use openq::stats::{self, Direction};
use openq::Error;

/// Call outcome. Values 2–4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OqStatus {
    Ok = 0,
    /// Invalid parameter, dimension mismatch or malformed input.
    Invalid = 2,
    /// Numerical failure: tolerance not met, horizon too short, undefined result.
    Numeric = 3,
    /// File or stream failure.
    Io = 4,
    /// A required pointer was null.
    NullPointer = 5,
    /// A string argument was not valid UTF-8.
    Utf8 = 6,
    /// An output buffer was smaller than required.
    BufferTooSmall = 7,
    /// Internal panic caught at the boundary.
    Panic = 8,
}

/// Direction of a one-tailed test.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OqDirection {
    /// Alternative: mean(a - b) > 0.
    Greater = 0,
    /// Alternative: mean(a - b) < 0.
    Less = 1,
}

impl From<OqDirection> for Direction {
    fn from(d: OqDirection) -> Self {
        match d {
            OqDirection::Greater => Direction::Greater,
            OqDirection::Less => Direction::Less,
        }
    }
}

/// Opaque state vector.
pub struct OqState(StateVector);
/// Opaque operator (Hamiltonian, unitary, observable).
pub struct OqOperator(Operator);
/// Opaque density operator.
pub struct OqDensity(DensityOperator);
/// Opaque time series of density operators.
pub struct OqTrajectory(Trajectory);
/// Opaque bath spectral density.
pub struct OqSpectralDensity(SpectralDensity);
/// Opaque radical-pair model.
pub struct OqRadicalPair(RadicalPairModel);

/// Paired one-tailed t-test outcome.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OqTTest {
    pub t_stat: f64,
    pub df: usize,
    pub p_one_tailed: f64,
    pub mean_diff: f64,
    pub sd_diff: f64,
}

/// Recombination yields.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct OqYield {
    pub singlet: f64,
    pub triplet: f64,
    /// Population left at the horizon.
    pub surviving: f64,
    /// Horizon actually integrated, s.
    pub horizon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(OqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            3 => OqStatus::Numeric,
            4 => OqStatus::Io,
            _ => OqStatus::Invalid,
        };
        Fail(status, e.to_string())
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

/// Runs `f`, converting errors and panics into a status and recording the message.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> OqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OqStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            OqStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(OqStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn by_ref<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(OqStatus::Utf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle_out<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    write_out(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn complex_vec(re: *const f64, im: *const f64, len: usize) -> FfiResult<Vec<C64>> {
    let re = slice(re, len, "re")?;
    let im = if im.is_null() { None } else { Some(slice(im, len, "im")?) };
    Ok((0..len).map(|k| C64::new(re[k], im.map_or(0.0, |v| v[k]))).collect())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn ensure_len(got: usize, need: usize, name: &str) -> FfiResult<()> {
    if got < need {
        return Err(Fail(OqStatus::BufferTooSmall, format!("`{name}` holds {got}, need {need}")));
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn oq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn oq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a state handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_state_free(h: *mut OqState) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a operator handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_operator_free(h: *mut OqOperator) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a density handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_density_free(h: *mut OqDensity) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a trajectory handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_trajectory_free(h: *mut OqTrajectory) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a spectral-density handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_spectral_free(h: *mut OqSpectralDensity) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Releases a radical-pair handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn oq_radical_pair_free(h: *mut OqRadicalPair) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Normalized state with subsystem dimensions `dims[0..n_dims]` from
/// amplitudes `re`/`im` (length = product of dims; `im` may be null).
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn oq_state_new(
    dims: *const usize,
    n_dims: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut OqState,
) -> OqStatus {
    guard(|| {
        let dims = slice(dims, n_dims, "dims")?.to_vec();
        let n = dims.iter().product();
        let amps = CVector::from_vec(complex_vec(re, im, n)?);
        handle_out(out, OqState(StateVector::normalized(dims, amps)?))
    })
}

/// `<a|b>`.
///
/// # Safety
/// Handles must be live; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn oq_state_inner(a: *const OqState, b: *const OqState, re: *mut f64, im: *mut f64) -> OqStatus {
    guard(|| {
        let z = by_ref(a, "a")?.0.inner(&by_ref(b, "b")?.0)?;
        write_out(re, z.re, "re")?;
        write_out(im, z.im, "im")
    })
}

/// `|psi><psi|`.
///
/// # Safety
/// `state` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_state_to_density(state: *const OqState, out: *mut *mut OqDensity) -> OqStatus {
    guard(|| handle_out(out, OqDensity(by_ref(state, "state")?.0.to_density())))
}

/// Operator from a row-major `dim x dim` matrix, `dim` = product of dims
/// (`im` may be null).
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn oq_operator_new(
    dims: *const usize,
    n_dims: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut OqOperator,
) -> OqStatus {
    guard(|| {
        let dims = slice(dims, n_dims, "dims")?.to_vec();
        let n: usize = dims.iter().product();
        let m = CMatrix::from_row_slice(n, n, &complex_vec(re, im, n * n)?);
        handle_out(out, OqOperator(Operator::new(dims, m)?))
    })
}

/// Density operator from a row-major matrix; must be Hermitian, PSD, unit trace.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn oq_density_new(
    dims: *const usize,
    n_dims: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut OqDensity,
) -> OqStatus {
    guard(|| {
        let dims = slice(dims, n_dims, "dims")?.to_vec();
        let n: usize = dims.iter().product();
        let m = CMatrix::from_row_slice(n, n, &complex_vec(re, im, n * n)?);
        handle_out(out, OqDensity(DensityOperator::new(dims, m)?))
    })
}

/// Total Hilbert-space dimension.
///
/// # Safety
/// `rho` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_density_dim(rho: *const OqDensity, out: *mut usize) -> OqStatus {
    guard(|| write_out(out, by_ref(rho, "rho")?.0.dim(), "out"))
}

/// Matrix element `rho_ij`.
///
/// # Safety
/// `rho` must be live; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn oq_density_get(rho: *const OqDensity, i: usize, j: usize, re: *mut f64, im: *mut f64) -> OqStatus {
    guard(|| {
        let rho = &by_ref(rho, "rho")?.0;
        if i >= rho.dim() || j >= rho.dim() {
            return Err(Fail(OqStatus::Invalid, format!("index ({i}, {j}) outside dimension {}", rho.dim())));
        }
        let z = rho.get(i, j);
        write_out(re, z.re, "re")?;
        write_out(im, z.im, "im")
    })
}

/// `Tr rho^2`.
///
/// # Safety
/// `rho` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_density_purity(rho: *const OqDensity, out: *mut f64) -> OqStatus {
    guard(|| write_out(out, purity(&by_ref(rho, "rho")?.0), "out"))
}

/// Reduced state on the subsystems `keep[0..n_keep]` (ascending).
///
/// # Safety
/// `rho` must be live; `keep` valid for `n_keep`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_density_partial_trace(
    rho: *const OqDensity,
    keep: *const usize,
    n_keep: usize,
    out: *mut *mut OqDensity,
) -> OqStatus {
    guard(|| {
        let reduced = by_ref(rho, "rho")?.0.partial_trace(slice(keep, n_keep, "keep")?)?;
        handle_out(out, OqDensity(reduced))
    })
}

/// Closed evolution `rho(t) = U rho0 U^dagger` at each of `times[0..n_times]`.
///
/// # Safety
/// Handles must be live; `times` valid for `n_times`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_evolve_closed(
    h: *const OqOperator,
    rho0: *const OqDensity,
    times: *const f64,
    n_times: usize,
    out: *mut *mut OqTrajectory,
) -> OqStatus {
    guard(|| {
        let traj = evolution::evolve_closed(&by_ref(h, "h")?.0, &by_ref(rho0, "rho0")?.0, slice(times, n_times, "times")?)?;
        handle_out(out, OqTrajectory(traj))
    })
}

/// Lindblad evolution of one qubit with `H = omega Z / 2` and a single channel:
/// `channel` 0 = dephasing `sqrt(rate) Z`, 1 = amplitude damping `sqrt(rate) sigma_-`.
///
/// # Safety
/// `rho0` must be live; `times` valid for `n_times`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_evolve_qubit_lindblad(
    channel: u32,
    rate: f64,
    omega: f64,
    rho0: *const OqDensity,
    times: *const f64,
    n_times: usize,
    out: *mut *mut OqTrajectory,
) -> OqStatus {
    guard(|| {
        let model = match channel {
            0 => LindbladModel::qubit_dephasing(rate)?,
            1 => LindbladModel::qubit_amplitude_damping(rate)?,
            other => return Err(Fail(OqStatus::Invalid, format!("unknown channel {other}"))),
        };
        let h = openq::hilbert::pauli::z().scale_real(0.5 * omega);
        let model = model.with_lamb_shift(&h)?;
        let traj = evolution::evolve_lindblad(&model, &by_ref(rho0, "rho0")?.0, slice(times, n_times, "times")?)?;
        handle_out(out, OqTrajectory(traj))
    })
}

/// Number of time points.
///
/// # Safety
/// `traj` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_trajectory_len(traj: *const OqTrajectory, out: *mut usize) -> OqStatus {
    guard(|| write_out(out, by_ref(traj, "traj")?.0.len(), "out"))
}

/// Copy of the state at time index `k`.
///
/// # Safety
/// `traj` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_trajectory_state(traj: *const OqTrajectory, k: usize, out: *mut *mut OqDensity) -> OqStatus {
    guard(|| {
        let traj = &by_ref(traj, "traj")?.0;
        let state = traj
            .states
            .get(k)
            .ok_or_else(|| Fail(OqStatus::Invalid, format!("index {k} outside {} points", traj.len())))?;
        handle_out(out, OqDensity(state.clone()))
    })
}

/// Trajectory as CSV (`t`, upper triangle, `purity`, `l1_coherence`); free
/// with `oq_string_free`.
///
/// # Safety
/// `traj` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_trajectory_csv(traj: *const OqTrajectory, out: *mut *mut c_char) -> OqStatus {
    guard(|| write_out(out, owned_string(by_ref(traj, "traj")?.0.to_csv()), "out"))
}

/// Fringe visibility of a balanced two-path state whose records overlap by
/// `<E2|E1>` = `overlap_re + i overlap_im`, sampled on `points` screen points
/// over one fringe period.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oq_visibility_for_overlap(overlap_re: f64, overlap_im: f64, points: usize, out: *mut f64) -> OqStatus {
    guard(|| {
        let state = TwoPathState::with_overlap(C64::new(overlap_re, overlap_im))?;
        let profile = interferometer::screen_intensity(&state, &interferometer::grid(0.0, 1.0, points));
        write_out(out, interferometer::visibility(&profile)?, "out")
    })
}

/// Fringe visibility for explicit which-path records `env1`, `env2`.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_visibility_for_records(
    env1: *const OqState,
    env2: *const OqState,
    points: usize,
    out: *mut f64,
) -> OqStatus {
    guard(|| {
        let state = TwoPathState::balanced(by_ref(env1, "env1")?.0.clone(), by_ref(env2, "env2")?.0.clone())?;
        let profile = interferometer::screen_intensity(&state, &interferometer::grid(0.0, 1.0, points));
        write_out(out, interferometer::visibility(&profile)?, "out")
    })
}

/// Ohmic spectral density `eta w e^{-w/cutoff}` at temperature `temperature`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oq_spectral_ohmic(eta: f64, cutoff: f64, temperature: f64, out: *mut *mut OqSpectralDensity) -> OqStatus {
    guard(|| handle_out(out, OqSpectralDensity(SpectralDensity::ohmic(eta, cutoff, temperature)?)))
}

/// Power-law spectral density with exponent `s`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oq_spectral_supraohmic(
    s: f64,
    eta: f64,
    cutoff: f64,
    temperature: f64,
    out: *mut *mut OqSpectralDensity,
) -> OqStatus {
    guard(|| handle_out(out, OqSpectralDensity(SpectralDensity::supraohmic(s, eta, cutoff, temperature)?)))
}

/// A single bath oscillator of frequency `mode_freq` with coupling strength `strength`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oq_spectral_single_mode(
    strength: f64,
    mode_freq: f64,
    temperature: f64,
    out: *mut *mut OqSpectralDensity,
) -> OqStatus {
    guard(|| handle_out(out, OqSpectralDensity(SpectralDensity::single_mode(strength, mode_freq, temperature)?)))
}

/// Decoherence exponent `gamma(t)` and phase `phi(t)` for two static paths
/// separated by `d`, on `n_steps + 1` points over `[0, horizon]`. Each output
/// array must hold `n_steps + 1` values (`phi` may be null).
///
/// # Safety
/// `j` must be live; arrays writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn oq_decoherence_exponent(
    j: *const OqSpectralDensity,
    d: f64,
    horizon: f64,
    n_steps: usize,
    gamma: *mut f64,
    phi: *mut f64,
    len: usize,
) -> OqStatus {
    guard(|| {
        let curve = influence::decoherence_exponent_curve(&by_ref(j, "j")?.0, d, horizon, n_steps)?;
        ensure_len(len, curve.gamma.len(), "gamma")?;
        slice_mut(gamma, len, "gamma")?[..curve.gamma.len()].copy_from_slice(&curve.gamma);
        if !phi.is_null() {
            slice_mut(phi, len, "phi")?[..curve.phi.len()].copy_from_slice(&curve.phi);
        }
        Ok(())
    })
}

/// Dimensions of the decoherence-free subspaces of collective dephasing on
/// `n_qubits`. Writes up to `cap` dimensions and the total count to `count`.
///
/// # Safety
/// `dims` writable for `cap`; `count` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_dfs_dimensions(n_qubits: usize, dims: *mut usize, cap: usize, count: *mut usize) -> OqStatus {
    guard(|| {
        let bases = compensation::find_dfs(&InteractionSet::collective_dephasing(n_qubits)?, DEGENERACY_TOL)?;
        write_out(count, bases.len(), "count")?;
        ensure_len(cap, bases.len(), "dims")?;
        let out = slice_mut(dims, cap, "dims")?;
        for (slot, b) in out.iter_mut().zip(&bases) {
            *slot = b.dim();
        }
        Ok(())
    })
}

/// Recovery fidelity of `code` ("bitflip", "phaseflip", "shor9") for the
/// logical qubit `logical` after a rotation `exp(-i theta P / 2)` about `axis`
/// ('x', 'y', 'z') on physical `qubit`, one value per angle in degrees.
///
/// # Safety
/// `code` must be a NUL-terminated string; `logical` live; arrays valid for `n`.
#[no_mangle]
pub unsafe extern "C" fn oq_qec_fidelity_sweep(
    code: *const c_char,
    logical: *const OqState,
    axis: c_char,
    qubit: usize,
    thetas_deg: *const f64,
    n: usize,
    fidelities: *mut f64,
) -> OqStatus {
    guard(|| {
        let code = StabilizerCode::by_name(string(code, "code")?)?;
        let axis = match axis as u8 {
            b'x' | b'X' => Pauli::X,
            b'y' | b'Y' => Pauli::Y,
            b'z' | b'Z' => Pauli::Z,
            other => return Err(Fail(OqStatus::Invalid, format!("unknown axis `{}`", other as char))),
        };
        let fid = compensation::fidelity_sweep(&code, &by_ref(logical, "logical")?.0, axis, qubit, slice(thetas_deg, n, "thetas_deg")?)?;
        slice_mut(fidelities, n, "fidelities")?.copy_from_slice(&fid);
        Ok(())
    })
}

/// Radical-pair model from JSON with keys `a_iso`, `a_axial` (mT), `b_static`,
/// `rf_amplitude` (uT), `rf_frequency` (Hz), `rf_axis`, `k_s`, `k_t` (1/s),
/// `gamma_e` (MHz/mT); absent keys take defaults, unknown keys are rejected.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_radical_pair_from_json(json: *const c_char, out: *mut *mut OqRadicalPair) -> OqStatus {
    guard(|| {
        let model: RadicalPairModel = serde_json::from_str(string(json, "json")?)
            .map_err(|e| Fail(OqStatus::Invalid, format!("radical-pair model: {e}")))?;
        model.validate()?;
        handle_out(out, OqRadicalPair(model))
    })
}

/// Recombination yields integrated to `horizon` seconds (`<= 0` selects the
/// default horizon).
///
/// # Safety
/// `model` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_radical_pair_yield(model: *const OqRadicalPair, horizon: f64, out: *mut OqYield) -> OqStatus {
    guard(|| {
        let model = &by_ref(model, "model")?.0;
        let horizon = if horizon > 0.0 { horizon } else { radical_pair::default_horizon(model)? };
        let r = radical_pair::singlet_yield(model, horizon)?;
        let y = OqYield { singlet: r.singlet_yield, triplet: r.triplet_yield, surviving: r.surviving, horizon: r.horizon };
        write_out(out, y, "out")
    })
}

/// Singlet probability without recombination at `times[0..n]` (s).
///
/// # Safety
/// `model` must be live; arrays valid for `n`.
#[no_mangle]
pub unsafe extern "C" fn oq_radical_pair_singlet_probability(
    model: *const OqRadicalPair,
    times: *const f64,
    n: usize,
    out: *mut f64,
) -> OqStatus {
    guard(|| {
        let ps = radical_pair::singlet_probability(&by_ref(model, "model")?.0, slice(times, n, "times")?)?;
        slice_mut(out, n, "out")?.copy_from_slice(&ps);
        Ok(())
    })
}

/// Singlet yield with the RF field at each of `freqs[0..n]` (Hz).
///
/// # Safety
/// `model` must be live; arrays valid for `n`.
#[no_mangle]
pub unsafe extern "C" fn oq_radical_pair_rf_scan(
    model: *const OqRadicalPair,
    freqs: *const f64,
    n: usize,
    horizon: f64,
    yields: *mut f64,
) -> OqStatus {
    guard(|| {
        let model = &by_ref(model, "model")?.0;
        let horizon = if horizon > 0.0 { horizon } else { radical_pair::default_horizon(model)? };
        let scan = radical_pair::rf_disruption_scan(model, slice(freqs, n, "freqs")?, horizon)?;
        slice_mut(yields, n, "yields")?.copy_from_slice(&scan.yields);
        Ok(())
    })
}

/// Paired one-tailed t-test on `a[0..n]` and `b[0..n]`.
///
/// # Safety
/// Arrays valid for `n`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_paired_t_test(
    a: *const f64,
    b: *const f64,
    n: usize,
    direction: OqDirection,
    out: *mut OqTTest,
) -> OqStatus {
    guard(|| {
        let r = stats::paired_t_one_tailed(slice(a, n, "a")?, slice(b, n, "b")?, direction.into())?;
        let t = OqTTest { t_stat: r.t_stat, df: r.df, p_one_tailed: r.p_one_tailed, mean_diff: r.mean_diff, sd_diff: r.sd_diff };
        write_out(out, t, "out")
    })
}

/// Power of the one-tailed paired t-test.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oq_power(effect: f64, sd: f64, n: usize, alpha: f64, direction: OqDirection, out: *mut f64) -> OqStatus {
    guard(|| write_out(out, stats::power_analysis(effect, sd, n, alpha, direction.into())?.power, "out"))
}

/// Four-arm protocol report as JSON for the trial CSV at `path` (null selects
/// the built-in HL-60 fixture); free with `oq_string_free`.
///
/// # Safety
/// `path` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oq_stats_report_json(path: *const c_char, out: *mut *mut c_char) -> OqStatus {
    guard(|| {
        let records = if path.is_null() { stats::hl60_fixture() } else { stats::load_trials(string(path, "path")?)? };
        write_out(out, owned_string(stats::protocol_report(&records)?.to_json()), "out")
    })
}

/// Runs the command-line front end with `argv[0..argc]` (no program name).
/// Captured stdout and stderr are returned as strings (free with
/// `oq_string_free`; either out-pointer may be null); `exit_code` receives
/// the process status the command line would use.
///
/// # Safety
/// `argv` holds `argc` NUL-terminated strings; out-pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn oq_cli_run(
    argv: *const *const c_char,
    argc: usize,
    stdout: *mut *mut c_char,
    stderr: *mut *mut c_char,
    exit_code: *mut i32,
) -> OqStatus {
    guard(|| {
        let mut args = vec!["openq".to_string()];
        for (k, &p) in slice(argv, argc, "argv")?.iter().enumerate() {
            args.push(string(p, &format!("argv[{k}]"))?.to_string());
        }
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = openq::cli::run(args, &mut out, &mut err);
        write_out(exit_code, code, "exit_code")?;
        if !stdout.is_null() {
            stdout.write(owned_string(String::from_utf8_lossy(&out).into_owned()));
        }
        if !stderr.is_null() {
            stderr.write(owned_string(String::from_utf8_lossy(&err).into_owned()));
        }
        Ok(())
    })
}
