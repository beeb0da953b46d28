//! Command-line front end: one subcommand per module.
//!
//! Every parameter can come from a flat JSON config (`--config`, snake_case
//! keys) or from the matching `--kebab-case` flag; flags win. Unknown keys
//! are rejected. Failures print one JSON line on stderr and exit with
//! [`Error::exit_code`] (2 config, 3 numeric, 4 I/O).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::compensation::{self, InteractionSet, Pauli, StabilizerCode, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::evolution::{self, JointModel, LindbladModel, Trajectory};
use crate::hilbert::random::{random_state, seeded};
use crate::hilbert::{c, pauli, DensityOperator, StateVector, C64};
use crate::influence::{self, SpectralDensity};
use crate::interferometer::{self, PhaseFn, TwoPathState};
use crate::radical_pair::{self, RadicalPairModel};
use crate::stats;
use crate::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// Human-readable table (`stats` only).
    Table,
}

/// Keys shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config file with snake_case keys; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for the ChaCha8 generator (`seed_from_u64`); default 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format; default csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Declares a parameter struct whose fields are all optional, usable both as
/// clap flags and as strict serde config keys, with `merge` letting flags
/// override file values.
macro_rules! params {
    ($(#[$sm:meta])* $name:ident { $( $(#[$m:meta])* $field:ident : $ty:ty ),* $(,)? }) => {
        $(#[$sm])*
        #[derive(Debug, Clone, Default, Args, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $( $(#[$m])* #[arg(long, allow_negative_numbers = true)] pub $field: Option<$ty>, )*
        }

        impl $name {
            fn merge(self, flags: Self) -> Self {
                Self { $( $field: flags.$field.or(self.$field), )* }
            }
        }
    };
}

params! {
    /// Two-path fringes with which-path records.
    InterfereParams {
        /// |<E2|E1>| of the which-path records, in [0, 1]. When absent the records are
        /// random states of dimension `env_dim` drawn from the seed.
        overlap: f64,
        /// Phase of <E2|E1>, rad (default 0).
        overlap_phase: f64,
        /// Record dimension for seeded random records (default 2).
        env_dim: usize,
        /// Screen samples (default 4096).
        points: usize,
        /// Screen start, screen units (default 0).
        x_min: f64,
        /// Screen end (exclusive), screen units (default 1, one fringe period at the default kappa).
        x_max: f64,
        /// Relative path phase slope, rad per screen unit (default 2 pi).
        kappa: f64,
    }
}

params! {
    /// Single-qubit and central-spin evolution.
    EvolveParams {
        /// dephasing | damping | closed | joint | markov (default dephasing).
        model: String,
        /// Jump rate gamma, 1/time (default 1).
        rate: f64,
        /// Qubit splitting omega in H = omega sigma_z / 2, rad/time (default 0).
        omega: f64,
        /// End time, time units (default 5).
        t_max: f64,
        /// Output intervals; the grid has steps + 1 points (default 100).
        steps: usize,
        /// Bath qubits for joint/markov, couplings drawn from the seed (default 4).
        n_bath: usize,
        /// Initial state: plus | zero | one | random (default plus).
        initial: String,
    }
}

params! {
    /// Static two-path decoherence exponent gamma(t) of an influence functional.
    QbmParams {
        /// ohmic | supraohmic | single-mode (default ohmic).
        family: String,
        /// Spectral exponent for supraohmic (default 3).
        s: f64,
        /// Coupling eta, or mode strength for single-mode (default 1).
        eta: f64,
        /// Cutoff frequency Lambda, 1/time (default 1).
        cutoff: f64,
        /// Mode frequency for single-mode, 1/time (default 1).
        mode_freq: f64,
        /// Temperature, energy units with k_B = 1 (default 0).
        temperature: f64,
        /// Path separation d (default 1).
        d: f64,
        /// Horizon, time units (default 20).
        horizon: f64,
        /// Grid intervals (default 400).
        steps: usize,
    }
}

params! {
    /// Decoherence-free subspaces of collective dephasing.
    DfsParams {
        /// Number of qubits (default 2).
        n: usize,
        /// Eigenvalue degeneracy tolerance (default 1e-8).
        tol: f64,
    }
}

params! {
    /// Measurement-free error correction sweep.
    QecParams {
        /// bitflip | phaseflip | shor9 (default bitflip).
        code: String,
        /// Rotation axis x | y | z (default: x for bitflip, z for phaseflip, y for shor9).
        axis: String,
        /// Physical qubit receiving the error (default 0).
        qubit: usize,
        /// First rotation angle, degrees (default 0).
        theta_min: f64,
        /// Last rotation angle, degrees (default 180).
        theta_max: f64,
        /// Number of angles, endpoints included (default 37).
        steps: usize,
    }
}

params! {
    /// Radical-pair singlet yield sweeps.
    RpParams {
        /// field (|B|, uT) | angle (rad from the molecular axis) | rf (frequency, Hz) (default field).
        sweep: String,
        /// Sweep start, in the sweep's unit (default 0 for field/angle, 0.5e6 for rf).
        from: f64,
        /// Sweep end, in the sweep's unit (default 100 uT, pi, 3e6 Hz).
        to: f64,
        /// Sweep points, endpoints included (default 11).
        steps: usize,
        /// Integration horizon, s (default 1.25 ln(1e4) / min k).
        horizon: f64,
        /// Isotropic hyperfine constant, mT (default 0.5).
        a_iso: f64,
        /// Axial hyperfine anisotropy, mT (default 0).
        a_axial: f64,
        /// Static field x,y,z, uT (default 0,0,50).
        #[arg(value_delimiter = ',')]
        b_static: Vec<f64>,
        /// RF amplitude, uT (default 0).
        rf_amplitude: f64,
        /// RF frequency, Hz (default 0).
        rf_frequency: f64,
        /// RF unit axis x,y,z (default 1,0,0).
        #[arg(value_delimiter = ',')]
        rf_axis: Vec<f64>,
        /// Singlet recombination rate, 1/s (default 1e6).
        k_s: f64,
        /// Triplet recombination rate, 1/s (default 1e6).
        k_t: f64,
    }
}

params! {
    /// Paired t-tests and the four-arm protocol report.
    StatsParams {
        /// Trial CSV (run_id,group,cell_count,caspase_per_cell); the built-in HL-60
        /// fixture when absent.
        input: PathBuf,
        /// Emit the trial records (CSV) instead of the report.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        dump_records: bool,
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-path interference: CSV x,intensity,visibility.
    Interfere {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: InterfereParams,
    },
    /// Density-operator evolution: trajectory CSV (t, upper triangle, purity, l1_coherence).
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: EvolveParams,
    },
    /// Influence-functional decoherence exponent: CSV t,gamma,phi.
    Qbm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: QbmParams,
    },
    /// Decoherence-free subspaces: basis vectors (JSON by default).
    Dfs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: DfsParams,
    },
    /// Error-correction fidelity sweep: CSV theta_deg,fidelity.
    Qec {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: QecParams,
    },
    /// Radical-pair yields: CSV param,yield.
    Rp {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: RpParams,
    },
    /// Protocol statistics: comparisons CSV, JSON report or table.
    Stats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: StatsParams,
    },
}

#[derive(Debug, Parser)]
#[command(name = "openq", version, about = "Open quantum systems workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Parses `args` (program name first), runs, and returns the exit status.
/// The artifact goes to `--output` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", json!({ "error": "usage", "exit": 2, "message": first }));
            return 2;
        }
    };
    match execute(cli.command) {
        Ok((settings, artifact)) => match emit(&settings, &artifact, stdout) {
            Ok(()) => 0,
            Err(e) => report(&e, stderr),
        },
        Err(e) => report(&e, stderr),
    }
}

fn report(e: &Error, stderr: &mut dyn Write) -> i32 {
    let code = e.exit_code();
    let _ = writeln!(stderr, "{}", json!({ "error": e.kind(), "exit": code, "message": e.to_string() }));
    code
}

fn emit(settings: &Settings, artifact: &str, stdout: &mut dyn Write) -> Result<()> {
    match &settings.output {
        Some(path) => std::fs::write(path, artifact).map_err(|source| io_error(path, source)),
        None => match stdout.write_all(artifact.as_bytes()).and_then(|()| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io { path: "<stdout>".into(), source: e }),
            _ => Ok(()),
        },
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Loads `--config` and splits off the shared keys; the rest must
/// deserialize into `P`.
fn load_config<P: for<'de> Deserialize<'de> + Default>(common: &Common, subcommand: &str) -> Result<(Common, P)> {
    let Some(path) = &common.config else {
        return Ok((Common::default(), P::default()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let value: Value = serde_json::from_str(&text)?;
    let Value::Object(mut map) = value else {
        return Err(Error::param("config", "top level must be a JSON object"));
    };
    if let Some(sub) = map.remove("subcommand") {
        if sub.as_str() != Some(subcommand) {
            return Err(Error::param("subcommand", format!("config is for {sub}, invoked {subcommand}")));
        }
    }
    let take = |map: &mut Map<String, Value>, key: &str| map.remove(key);
    let seed = match take(&mut map, "seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| Error::param("seed", "must be a non-negative 64-bit integer"))?),
    };
    let output = match take(&mut map, "output") {
        None => None,
        Some(v) => Some(PathBuf::from(v.as_str().ok_or_else(|| Error::param("output", "must be a string"))?)),
    };
    let format = match take(&mut map, "format") {
        None => None,
        Some(v) => Some(serde_json::from_value(v).map_err(|_| Error::param("format", "must be csv, json or table"))?),
    };
    let params: P = serde_json::from_value(Value::Object(map))
        .map_err(|e| Error::param("config", e.to_string()))?;
    Ok((Common { config: None, seed, output, format }, params))
}

fn settings(file: Common, flags: &Common, default_format: Format) -> Settings {
    Settings {
        seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        output: flags.output.clone().or(file.output),
        format: flags.format.or(file.format).unwrap_or(default_format),
    }
}

fn reject_table(s: &Settings) -> Result<()> {
    if s.format == Format::Table {
        return Err(Error::param("format", "table output is only available for stats"));
    }
    Ok(())
}

/// Runs one subcommand and returns its artifact text.
pub fn execute(command: Command) -> Result<(Settings, String)> {
    match command {
        Command::Interfere { common, params } => {
            let (file, p) = load_config::<InterfereParams>(&common, "interfere")?;
            let s = settings(file, &common, Format::Csv);
            reject_table(&s)?;
            let out = interfere(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Evolve { common, params } => {
            let (file, p) = load_config::<EvolveParams>(&common, "evolve")?;
            let s = settings(file, &common, Format::Csv);
            reject_table(&s)?;
            let out = evolve(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Qbm { common, params } => {
            let (file, p) = load_config::<QbmParams>(&common, "qbm")?;
            let s = settings(file, &common, Format::Csv);
            reject_table(&s)?;
            let out = qbm(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Dfs { common, params } => {
            let (file, p) = load_config::<DfsParams>(&common, "dfs")?;
            let s = settings(file, &common, Format::Json);
            reject_table(&s)?;
            let out = dfs(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Qec { common, params } => {
            let (file, p) = load_config::<QecParams>(&common, "qec")?;
            let s = settings(file, &common, Format::Csv);
            reject_table(&s)?;
            let out = qec(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Rp { common, params } => {
            let (file, p) = load_config::<RpParams>(&common, "rp")?;
            let s = settings(file, &common, Format::Csv);
            reject_table(&s)?;
            let out = rp(&p.merge(params), &s)?;
            Ok((s, out))
        }
        Command::Stats { common, params } => {
            let (file, p) = load_config::<StatsParams>(&common, "stats")?;
            let s = settings(file, &common, Format::Csv);
            let out = stats_cmd(&p.merge(params), &s)?;
            Ok((s, out))
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, format!("{v} must be positive")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(Error::param(name, format!("{v} is below the minimum {min}")))
    }
}

/// `n` points from `a` to `b` inclusive (`[a]` when `n = 1`).
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn interfere(p: &InterfereParams, s: &Settings) -> Result<String> {
    let points = at_least("points", p.points.unwrap_or(4096), 2)?;
    let (x_min, x_max) = (p.x_min.unwrap_or(0.0), p.x_max.unwrap_or(1.0));
    if !(x_max > x_min) {
        return Err(Error::param("x_max", "must exceed x_min"));
    }
    let kappa = p.kappa.unwrap_or(interferometer::DEFAULT_KAPPA);
    let state = match p.overlap {
        Some(o) => {
            if !(0.0..=1.0).contains(&o) {
                return Err(Error::param("overlap", format!("{o} must lie in [0, 1]")));
            }
            TwoPathState::with_overlap(C64::from_polar(o, p.overlap_phase.unwrap_or(0.0)))?
        }
        None => {
            let dim = at_least("env_dim", p.env_dim.unwrap_or(2), 1)?;
            let mut rng = seeded(s.seed);
            let e1 = random_state(&[dim], &mut rng);
            let e2 = random_state(&[dim], &mut rng);
            TwoPathState::balanced(e1, e2)?
        }
    }
    .with_phase(PhaseFn::linear(kappa, 0.0));
    let profile = interferometer::screen_intensity(&state, &interferometer::grid(x_min, x_max, points));
    let v = interferometer::visibility(&profile)?;
    Ok(match s.format {
        Format::Json => to_json(&json!({
            "overlap": state.overlap().norm(),
            "visibility": v,
            "x": profile.xs,
            "intensity": profile.intensities,
        })),
        _ => {
            let mut out = String::from("x,intensity,visibility\n");
            for (x, i) in profile.xs.iter().zip(&profile.intensities) {
                out.push_str(&format!("{x},{i},{v}\n"));
            }
            out
        }
    })
}

fn initial_qubit(name: &str, seed: u64) -> Result<DensityOperator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sv = match name {
        "plus" => StateVector::new(vec![2], crate::hilbert::CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))?,
        "zero" => StateVector::basis(vec![2], 0)?,
        "one" => StateVector::basis(vec![2], 1)?,
        "random" => random_state(&[2], &mut seeded(seed)),
        other => return Err(Error::param("initial", format!("unknown initial state `{other}`"))),
    };
    Ok(sv.to_density())
}

fn trajectory_json(t: &Trajectory) -> String {
    to_json(&json!({ "t": t.times, "states": t.states }))
}

fn evolve(p: &EvolveParams, s: &Settings) -> Result<String> {
    let rate = p.rate.unwrap_or(1.0);
    let omega = p.omega.unwrap_or(0.0);
    let t_max = positive("t_max", p.t_max.unwrap_or(5.0))?;
    let steps = at_least("steps", p.steps.unwrap_or(100), 1)?;
    let times = linspace(0.0, t_max, steps + 1);
    let rho0 = initial_qubit(p.initial.as_deref().unwrap_or("plus"), s.seed)?;
    let h = pauli::z().scale_real(0.5 * omega);
    let model = p.model.as_deref().unwrap_or("dephasing");
    let traj = match model {
        "dephasing" => evolution::evolve_lindblad(&LindbladModel::qubit_dephasing(rate)?.with_lamb_shift(&h)?, &rho0, &times)?,
        "damping" => evolution::evolve_lindblad(&LindbladModel::qubit_amplitude_damping(rate)?.with_lamb_shift(&h)?, &rho0, &times)?,
        "closed" => evolution::evolve_closed(&h, &rho0, &times)?,
        "joint" | "markov" => {
            let n_bath = at_least("n_bath", p.n_bath.unwrap_or(4), 1)?;
            let joint = JointModel::default_bath(n_bath, s.seed)?;
            if model == "joint" {
                evolution::evolve_joint_trace(&joint, &rho0, &times)?
            } else {
                let fitted = evolution::fit_dephasing(&joint, &rho0, &times)?;
                let r = evolution::born_markov_diagnostic(&joint, &fitted, &rho0, &times)?;
                return Ok(match s.format {
                    Format::Json => to_json(&json!({
                        "t": r.times,
                        "exact_coherence": r.exact_coherence,
                        "markov_coherence": r.markov_coherence,
                        "divergence": r.divergence,
                        "revival": r.revival,
                        "markov_monotone": r.markov_monotone,
                    })),
                    _ => {
                        let mut out = String::from("t,exact_coherence,markov_coherence,divergence\n");
                        for k in 0..r.times.len() {
                            out.push_str(&format!(
                                "{},{},{},{}\n",
                                r.times[k], r.exact_coherence[k], r.markov_coherence[k], r.divergence[k]
                            ));
                        }
                        out
                    }
                });
            }
        }
        other => return Err(Error::param("model", format!("unknown model `{other}`"))),
    };
    Ok(match s.format {
        Format::Json => trajectory_json(&traj),
        _ => traj.to_csv(),
    })
}

fn qbm(p: &QbmParams, s: &Settings) -> Result<String> {
    let eta = p.eta.unwrap_or(1.0);
    let cutoff = p.cutoff.unwrap_or(1.0);
    let temperature = p.temperature.unwrap_or(0.0);
    let j = match p.family.as_deref().unwrap_or("ohmic") {
        "ohmic" => SpectralDensity::ohmic(eta, cutoff, temperature)?,
        "supraohmic" => SpectralDensity::supraohmic(p.s.unwrap_or(3.0), eta, cutoff, temperature)?,
        "single-mode" => SpectralDensity::single_mode(eta, p.mode_freq.unwrap_or(1.0), temperature)?,
        other => return Err(Error::param("family", format!("unknown family `{other}`"))),
    };
    let curve = influence::decoherence_exponent_curve(
        &j,
        p.d.unwrap_or(1.0),
        p.horizon.unwrap_or(20.0),
        at_least("steps", p.steps.unwrap_or(400), 1)?,
    )?;
    Ok(match s.format {
        Format::Json => to_json(&json!({ "t": curve.times, "gamma": curve.gamma, "phi": curve.phi })),
        _ => curve.to_csv(),
    })
}

fn dfs(p: &DfsParams, s: &Settings) -> Result<String> {
    let n = at_least("n", p.n.unwrap_or(2), 1)?;
    let tol = positive("tol", p.tol.unwrap_or(DEGENERACY_TOL))?;
    let set = InteractionSet::collective_dephasing(n)?;
    let bases = compensation::find_dfs(&set, tol)?;
    Ok(match s.format {
        Format::Json => {
            let blocks: Vec<Value> = bases
                .iter()
                .map(|b| json!({ "labels": b.labels, "dim": b.dim(), "vectors": b.vectors }))
                .collect();
            to_json(&json!({ "n_qubits": n, "subspaces": blocks }))
        }
        _ => {
            let mut out = String::from("subspace,label,vector,index,re,im\n");
            for (k, b) in bases.iter().enumerate() {
                let label = b.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";");
                for (v, vec) in b.vectors.iter().enumerate() {
                    for (i, a) in vec.amplitudes().iter().enumerate() {
                        out.push_str(&format!("{k},{label},{v},{i},{},{}\n", a.re, a.im));
                    }
                }
            }
            out
        }
    })
}

fn pauli_axis(name: &str) -> Result<Pauli> {
    match name {
        "x" => Ok(Pauli::X),
        "y" => Ok(Pauli::Y),
        "z" => Ok(Pauli::Z),
        other => Err(Error::param("axis", format!("unknown axis `{other}` (x, y or z)"))),
    }
}

fn qec(p: &QecParams, s: &Settings) -> Result<String> {
    let name = p.code.as_deref().unwrap_or("bitflip");
    let code = StabilizerCode::by_name(name)?;
    let default_axis = match name {
        "bitflip" => "x",
        "phaseflip" => "z",
        _ => "y",
    };
    let axis = pauli_axis(p.axis.as_deref().unwrap_or(default_axis))?;
    let steps = at_least("steps", p.steps.unwrap_or(37), 1)?;
    let thetas = linspace(p.theta_min.unwrap_or(0.0), p.theta_max.unwrap_or(180.0), steps);
    let logical = random_state(&[2], &mut seeded(s.seed));
    let fid = compensation::fidelity_sweep(&code, &logical, axis, p.qubit.unwrap_or(0), &thetas)?;
    Ok(match s.format {
        Format::Json => to_json(&json!({ "code": name, "theta_deg": thetas, "fidelity": fid })),
        _ => {
            let mut out = String::from("theta_deg,fidelity\n");
            for (t, f) in thetas.iter().zip(&fid) {
                out.push_str(&format!("{t},{f}\n"));
            }
            out
        }
    })
}

fn vec3(name: &str, v: &Option<Vec<f64>>, default: [f64; 3]) -> Result<[f64; 3]> {
    match v {
        None => Ok(default),
        Some(v) => <[f64; 3]>::try_from(v.as_slice()).map_err(|_| Error::param(name, format!("expected 3 components, got {}", v.len()))),
    }
}

fn rp(p: &RpParams, s: &Settings) -> Result<String> {
    let base = RadicalPairModel::default();
    let sweep = p.sweep.as_deref().unwrap_or("field");
    let steps = at_least("steps", p.steps.unwrap_or(11), 1)?;
    let (from, to) = match sweep {
        "field" => (0.0, 100.0),
        "angle" => (0.0, std::f64::consts::PI),
        "rf" => (0.5e6, 3e6),
        other => return Err(Error::param("sweep", format!("unknown sweep `{other}` (field, angle or rf)"))),
    };
    let grid = linspace(p.from.unwrap_or(from), p.to.unwrap_or(to), steps);
    // An rf sweep supplies its own frequency.
    let rf_frequency = match (sweep, p.rf_frequency) {
        ("rf", None) => grid[0],
        (_, f) => f.unwrap_or(base.rf_frequency),
    };
    let model = RadicalPairModel {
        a_iso: p.a_iso.unwrap_or(base.a_iso),
        a_axial: p.a_axial.unwrap_or(base.a_axial),
        b_static: vec3("b_static", &p.b_static, base.b_static)?,
        rf_amplitude: p.rf_amplitude.unwrap_or(base.rf_amplitude),
        rf_frequency,
        rf_axis: vec3("rf_axis", &p.rf_axis, base.rf_axis)?,
        k_s: p.k_s.unwrap_or(base.k_s),
        k_t: p.k_t.unwrap_or(base.k_t),
        gamma_e: base.gamma_e,
    };
    model.validate()?;
    let horizon = match p.horizon {
        Some(h) => positive("horizon", h)?,
        None => radical_pair::default_horizon(&model)?,
    };
    let yields = match sweep {
        "field" => {
            let b = model.b_static;
            let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dir = if norm > 0.0 { b.map(|v| v / norm) } else { [0.0, 0.0, 1.0] };
            use rayon::prelude::*;
            grid.par_iter()
                .map(|&mag| {
                    let m = RadicalPairModel { b_static: dir.map(|v| v * mag), ..model.clone() };
                    radical_pair::singlet_yield(&m, horizon).map(|r| r.singlet_yield)
                })
                .collect::<Result<Vec<_>>>()?
        }
        "angle" => radical_pair::orientation_sweep(&model, &grid, horizon)?,
        _ => {
            if model.rf_amplitude <= 0.0 {
                return Err(Error::param("rf_amplitude", "rf sweep needs a positive amplitude"));
            }
            if grid.iter().any(|&f| f <= 0.0) {
                return Err(Error::param("from", "rf frequencies must be positive"));
            }
            radical_pair::rf_disruption_scan(&model, &grid, horizon)?.yields
        }
    };
    Ok(match s.format {
        Format::Json => to_json(&json!({ "sweep": sweep, "horizon": horizon, "param": grid, "yield": yields })),
        _ => {
            let mut out = String::from("param,yield\n");
            for (x, y) in grid.iter().zip(&yields) {
                out.push_str(&format!("{x},{y}\n"));
            }
            out
        }
    })
}

fn stats_cmd(p: &StatsParams, s: &Settings) -> Result<String> {
    let records = match &p.input {
        Some(path) => stats::load_trials(path)?,
        None => stats::hl60_fixture(),
    };
    if p.dump_records.unwrap_or(false) {
        return Ok(match s.format {
            Format::Json => to_json(&records),
            _ => stats::trials_to_csv(&records),
        });
    }
    let report = stats::protocol_report(&records)?;
    Ok(match s.format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
        Format::Csv => {
            let mut out = String::from("endpoint,a,b,mean_diff,t,df,direction,p,significance,power\n");
            for e in &report.endpoints {
                for cmp in &e.comparisons {
                    let dir = match cmp.test.direction {
                        stats::Direction::Greater => "greater",
                        stats::Direction::Less => "less",
                    };
                    let power = cmp.power.map_or(String::new(), |v| v.to_string());
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        e.endpoint.label(),
                        cmp.a,
                        cmp.b,
                        cmp.test.mean_diff,
                        cmp.test.t_stat,
                        cmp.test.df,
                        dir,
                        cmp.test.p_one_tailed,
                        cmp.significance.label(),
                        power
                    ));
                }
            }
            out
        }
    })
}
