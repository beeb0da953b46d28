//! Trial ingestion, one-tailed paired t-tests, power analysis and the
//! four-arm protocol report (treated pair `Tplus`/`Tminus`, controls
//! `C1`/`C2`).
//!
//! Pairing is by `run_id`. Controls are pooled per run as the mean of `C1`
//! and `C2` before any cross-run statistic.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 4] = ["run_id", "group", "cell_count", "caspase_per_cell"];

/// Significance cut-offs reported by [`protocol_report`].
pub const SIGNIFICANCE_LEVELS: [f64; 3] = [0.05, 0.01, 0.001];

/// Integration tolerance for the noncentral-t tail.
pub const POWER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    Tplus,
    Tminus,
    C1,
    C2,
}

impl Group {
    pub const ALL: [Group; 4] = [Group::Tplus, Group::Tminus, Group::C1, Group::C2];

    pub fn label(self) -> &'static str {
        match self {
            Group::Tplus => "Tplus",
            Group::Tminus => "Tminus",
            Group::C1 => "C1",
            Group::C2 => "C2",
        }
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Group::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| format!("unknown group `{s}` (expected Tplus, Tminus, C1 or C2)"))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub run_id: i64,
    pub group: Group,
    pub cell_count: f64,
    /// Total maximum luminosity / cell count.
    pub caspase_per_cell: f64,
}

/// Reads trial records from a CSV file.
pub fn load_trials(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_trials(file)
}

/// Parses `run_id,group,cell_count,caspase_per_cell` rows. Line numbers in
/// errors count the header as line 1. An empty input yields no records.
pub fn parse_trials(input: impl Read) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Ok(Vec::new()),
        Some(h) => h?,
    };
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Data { line: 1, reason: format!("header must be `{}`", CSV_HEADER.join(",")) });
    }
    let mut out: Vec<TrialRecord> = Vec::new();
    let mut seen = BTreeMap::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Data { line, reason };
        if row.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", row.len())));
        }
        let run_id: i64 = row[0].parse().map_err(|_| bad(format!("run_id `{}` is not an integer", &row[0])))?;
        let group: Group = row[1].parse().map_err(bad)?;
        let number = |k: usize| -> Result<f64> {
            let v: f64 = row[k].parse().map_err(|_| bad(format!("{} `{}` is not a number", CSV_HEADER[k], &row[k])))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(format!("{} must be finite and non-negative, got {v}", CSV_HEADER[k])));
            }
            Ok(v)
        };
        let (cell_count, caspase_per_cell) = (number(2)?, number(3)?);
        if let Some(first) = seen.insert((run_id, group), line) {
            return Err(bad(format!("duplicate run {run_id} arm {group} (first on line {first})")));
        }
        out.push(TrialRecord { run_id, group, cell_count, caspase_per_cell });
    }
    Ok(out)
}

/// Writes records with the [`CSV_HEADER`] layout.
pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut s = CSV_HEADER.join(",") + "\n";
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.run_id, r.group, r.cell_count, r.caspase_per_cell);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Alternative `mean(a - b) > 0`.
    Greater,
    /// Alternative `mean(a - b) < 0`.
    Less,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Greater => Direction::Less,
            Direction::Less => Direction::Greater,
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "greater" => Ok(Direction::Greater),
            "less" => Ok(Direction::Less),
            _ => Err(format!("direction must be `greater` or `less`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    /// `mean(d) / (sd(d) / sqrt(n))`; infinite when `sd(d) = 0` and `mean(d) != 0`.
    pub t_stat: f64,
    pub df: usize,
    pub p_one_tailed: f64,
    pub direction: Direction,
    pub mean_diff: f64,
    pub sd_diff: f64,
}

/// Sample mean and standard deviation (n - 1 denominator).
fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `P(T > t)` for Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let half = 0.5 * beta_reg(0.5 * df, 0.5, df / (df + t * t));
    if t >= 0.0 {
        half
    } else {
        1.0 - half
    }
}

/// One-tailed paired t-test on `d = a - b`.
///
/// Zero spread with a nonzero mean reports the limiting `t = +-inf` and
/// `p` of 0 or 1; zero spread with zero mean gives `t = 0`, `p = 1/2`.
pub fn paired_t_one_tailed(a: &[f64], b: &[f64], direction: Direction) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::dims(format!("paired samples of length {} and {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::param("n", format!("need at least 2 pairs, got {}", a.len())));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::param("samples", "non-finite value"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean, sd) = mean_sd(&d);
    let n = d.len();
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let t_stat = if sd <= 1e-14 * scale || sd == 0.0 {
        if mean == 0.0 || scale == 0.0 || mean.abs() <= 1e-14 * scale {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / (sd / (n as f64).sqrt())
    };
    let df = n - 1;
    let p_one_tailed = match direction {
        Direction::Greater => student_t_sf(t_stat, df as f64),
        Direction::Less => student_t_sf(-t_stat, df as f64),
    };
    Ok(TestResult { t_stat, df, p_one_tailed, direction, mean_diff: mean, sd_diff: sd })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerResult {
    pub power: f64,
    pub alpha: f64,
    pub effect: f64,
    pub sd: f64,
    pub n: usize,
    /// `effect / (sd / sqrt(n))`.
    pub noncentrality: f64,
    pub critical_t: f64,
}

/// Power of the one-tailed paired t-test at level `alpha` for a true mean
/// difference `effect` with difference spread `sd`.
///
/// Uses `P(T' > c) = int_0^inf chi(s) Phi(delta - c s) ds`, with `chi` the
/// density of `sqrt(V / df)`, `V ~ chi^2_df`, evaluated by adaptive Simpson.
pub fn power_analysis(effect: f64, sd: f64, n: usize, alpha: f64, direction: Direction) -> Result<PowerResult> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::param("sd", "must be positive"));
    }
    if n < 2 {
        return Err(Error::param("n", "must be at least 2"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1)"));
    }
    if !effect.is_finite() {
        return Err(Error::param("effect", "must be finite"));
    }
    let df = (n - 1) as f64;
    let critical_t = StudentsT::new(0.0, 1.0, df).expect("valid t").inverse_cdf(1.0 - alpha);
    let critical_t = polish_quantile(critical_t, df, alpha);
    let noncentrality = effect / (sd / (n as f64).sqrt());
    let delta = match direction {
        Direction::Greater => noncentrality,
        Direction::Less => -noncentrality,
    };
    let power = noncentral_t_sf(critical_t, df, delta).clamp(0.0, 1.0);
    Ok(PowerResult { power, alpha, effect, sd, n, noncentrality, critical_t })
}

/// Newton steps on `P(T > c) = alpha`.
fn polish_quantile(mut c: f64, df: f64, alpha: f64) -> f64 {
    let ln_norm = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI).ln();
    for _ in 0..4 {
        let pdf = (ln_norm - 0.5 * (df + 1.0) * (1.0 + c * c / df).ln()).exp();
        c += (student_t_sf(c, df) - alpha) / pdf;
    }
    c
}

/// `P(T' > c)` for the noncentral t with `df` degrees of freedom and
/// noncentrality `delta`.
pub fn noncentral_t_sf(c: f64, df: f64, delta: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let ln_norm = std::f64::consts::LN_2 + 0.5 * df * (0.5 * df).ln() - ln_gamma(0.5 * df);
    let f = |s: f64| {
        if s <= 0.0 {
            return if df == 1.0 { ln_norm.exp() * normal.cdf(delta) } else { 0.0 };
        }
        let density = (ln_norm + (df - 1.0) * s.ln() - 0.5 * df * s * s).exp();
        density * normal.cdf(delta - c * s)
    };
    // The scaled chi density is negligible beyond 1 + 40 / sqrt(df).
    let upper = 1.0 + 40.0 / df.sqrt();
    let panels = 32;
    let h = upper / panels as f64;
    (0..panels)
        .map(|k| {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            adaptive_simpson(&f, a, b, POWER_TOL / panels as f64, 40)
        })
        .sum()
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    CellCount,
    CaspasePerCell,
}

impl Endpoint {
    pub const ALL: [Endpoint; 2] = [Endpoint::CellCount, Endpoint::CaspasePerCell];

    pub fn label(self) -> &'static str {
        match self {
            Endpoint::CellCount => "cell_count",
            Endpoint::CaspasePerCell => "caspase_per_cell",
        }
    }

    fn value(self, r: &TrialRecord) -> f64 {
        match self {
            Endpoint::CellCount => r.cell_count,
            Endpoint::CaspasePerCell => r.caspase_per_cell,
        }
    }
}

/// Mean and standard error of one arm across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub arm: String,
    pub n: usize,
    pub mean: f64,
    pub se: f64,
}

fn summarize(arm: &str, v: &[f64]) -> GroupSummary {
    let (mean, sd) = mean_sd(v);
    GroupSummary { arm: arm.to_string(), n: v.len(), mean, se: sd / (v.len() as f64).sqrt() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Significance {
    #[serde(rename = "NS")]
    NotSignificant,
    #[serde(rename = "p<0.05")]
    P05,
    #[serde(rename = "p<0.01")]
    P01,
    #[serde(rename = "p<0.001")]
    P001,
}

impl Significance {
    pub fn of(p: f64) -> Significance {
        if p < SIGNIFICANCE_LEVELS[2] {
            Significance::P001
        } else if p < SIGNIFICANCE_LEVELS[1] {
            Significance::P01
        } else if p < SIGNIFICANCE_LEVELS[0] {
            Significance::P05
        } else {
            Significance::NotSignificant
        }
    }

    pub fn is_significant(self) -> bool {
        self != Significance::NotSignificant
    }

    pub fn label(self) -> &'static str {
        match self {
            Significance::NotSignificant => "NS",
            Significance::P05 => "p<0.05",
            Significance::P01 => "p<0.01",
            Significance::P001 => "p<0.001",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub test: TestResult,
    pub significance: Significance,
    /// Power at alpha 0.05 for the observed mean difference and spread.
    pub power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointReport {
    pub endpoint: Endpoint,
    /// `Tplus`, `Tminus`, `controls`, `C1`, `C2`.
    pub summaries: Vec<GroupSummary>,
    /// `Tplus` vs `Tminus`, `Tplus` vs controls, `Tminus` vs controls, `C1` vs `C2`.
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub runs: Vec<i64>,
    pub endpoints: Vec<EndpointReport>,
}

impl ProtocolReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "runs: {}", self.runs.len());
        for e in &self.endpoints {
            let _ = writeln!(s, "\n[{}]", e.endpoint.label());
            let _ = writeln!(s, "{:<10} {:>14} {:>14}", "arm", "mean", "se");
            for g in &e.summaries {
                let _ = writeln!(s, "{:<10} {:>14.6e} {:>14.6e}", g.arm, g.mean, g.se);
            }
            let _ = writeln!(s, "{:<22} {:>10} {:>3} {:>8} {:>12} {:>8} {:>7}", "comparison", "t", "df", "tail", "p", "flag", "power");
            for c in &e.comparisons {
                let power = c.power.map_or("-".to_string(), |p| format!("{p:.4}"));
                let tail = match c.test.direction {
                    Direction::Greater => "greater",
                    Direction::Less => "less",
                };
                let _ = writeln!(
                    s,
                    "{:<22} {:>10.4} {:>3} {:>8} {:>12.4e} {:>8} {:>7}",
                    format!("{} vs {}", c.a, c.b),
                    c.test.t_stat,
                    c.test.df,
                    tail,
                    c.test.p_one_tailed,
                    c.significance.label(),
                    power
                );
            }
        }
        s
    }
}

fn compare(a_label: &str, a: &[f64], b_label: &str, b: &[f64]) -> Result<Comparison> {
    // Each one-tailed test points in the direction of the observed difference.
    let mean: f64 = a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>();
    let direction = if mean >= 0.0 { Direction::Greater } else { Direction::Less };
    let test = paired_t_one_tailed(a, b, direction)?;
    let power = if test.sd_diff > 0.0 && test.t_stat.is_finite() {
        Some(power_analysis(test.mean_diff, test.sd_diff, a.len(), 0.05, direction)?.power)
    } else {
        None
    };
    Ok(Comparison {
        a: a_label.to_string(),
        b: b_label.to_string(),
        significance: Significance::of(test.p_one_tailed),
        test,
        power,
    })
}

/// Group summaries and the four protocol comparisons for both endpoints.
pub fn protocol_report(records: &[TrialRecord]) -> Result<ProtocolReport> {
    let mut runs: BTreeMap<i64, BTreeMap<Group, &TrialRecord>> = BTreeMap::new();
    for r in records {
        if runs.entry(r.run_id).or_default().insert(r.group, r).is_some() {
            return Err(Error::param("records", format!("duplicate run {} arm {}", r.run_id, r.group)));
        }
    }
    for (&run_id, arms) in &runs {
        if let Some(g) = Group::ALL.into_iter().find(|g| !arms.contains_key(g)) {
            return Err(Error::MissingArm { run_id, group: g.label().to_string() });
        }
    }
    if runs.len() < 2 {
        return Err(Error::param("records", format!("need at least 2 complete runs, got {}", runs.len())));
    }
    let endpoints = Endpoint::ALL
        .into_iter()
        .map(|e| {
            let arm = |g: Group| runs.values().map(|a| e.value(a[&g])).collect::<Vec<f64>>();
            let (tp, tm, c1, c2) = (arm(Group::Tplus), arm(Group::Tminus), arm(Group::C1), arm(Group::C2));
            let controls: Vec<f64> = c1.iter().zip(&c2).map(|(x, y)| 0.5 * (x + y)).collect();
            let summaries = vec![
                summarize("Tplus", &tp),
                summarize("Tminus", &tm),
                summarize("controls", &controls),
                summarize("C1", &c1),
                summarize("C2", &c2),
            ];
            let comparisons = vec![
                compare("Tplus", &tp, "Tminus", &tm)?,
                compare("Tplus", &tp, "controls", &controls)?,
                compare("Tminus", &tm, "controls", &controls)?,
                compare("C1", &c1, "C2", &c2)?,
            ];
            Ok(EndpointReport { endpoint: e, summaries, comparisons })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolReport { runs: runs.keys().copied().collect(), endpoints })
}

/// Published arm summaries (mean, standard error) of the HL-60 experiment,
/// n = 5 runs.
pub mod hl60 {
    pub const RUNS: usize = 5;
    pub const CELL_TPLUS: (f64, f64) = (1.3e5, 2.8e4);
    pub const CELL_TMINUS: (f64, f64) = (1.2e5, 1.9e4);
    pub const CELL_CONTROLS: (f64, f64) = (2.1e5, 1.7e4);
    /// Reported control means `C1`, `C2` and their one-tailed p-value.
    pub const CELL_C1_C2: (f64, f64, f64) = (1.9e5, 2.2e5, 0.16);
    pub const CASPASE_TPLUS: (f64, f64) = (0.32, 0.06);
    pub const CASPASE_TMINUS: (f64, f64) = (0.17, 0.02);
    pub const CASPASE_CONTROLS: (f64, f64) = (0.098, 0.009);
    pub const CASPASE_C1_C2: (f64, f64, f64) = (0.1, 0.09, 0.2673);
}

/// Standardized run pattern shared by every arm: mean 0, sample sd 1.
const RUN_PATTERN: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
/// Pattern for the `C1 - C2` split: mean 0, sample sd 1, orthogonal to
/// [`RUN_PATTERN`].
const SPLIT_PATTERN: [f64; 5] = [1.0, -1.0, 0.0, -1.0, 1.0];

/// Five values with the given mean and standard error:
/// `mean + se sqrt(5) z_r` with `z` the scaled symmetric ramp.
pub fn moment_matched(mean: f64, se: f64) -> [f64; 5] {
    let sd = se * 5f64.sqrt();
    let norm = 2.5f64.sqrt();
    RUN_PATTERN.map(|z| mean + sd * z / norm)
}

/// Splits pooled controls into `C1 = c + e`, `C2 = c - e` with
/// `e_r = h + g w_r`: the `C1 - C2` mean matches the reported difference
/// `2h` and the spread `g` is set so the one-tailed paired p equals the
/// reported p. Pooled values are unchanged.
fn split_controls(pooled: &[f64; 5], c1_mean: f64, c2_mean: f64, p: f64) -> ([f64; 5], [f64; 5]) {
    let h = 0.5 * (c1_mean - c2_mean);
    let t = StudentsT::new(0.0, 1.0, 4.0).expect("valid t").inverse_cdf(1.0 - p);
    let t = polish_quantile(t, 4.0, p);
    let g = h.abs() * 5f64.sqrt() / t;
    let e: Vec<f64> = SPLIT_PATTERN.iter().map(|w| h + g * w).collect();
    (
        std::array::from_fn(|r| pooled[r] + e[r]),
        std::array::from_fn(|r| pooled[r] - e[r]),
    )
}

/// Deterministic 5-run fixture whose `Tplus`, `Tminus` and pooled-control
/// means and standard errors equal the published summaries for both
/// endpoints. All arms share the same run ordering.
pub fn hl60_fixture() -> Vec<TrialRecord> {
    let cell = [moment_matched(hl60::CELL_TPLUS.0, hl60::CELL_TPLUS.1), moment_matched(hl60::CELL_TMINUS.0, hl60::CELL_TMINUS.1)];
    let casp = [
        moment_matched(hl60::CASPASE_TPLUS.0, hl60::CASPASE_TPLUS.1),
        moment_matched(hl60::CASPASE_TMINUS.0, hl60::CASPASE_TMINUS.1),
    ];
    let (cc1, cc2) = {
        let (a, b, p) = hl60::CELL_C1_C2;
        split_controls(&moment_matched(hl60::CELL_CONTROLS.0, hl60::CELL_CONTROLS.1), a, b, p)
    };
    let (kc1, kc2) = {
        let (a, b, p) = hl60::CASPASE_C1_C2;
        split_controls(&moment_matched(hl60::CASPASE_CONTROLS.0, hl60::CASPASE_CONTROLS.1), a, b, p)
    };
    let mut out = Vec::with_capacity(4 * hl60::RUNS);
    for r in 0..hl60::RUNS {
        let arms = [(Group::Tplus, cell[0][r], casp[0][r]), (Group::Tminus, cell[1][r], casp[1][r]), (Group::C1, cc1[r], kc1[r]), (Group::C2, cc2[r], kc2[r])];
        for (group, cell_count, caspase_per_cell) in arms {
            out.push(TrialRecord { run_id: r as i64 + 1, group, cell_count, caspase_per_cell });
        }
    }
    out
}
