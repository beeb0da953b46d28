use proptest::prelude::*;

use super::*;
use crate::hilbert::{CMatrix, HermitianEigen};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn symmetric_grid(half: usize, step: f64) -> Vec<f64> {
    (0..=2 * half).map(|k| (k as f64 - half as f64) * step).collect()
}

/// Truncated Fock-space oscillator `H_x = w a^dag a + g x (a + a^dag)` with
/// `g^2 = strength`; returns `Tr[rho_b U_{x'}^dag U_x]` at time `t`.
fn fock_overlap(strength: f64, w: f64, temperature: f64, x: f64, xp: f64, t: f64) -> C64 {
    let n = 80;
    let g = strength.sqrt();
    let ham = |pos: f64| {
        let mut h = CMatrix::zeros(n, n);
        for k in 0..n {
            h[(k, k)] = c(w * k as f64, 0.0);
            if k + 1 < n {
                let a = g * pos * ((k + 1) as f64).sqrt();
                h[(k, k + 1)] = c(a, 0.0);
                h[(k + 1, k)] = c(a, 0.0);
            }
        }
        h
    };
    let ux = HermitianEigen::new(&ham(x)).propagator(t);
    let uxp = HermitianEigen::new(&ham(xp)).propagator(t);
    let prod = uxp.adjoint() * ux;
    let pops: Vec<f64> = (0..n)
        .map(|k| if temperature == 0.0 { if k == 0 { 1.0 } else { 0.0 } } else { (-w * k as f64 / temperature).exp() })
        .collect();
    let z: f64 = pops.iter().sum();
    (0..n).map(|k| prod[(k, k)] * (pops[k] / z)).sum()
}

#[test]
fn single_mode_kernels_are_exact() {
    let j = SpectralDensity::single_mode(0.7, 1.3, 0.0).unwrap();
    let grid = symmetric_grid(100, 0.05);
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    for (i, &t) in grid.iter().enumerate() {
        assert_eq!(k.nu[i], 0.7 * (1.3 * t).cos());
        assert_eq!(k.eta[i], 0.7 * (1.3 * t).sin());
    }
    let hot = SpectralDensity::single_mode(0.7, 1.3, 2.0).unwrap();
    let k = kernels_from_spectral_density(&hot, &[0.0, 1.0]).unwrap();
    assert!(rel(k.nu[0], 0.7 / (1.3f64 / 4.0).tanh()) < 1e-14);
}

#[test]
fn ohmic_nu0_matches_refined_quadrature() {
    for temperature in [0.0, 0.5, 5.0] {
        let (eta, cutoff) = (0.8, 2.5);
        let j = SpectralDensity::ohmic(eta, cutoff, temperature).unwrap();
        let k = kernels_from_spectral_density(&j, &[0.0, 0.1]).unwrap();
        // Independent trapezoid rule with ten times as many nodes.
        let n = 40960;
        let h = 20.0 * cutoff / n as f64;
        let f = |w: f64| {
            if w == 0.0 {
                return if temperature > 0.0 { 2.0 * temperature * eta } else { 0.0 };
            }
            let coth = if temperature == 0.0 { 1.0 } else { 1.0 / (w / (2.0 * temperature)).tanh() };
            eta * w * (-w / cutoff).exp() * coth
        };
        let mut oracle = 0.5 * (f(0.0) + f(20.0 * cutoff));
        for i in 1..n {
            oracle += f(h * i as f64);
        }
        oracle *= h;
        assert!(rel(k.nu[0], oracle) < 1e-6, "T={temperature}: {} vs {oracle}", k.nu[0]);
    }
}

#[test]
fn ohmic_zero_temperature_kernels_match_closed_form() {
    let (eta, cutoff) = (1.1, 2.0);
    let j = SpectralDensity::ohmic(eta, cutoff, 0.0).unwrap();
    let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.025).collect();
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    let scale = eta * cutoff * cutoff;
    // Bound on the omitted tail beyond 20 cutoff: int_20^inf x e^-x dx.
    let tol = scale * (21.0 * (-20.0f64).exp() + 1e-9);
    for (i, &t) in grid.iter().enumerate() {
        let u = cutoff * t;
        let d = (1.0 + u * u).powi(2);
        assert!((k.nu[i] - scale * (1.0 - u * u) / d).abs() < tol);
        assert!((k.eta[i] - scale * 2.0 * u / d).abs() < tol);
    }
}

#[test]
fn cubic_zero_temperature_kernels_match_closed_form() {
    let (eta, cutoff) = (0.6, 1.5);
    let j = SpectralDensity::supraohmic(3.0, eta, cutoff, 0.0).unwrap();
    let grid: Vec<f64> = (0..=200).map(|k| k as f64 * 0.03).collect();
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    let scale = 6.0 * eta * cutoff * cutoff;
    // int_20^inf x^3 e^-x dx, relative to the 3! in `scale`.
    let tol = scale * ((8000.0 + 1200.0 + 120.0 + 6.0) * (-20.0f64).exp() / 6.0 + 1e-9);
    for (i, &t) in grid.iter().enumerate() {
        let z = c(1.0, -cutoff * t).powi(-4) * scale;
        assert!((k.nu[i] - z.re).abs() < tol);
        assert!((k.eta[i] - z.im).abs() < tol);
    }
}

#[test]
fn supraohmic_noise_decays_faster_than_ohmic() {
    let cutoff = 1.0;
    let grid: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
    let ohm = kernels_from_spectral_density(&SpectralDensity::ohmic(1.0, cutoff, 0.0).unwrap(), &grid).unwrap();
    let cub = kernels_from_spectral_density(&SpectralDensity::supraohmic(3.0, 1.0, cutoff, 0.0).unwrap(), &grid).unwrap();
    for (i, &t) in grid.iter().enumerate() {
        if t > 3.0 / cutoff {
            assert!(cub.nu[i].abs() < ohm.nu[i].abs(), "t = {t}");
        }
    }
}

#[test]
fn identical_histories_give_unit_functional() {
    let grid = uniform_grid(5.0, 200);
    let j = SpectralDensity::ohmic(1.0, 1.0, 0.3).unwrap();
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    let x: Vec<f64> = grid.iter().map(|t| t.sin()).collect();
    let paths = PathPair::new(grid, x.clone(), x).unwrap();
    let r = influence_functional(&paths, &k).unwrap();
    assert_eq!(r.gamma, 0.0);
    assert_eq!(r.phi, 0.0);
    assert_eq!(r.value(), c(1.0, 0.0));
}

#[test]
fn single_mode_static_paths_match_fock_oracle() {
    let (strength, w) = (0.3, 1.2);
    for temperature in [0.0, 0.8] {
        for (x, xp, t) in [(0.5, -0.5, 1.7), (0.9, 0.2, 3.0), (-0.3, 0.6, 4.4)] {
            let grid = uniform_grid(t, 6000);
            let j = SpectralDensity::single_mode(strength, w, temperature).unwrap();
            let k = kernels_from_spectral_density(&j, &grid).unwrap();
            let paths = PathPair::static_pair(grid, x, xp).unwrap();
            let r = influence_functional(&paths, &k).unwrap();
            let f = fock_overlap(strength, w, temperature, x, xp, t);
            let (gamma, phi) = (-f.norm().ln(), f.arg());
            assert!(rel(r.gamma, gamma) < 1e-6, "gamma {} vs {gamma}", r.gamma);
            assert!(rel(r.phi, phi) < 1e-6, "phi {} vs {phi}", r.phi);
        }
    }
}

#[test]
fn single_mode_static_closed_form() {
    let (s, w, temperature, d) = (0.4, 0.9, 0.0, 1.5);
    let t = 6.0;
    let j = SpectralDensity::single_mode(s, w, temperature).unwrap();
    let curve = decoherence_exponent_curve(&j, d, t, 6000).unwrap();
    let expect = d * d * s * (1.0 - (w * t).cos()) / (w * w);
    assert!(rel(*curve.gamma.last().unwrap(), expect) < 1e-6);
}

#[test]
fn ohmic_high_temperature_growth_is_linear() {
    let j = SpectralDensity::ohmic(0.5, 1.0, 20.0).unwrap();
    let curve = decoherence_exponent_curve(&j, 0.1, 40.0, 1600).unwrap();
    let pts: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.gamma)
        .filter(|(t, _)| **t >= 5.0)
        .map(|(t, g)| (*t, *g))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.999, "R^2 = {r2}");
    assert!(sxy / sxx > 0.0);
}

#[test]
fn zero_kernels_reduce_to_bare_action() {
    let grid = uniform_grid(2.0, 400);
    let x: Vec<f64> = grid.iter().map(|t| 0.3 * t * t).collect();
    let xp: Vec<f64> = grid.iter().map(|t| -t).collect();
    let paths = PathPair::new(grid.clone(), x.clone(), xp.clone()).unwrap();
    let a = effective_action(&paths, &free_particle, &BathKernels::zero(grid.clone())).unwrap();
    let bare = bare_action(&grid, &x, &free_particle).unwrap() - bare_action(&grid, &xp, &free_particle).unwrap();
    assert_eq!(a, c(bare, 0.0));
    let same = PathPair::new(grid.clone(), x.clone(), x).unwrap();
    let j = SpectralDensity::ohmic(1.0, 1.0, 1.0).unwrap();
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    assert_eq!(effective_action(&same, &free_particle, &k).unwrap(), c(0.0, 0.0));
}

#[test]
fn free_particle_with_single_mode_matches_composed_oracle() {
    // x = v t, x' = -v t: exact finite differences, S[x] - S[x'] = 0 and
    // Sigma = 0; the influence part is |int_0^T 2 v t e^{i w t} dt|^2 S coth / 2.
    let (v, s, w, temperature, horizon) = (0.4, 0.5, 1.1, 0.7, 3.5);
    let grid = uniform_grid(horizon, 8000);
    let x: Vec<f64> = grid.iter().map(|t| v * t).collect();
    let xp: Vec<f64> = grid.iter().map(|t| -v * t + 0.2).collect();
    let paths = PathPair::new(grid.clone(), x, xp).unwrap();
    let j = SpectralDensity::single_mode(s, w, temperature).unwrap();
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    let a = effective_action(&paths, &free_particle, &k).unwrap();

    // Bare part: 1/2 v^2 T for both, independent of the offset.
    let bare = 0.0;
    // Delta = 2 v t - 0.2, Sigma = 0.2.
    let coth = 1.0 / (w / (2.0 * temperature)).tanh();
    let iw = c(0.0, w);
    let e = (iw * horizon).exp();
    let int_t = e * (c(horizon, 0.0) / iw + 1.0 / (w * w)) - 1.0 / (w * w);
    let int_1 = (e - 1.0) / iw;
    let delta_ft = int_t * (2.0 * v) - int_1 * 0.2;
    let gamma = 0.5 * s * coth * delta_ft.norm_sqr();
    // phi = int_0^T ds Delta(s) int_0^s du S sin w(s-u) Sigma
    //     = 0.2 S int_0^T Delta(s) (1 - cos w s) / w ds
    let int_cos_t = horizon * (w * horizon).sin() / w + ((w * horizon).cos() - 1.0) / (w * w);
    let int_cos = (w * horizon).sin() / w;
    let phi = 0.2 * s / w
        * (2.0 * v * (horizon * horizon / 2.0 - int_cos_t) - 0.2 * (horizon - int_cos));
    assert!(rel(a.im, gamma) < 1e-6, "{} vs {gamma}", a.im);
    assert!((a.re - bare - phi).abs() < 1e-6 * phi.abs().max(1e-3), "{} vs {phi}", a.re);
}

#[test]
fn curve_zero_separation_and_quadratic_scaling() {
    let j = SpectralDensity::ohmic(1.0, 1.0, 0.5).unwrap();
    let zero = decoherence_exponent_curve(&j, 0.0, 10.0, 500).unwrap();
    assert!(zero.gamma.iter().all(|&g| g == 0.0));
    let a = decoherence_exponent_curve(&j, 0.7, 10.0, 500).unwrap();
    let b = decoherence_exponent_curve(&j, 1.4, 10.0, 500).unwrap();
    for (x, y) in a.gamma.iter().zip(&b.gamma).skip(1) {
        assert!(rel(*y, 4.0 * x) < 1e-6);
    }
}

#[test]
fn curve_matches_double_sum_and_closed_form() {
    let (eta, cutoff, d) = (0.5, 1.0, 1.0);
    let j = SpectralDensity::ohmic(eta, cutoff, 0.0).unwrap();
    let curve = decoherence_exponent_curve(&j, d, 10.0, 1000).unwrap();
    for &k in &[1usize, 2, 17, 500, 1000] {
        let grid = curve.times[..=k].to_vec();
        let kern = kernels_from_spectral_density(&j, &grid).unwrap();
        let paths = PathPair::static_pair(grid, d / 2.0, -d / 2.0).unwrap();
        let r = influence_functional(&paths, &kern).unwrap();
        assert!(rel(curve.gamma[k], r.gamma) < 1e-10);
        assert_eq!(r.phi, 0.0);
    }
    // T = 0 ohmic: gamma(t) = eta d^2 ln(1 + cutoff^2 t^2) / 2.
    for (&t, &g) in curve.times.iter().zip(&curve.gamma).skip(100) {
        let expect = 0.5 * eta * d * d * (1.0 + (cutoff * t).powi(2)).ln();
        assert!(rel(g, expect) < 1e-4, "t={t}: {g} vs {expect}");
    }
}

/// Reference run at eta = 1, cutoff = 1, d = 1, 2000 steps on [0, 10]:
/// cubic growth -0.0249 (the curve overshoots and settles), ohmic growth
/// 0.4165. Both agree with the T = 0 closed forms
/// `1 - Re (1 - i t)^-2` and `ln(1 + t^2) / 2`.
#[test]
fn supraohmic_saturates_ohmic_does_not() {
    let cutoff = 1.0;
    let growth = |j: SpectralDensity| {
        let curve = decoherence_exponent_curve(&j, 1.0, 10.0 / cutoff, 2000).unwrap();
        let g5 = curve.gamma_at(5.0 / cutoff);
        let g10 = curve.gamma_at(10.0 / cutoff);
        (g10 - g5) / g5
    };
    let cubic = growth(SpectralDensity::supraohmic(3.0, 1.0, cutoff, 0.0).unwrap());
    let ohmic = growth(SpectralDensity::ohmic(1.0, cutoff, 0.0).unwrap());
    assert!(cubic < 0.05, "{cubic}");
    assert!(ohmic > 0.2, "{ohmic}");
    assert!((cubic + 0.0249).abs() < 1e-3);
    let closed = |t: f64| 1.0 - c(1.0, -t).powi(-2).re;
    assert!((cubic - (closed(10.0) - closed(5.0)) / closed(5.0)).abs() < 1e-4);
    assert!((ohmic - 0.4165).abs() < 1e-3);
}

#[test]
fn refinement_changes_gamma_by_under_one_percent() {
    for j in [
        SpectralDensity::ohmic(1.0, 1.0, 0.5).unwrap(),
        SpectralDensity::supraohmic(3.0, 1.0, 1.0, 0.0).unwrap(),
        SpectralDensity::single_mode(0.5, 1.0, 0.2).unwrap(),
    ] {
        let coarse = decoherence_exponent_curve(&j, 1.0, 8.0, 200).unwrap();
        let fine = decoherence_exponent_curve(&j, 1.0, 8.0, 400).unwrap();
        let (a, b) = (coarse.gamma[200], fine.gamma[400]);
        assert!(rel(a, b) < 0.01, "{a} vs {b}");
    }
}

#[test]
fn curve_csv_layout() {
    let j = SpectralDensity::ohmic(1.0, 1.0, 0.0).unwrap();
    let csv = decoherence_exponent_curve(&j, 1.0, 1.0, 4).unwrap().to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,gamma,phi");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "0,0,0");
}

#[test]
fn validation_errors() {
    assert!(SpectralDensity::ohmic(0.0, 1.0, 0.0).is_err());
    assert!(SpectralDensity::ohmic(1.0, -1.0, 0.0).is_err());
    assert!(SpectralDensity::ohmic(1.0, 1.0, -0.1).is_err());
    assert!(SpectralDensity::supraohmic(0.5, 1.0, 1.0, 0.0).is_err());
    assert!(SpectralDensity::single_mode(1.0, 0.0, 0.0).is_err());
    let j = SpectralDensity::ohmic(1.0, 1.0, 0.0).unwrap();
    assert!(kernels_from_spectral_density(&j, &[0.0, 0.1, 0.3]).is_err());
    assert!(PathPair::new(vec![0.0, 1.0, 2.5], vec![0.0; 3], vec![0.0; 3]).is_err());
    assert!(PathPair::new(vec![0.0, 1.0], vec![0.0; 3], vec![0.0; 2]).is_err());

    let paths = PathPair::static_pair(uniform_grid(1.0, 10), 1.0, 0.0).unwrap();
    let wrong_step = kernels_from_spectral_density(&j, &uniform_grid(1.0, 20)).unwrap();
    assert!(matches!(influence_functional(&paths, &wrong_step), Err(Error::DimensionMismatch(_))));
    let short = kernels_from_spectral_density(&j, &uniform_grid(0.5, 5)).unwrap();
    assert!(influence_functional(&paths, &short).is_err());
    let shifted: Vec<f64> = uniform_grid(1.0, 10).iter().map(|t| t + 0.05).collect();
    let no_zero = kernels_from_spectral_density(&j, &shifted).unwrap();
    assert!(influence_functional(&paths, &no_zero).is_err());
    assert!(decoherence_exponent_curve(&j, -1.0, 1.0, 10).is_err());
    assert!(decoherence_exponent_curve(&j, 1.0, 0.0, 10).is_err());
}

#[test]
fn symmetric_kernel_grid_is_accepted() {
    let j = SpectralDensity::ohmic(1.0, 1.0, 0.3).unwrap();
    let grid = symmetric_grid(50, 0.1);
    let k = kernels_from_spectral_density(&j, &grid).unwrap();
    let paths = PathPair::static_pair(uniform_grid(5.0, 50), 0.5, -0.5).unwrap();
    let a = influence_functional(&paths, &k).unwrap();
    let b = influence_functional(&paths, &kernels_from_spectral_density(&j, paths.tgrid()).unwrap()).unwrap();
    assert!(rel(a.gamma, b.gamma) < 1e-12);
}

fn density() -> impl Strategy<Value = SpectralDensity> {
    (0.1f64..2.0, 0.5f64..3.0, 0.0f64..3.0, prop::bool::ANY, 1.0f64..4.0).prop_map(|(eta, cut, t, ohm, s)| {
        if ohm {
            SpectralDensity::ohmic(eta, cut, t).unwrap()
        } else {
            SpectralDensity::supraohmic(s, eta, cut, t).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gamma_is_non_negative_and_quadratic(
        j in density(),
        x in prop::collection::vec(-2.0f64..2.0, 40),
        xp in prop::collection::vec(-2.0f64..2.0, 40),
        alpha in 0.1f64..5.0,
    ) {
        let grid = uniform_grid(4.0, 39);
        let k = kernels_from_spectral_density(&j, &grid).unwrap();
        let r = influence_functional(&PathPair::new(grid.clone(), x.clone(), xp.clone()).unwrap(), &k).unwrap();
        prop_assert!(r.gamma >= -1e-10);
        // Scale Delta by alpha around the midpoint, keeping Sigma fixed.
        let xs: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| 0.5 * (a + b) + 0.5 * alpha * (a - b)).collect();
        let xps: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| 0.5 * (a + b) - 0.5 * alpha * (a - b)).collect();
        let s = influence_functional(&PathPair::new(grid, xs, xps).unwrap(), &k).unwrap();
        prop_assert!((s.gamma - alpha * alpha * r.gamma).abs() <= 1e-9 * (1.0 + s.gamma.abs()));
        prop_assert!((s.phi - alpha * r.phi).abs() <= 1e-9 * (1.0 + s.phi.abs()));
    }

    #[test]
    fn gamma_vanishes_only_for_identical_paths(
        j in density(),
        x in prop::collection::vec(-2.0f64..2.0, 30),
        bump in 0.05f64..1.0,
        at in 1usize..28,
    ) {
        let grid = uniform_grid(3.0, 29);
        let k = kernels_from_spectral_density(&j, &grid).unwrap();
        let same = influence_functional(&PathPair::new(grid.clone(), x.clone(), x.clone()).unwrap(), &k).unwrap();
        prop_assert!(same.gamma.abs() <= 1e-12);
        let mut xp = x.clone();
        xp[at] += bump;
        let r = influence_functional(&PathPair::new(grid, x, xp).unwrap(), &k).unwrap();
        prop_assert!(r.gamma > 1e-12);
    }

    #[test]
    fn noise_kernel_is_even(j in density(), step in 0.01f64..0.5) {
        let k = kernels_from_spectral_density(&j, &symmetric_grid(60, step)).unwrap();
        prop_assert!(k.evenness_defect() <= 1e-10);
        prop_assert!(k.nu.iter().chain(&k.eta).all(|v| v.is_finite()));
    }
}
