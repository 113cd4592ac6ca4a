use efetlab_core::hadamard::{
    a_r_estimate, claim1_envelope, factorization_residual, g_r_eval, h_r_eval, harmonic_measure_slit, killing_term,
    log_abs_pi_r, power_sums, residual_grid, s_theta, theta_star, v_r_eval, HadamardData, PowerSum, ZeroFamily,
    ZeroModel, DEFAULT_J_MAX,
};
use efetlab_core::zeros::{locate_zeros, winding_count};
use efetlab_core::{CoefficientSequence, PrecisionContext, TaylorFunction};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Data of e^z cos z: cosine zeros with a_R = 1.
fn exp_cos(r: f64) -> HadamardData {
    HadamardData::new(ZeroModel::from_family(ZeroFamily::cosine(), r).unwrap(), c(1.0, 0.0), DEFAULT_J_MAX).unwrap()
}

fn synthetic(a: f64, s2: Complex64, r: f64) -> HadamardData {
    let mut d = HadamardData::new(ZeroModel::unmodeled(vec![], 0.0, r).unwrap(), c(a, 0.0), 2).unwrap();
    d.s = vec![PowerSum { j: 2, value: s2, error: 0.0 }];
    d
}

#[test]
fn h_r_matches_direct_sum() {
    let data = exp_cos(10.0);
    for z in [c(1.0, 0.0), c(3.0, 2.0), c(-0.5, 4.5)] {
        // Σ over pairs ±λ of log(1 − z²/λ²); the log terms cancel the z/λ terms pairwise
        let mut direct = c(0.0, 0.0);
        let k_max = 2_000_000u64;
        for k in 3..k_max {
            let l = (k as f64 + 0.5) * PI;
            direct += (1.0 - z * z / (l * l)).ln();
        }
        // remainder ≈ −z² Σ_{k≥K} λ_k^{−2} = −z²/(π²(K)) to leading order
        direct -= z * z / (PI * PI * k_max as f64);
        let (h, err) = h_r_eval(z, &data).unwrap();
        assert!((h - direct).norm() < 1e-10 + err, "z = {z}: {h} vs {direct}");
    }
}

#[test]
fn pi_r_growth_example() {
    let model = ZeroModel::from_family(ZeroFamily::cosine(), 10.0).unwrap();
    let n = model.inside.len() as f64;
    assert!(log_abs_pi_r(c(0.0, 5.0), &model) <= n * (3.0f64 * 10.0).ln());
}

#[test]
fn s_theta_peaks_at_zero() {
    let data = exp_cos(20.0);
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for k in 0..=3600 {
        let t = -PI + k as f64 * PI / 1800.0;
        let v = s_theta(5.0, t, &data).unwrap();
        if v > best {
            best = v;
            arg = t;
        }
    }
    assert!(arg.abs() < 0.1);
    let z = Complex64::from_polar(5.0, 0.3);
    let direct = (data.a_r * z + h_r_eval(z, &data).unwrap().0).re;
    assert!((s_theta(5.0, 0.3, &data).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn theta_star_matches_bisection() {
    let s2 = Complex64::from_polar(0.01, PI / 3.0);
    let data = synthetic(1.0, s2, 10.0);
    let r = 2.0;
    let phi = |t: f64| t.sin() - s2.norm() * r * (2.0 * t + s2.arg()).sin();
    let (mut lo, mut hi) = (-0.5, 0.5);
    assert!(phi(lo) < 0.0 && phi(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = theta_star(r, &data).unwrap();
    assert!((t - 0.5 * (lo + hi)).abs() < 1e-10);
    let at = s_theta(r, t, &data).unwrap();
    for k in -50..=50 {
        assert!(at >= s_theta(r, t + k as f64 * 1e-3, &data).unwrap() - 1e-15);
    }
    let conj = synthetic(1.0, s2.conj(), 10.0);
    assert!((theta_star(r, &conj).unwrap() + t).abs() < 1e-14);
}

#[test]
fn theta_star_stops_at_roundoff() {
    // Newton cycles at the f64 noise floor here
    let s2 = Complex64::from_polar(0.04577478834868411, -2.774793883550922);
    let r = 1.6824294973433287;
    let a = theta_star(r, &synthetic(1.0, s2, 10.0)).unwrap();
    let b = theta_star(r, &synthetic(1.0, s2.conj(), 10.0)).unwrap();
    assert!((a + 0.024122289285136152).abs() < 1e-15);
    assert!((a + b).abs() < 1e-13);
}

#[test]
fn g_r_matches_grid_maximum() {
    let data = exp_cos(20.0);
    let r = 3.0;
    let grid = (0..720)
        .map(|k| {
            let z = Complex64::from_polar(r, k as f64 * PI / 360.0);
            (data.a_r * z + h_r_eval(z, &data).unwrap().0).re
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let (g, _) = g_r_eval(r, &data).unwrap();
    assert!((g - (grid - r)).abs() < 1e-6);
}

#[test]
fn power_profile_g_r_bound() {
    // n(t) = ⌊t^0.4⌋ on the negative axis, a_R = 1
    let c_bound = 0.02;
    for r_big in [1e4, 1e5, 1e6] {
        let model = ZeroModel::from_family(ZeroFamily::power(0.4, PI).unwrap(), r_big).unwrap();
        let data = HadamardData::new(model, c(1.0, 0.0), DEFAULT_J_MAX).unwrap();
        let limit = data.radius_limit();
        for k in 1..=20 {
            let r = limit * k as f64 / 20.0;
            let (g, _) = g_r_eval(r, &data).unwrap();
            let bound = c_bound * r_big.powf(0.45) * r / r_big.powf(0.9);
            assert!(g.abs() <= bound, "R = {r_big}, r = {r}: {g} > {bound}");
        }
    }
}

/// Fourth-order five-point second differences in x and y.
fn laplacian(f: impl Fn(Complex64) -> f64, z: Complex64, h: f64) -> f64 {
    let d = |dz: Complex64| {
        (-f(z + 2.0 * dz) + 16.0 * f(z + dz) - 30.0 * f(z) + 16.0 * f(z - dz) - f(z - 2.0 * dz)) / (12.0 * h * h)
    };
    d(c(h, 0.0)) + d(c(0.0, h))
}

#[test]
fn harmonic_measure_is_harmonic() {
    let f = |z: Complex64| harmonic_measure_slit(z).unwrap();
    let mut checked = 0;
    for i in -20..=20 {
        for k in -20..=20 {
            let z = c(i as f64 / 20.0, k as f64 / 20.0);
            let slit = if z.re >= 0.0 && z.re <= 1.0 { z.im.abs() } else { z.norm().min((z - 1.0).norm()) };
            if slit < 0.05 || z.norm() > 0.95 {
                continue;
            }
            let lap = laplacian(f, z, 1e-3);
            assert!(lap.abs() < 1e-5, "ζ = {z}: {lap}");
            checked += 1;
        }
    }
    assert!(checked > 800);
}

#[test]
fn killing_term_is_harmonic() {
    let f = |z: Complex64| killing_term(z, 0.5, 0.45);
    for i in -10..=10 {
        for k in -10..=10 {
            let z = c(i as f64 * 1.3, k as f64 * 1.3);
            if z.norm() < 1.0 || (z.re > 0.0 && z.im.abs() < 1.0) {
                continue;
            }
            assert!(laplacian(f, z, 1e-3).abs() < 1e-6);
        }
    }
}

#[test]
fn cosine_boundary_values_of_v_r() {
    // cos has linearly many zeros, so log|π_R| on |z| = R^0.9 dominates the killing term at θ = π/2
    let model = ZeroModel::from_family(ZeroFamily::cosine(), 20.0).unwrap();
    let rad = 20f64.powf(0.9);
    let v = v_r_eval(Complex64::from_polar(rad, PI / 2.0), 0.5, 0.45, &model).unwrap();
    let estimate: f64 = (0..6).map(|k| (1.0 + rad * rad / ((k as f64 + 0.5) * PI).powi(2)).ln()).sum::<f64>()
        - killing_term(Complex64::from_polar(rad, PI / 2.0), 0.5, 0.45);
    assert!((v - estimate).abs() < 1e-12);
    assert!(v > 0.0);
}

#[test]
fn cosine_factorization_with_computed_zeros() {
    let f = TaylorFunction::new(CoefficientSequence::cosine_oracle(), PrecisionContext::new(128).unwrap());
    let set = locate_zeros(&f, 20.0).unwrap();
    let inside: Vec<Complex64> = set
        .zeros
        .iter()
        .flat_map(|z| std::iter::repeat_n(z.location, z.multiplicity as usize))
        .collect();
    assert_eq!(inside.len(), 12);
    let model = ZeroModel::with_inside(inside, ZeroFamily::cosine(), 20.0).unwrap();
    let data = HadamardData::from_function(&f, model, DEFAULT_J_MAX).unwrap();
    let grid = residual_grid(&data.model, 100);
    assert_eq!(grid.len(), 100);
    let res = factorization_residual(&f, &data, &grid).unwrap();
    assert!(res < 1e-3, "residual {res}");
}

#[test]
fn cos_sqrt_a_r_near_one() {
    let f = TaylorFunction::new(CoefficientSequence::cos_sqrt_plus2(), PrecisionContext::new(128).unwrap());
    let set = locate_zeros(&f, 50.0).unwrap();
    let model = ZeroModel::from_zero_set(&set, 1.0).unwrap();
    let a = a_r_estimate(&f, &model).unwrap();
    assert!((a - 1.0).norm() < 0.2, "a_R = {a}");
}

#[test]
fn claim4_envelope_for_computed_data() {
    let f = TaylorFunction::new(CoefficientSequence::random_unimodular(7), PrecisionContext::new(128).unwrap());
    let r_big = 40.0;
    let set = locate_zeros(&f, r_big).unwrap();
    let n = winding_count(&f, r_big).unwrap().count as f64;
    assert_eq!(set.total_multiplicity() as f64, n);
    let sigma = (n / r_big).max(1.0);
    let data = HadamardData::from_function(&f, ZeroModel::from_zero_set(&set, sigma).unwrap(), DEFAULT_J_MAX).unwrap();
    assert!(!data.tail_modeled());
    for k in 1..=20 {
        let r = k as f64;
        let (g, _) = g_r_eval(r, &data).unwrap();
        assert!(g.abs() <= n * (3.0 * r_big).ln() + 5.0, "r = {r}: {g}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn claim1_envelope_holds(alpha in 0.2f64..=1.0, phase in -3.1f64..3.1, r in 2.0f64..500.0, cosine in any::<bool>()) {
        let fam = if cosine { ZeroFamily::cosine() } else { ZeroFamily::power(alpha, phase).unwrap() };
        let model = ZeroModel::from_family(fam, r).unwrap();
        let sigma = model.sigma();
        for (k, (s, err)) in power_sums(&model, 10).unwrap().into_iter().enumerate() {
            let j = k as u32 + 2;
            prop_assert!(s.norm() <= claim1_envelope(sigma, r, j) + err);
        }
    }

    #[test]
    fn claim2_bound(r in 8.0f64..200.0, frac in 0.0f64..=0.5, theta in -3.1f64..3.1) {
        let model = ZeroModel::from_family(ZeroFamily::cosine(), r).unwrap();
        let data = HadamardData::new(model, c(1.0, 0.0), DEFAULT_J_MAX).unwrap();
        let z = Complex64::from_polar(frac * r, theta);
        let (h, _) = h_r_eval(z, &data).unwrap();
        prop_assert!(h.norm() <= 4.0 * data.sigma * z.norm_sqr() / r + 1e-15);
    }

    #[test]
    fn theta_star_odd_under_reflection(mag in 0.0f64..0.05, arg in -3.1f64..3.1, r in 0.5f64..3.0) {
        let s2 = Complex64::from_polar(mag, arg);
        let a = theta_star(r, &synthetic(1.0, s2, 10.0)).unwrap();
        let b = theta_star(r, &synthetic(1.0, s2.conj(), 10.0)).unwrap();
        prop_assert!((a + b).abs() < 1e-13);
    }
}
