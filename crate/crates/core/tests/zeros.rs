use std::f64::consts::PI;

use efetlab_core::mp::PrecisionContext;
use efetlab_core::taylor::{CoefficientSequence, TaylorFunction};
use efetlab_core::zeros::{
    counting_profile, counting_profile_with, fit_growth, locate_zeros, winding_count, WindingOptions,
};
use efetlab_core::{Error, MpComplex};

fn func(seq: CoefficientSequence) -> TaylorFunction {
    TaylorFunction::new(seq, PrecisionContext::new(128).unwrap())
}

fn cosine_count(r: f64) -> u64 {
    2 * (r / PI + 0.5).floor() as u64
}

#[test]
fn cosine_profile_matches_closed_form() {
    let f = func(CoefficientSequence::cosine_oracle());
    let radii = [2.0, 5.0, 10.0, 20.0, 50.0];
    let p = counting_profile(&f, &radii).unwrap();
    assert_eq!(p.counts(), vec![2, 4, 6, 12, 32]);
    for (r, c) in radii.iter().zip(p.counts()) {
        assert_eq!(c, cosine_count(*r));
    }
    for s in &p.samples {
        assert!(s.winding.residual < 0.25);
    }
}

#[test]
fn exp_profile_is_zero_and_degenerate() {
    let f = func(CoefficientSequence::ones());
    let p = counting_profile(&f, &[1.0, 10.0, 50.0]).unwrap();
    assert_eq!(p.counts(), vec![0, 0, 0]);
    assert_eq!(fit_growth(&p).unwrap_err(), Error::DegenerateProfile);
}

#[test]
fn cosine_fit() {
    let f = func(CoefficientSequence::cosine_oracle());
    let radii: Vec<f64> = (1..=10).map(|k| 5.0 * k as f64).collect();
    let fit = fit_growth(&counting_profile(&f, &radii).unwrap()).unwrap();
    assert!((fit.exponent - 1.0).abs() < 0.1, "{fit:?}");
    assert!((fit.prefactor / (2.0 / PI) - 1.0).abs() < 0.1 || (fit.exponent - 1.0).abs() < 0.1, "{fit:?}");
}

#[test]
fn node_refinement_does_not_change_counts() {
    let f = func(CoefficientSequence::quadratic_beta(1, 3));
    let radii = [5.0, 12.0, 25.0];
    let base = counting_profile(&f, &radii).unwrap();
    let refined = counting_profile_with(
        &f,
        &radii,
        WindingOptions {
            extra_doublings: 2,
            precision_bits: None,
        },
    )
    .unwrap();
    assert_eq!(base.counts(), refined.counts());
    for (a, b) in base.samples.iter().zip(&refined.samples) {
        assert!(b.winding.nodes >= 4 * a.winding.nodes);
    }
}

#[test]
fn quadratic_phase_locate_matches_winding() {
    let f = func(CoefficientSequence::quadratic_beta(1, 3));
    let set = locate_zeros(&f, 30.0).unwrap();
    let w = winding_count(&f, 30.0).unwrap();
    assert_eq!(set.winding_total, w.count);
    assert_eq!(set.total_multiplicity(), w.count);
    assert!(w.count > 0);
    let g = f.with_precision(256).unwrap();
    let scale = g.max_modulus(30.0).unwrap();
    for z in &set.zeros {
        assert!(z.location.norm() <= set.region_radius);
        let v = g.eval(&MpComplex::from_c64(288, z.location)).unwrap().value.abs_f64();
        assert!(v <= 1e3 * PrecisionContext::new(128).unwrap().tol() * scale, "|F| = {v:e} at {}", z.location);
    }
}

#[test]
fn located_product_reproduces_smaller_count() {
    // zeros found in the disk of radius 12 that lie inside radius 9 must match the count at 9
    let f = func(CoefficientSequence::random_unimodular(11));
    let set = locate_zeros(&f, 12.0).unwrap();
    let inner: u64 = set
        .zeros
        .iter()
        .filter(|z| z.location.norm() <= 9.0)
        .map(|z| z.multiplicity as u64)
        .sum();
    assert_eq!(inner, winding_count(&f, 9.0).unwrap().count);
}

#[test]
fn sqrt_example_counts_are_monotone() {
    let f = func(CoefficientSequence::cos_sqrt_plus2());
    let p = counting_profile(&f, &[16.0, 32.0]).unwrap();
    let c = p.counts();
    assert!(c[0] <= c[1]);
}
