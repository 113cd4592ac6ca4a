use std::time::Instant;

use efetlab_core::constructions::{
    claims_check, combi_find, g_factor_contour, max_theta_excess, phi_borel, proposition_report, recheck_witness,
    riesz_density, riesz_density_fd, riesz_mass, SubharmonicExample,
};
use efetlab_core::correlation::Interpolator;
use efetlab_core::hadamard::{
    claim1_envelope, g_r_eval, theta_star, v_r_boundary_scan, HadamardData, ZeroFamily, ZeroModel, DEFAULT_J_MAX,
};
use efetlab_core::mp::precision_for_radius;
use efetlab_core::table::{fmt_f64, Table};
use efetlab_core::zeros::{count_row, fit_growth, locate_zeros, winding_count, CountingFunction, COUNT_HEADER};
use efetlab_core::{CoefficientSequence, Error, MpComplex, PrecisionContext, SequenceSpec, TaylorFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::Report;
use crate::CliError;

/// Sample points of the factorization check in the sqrt example.
pub const SQRT_SAMPLE_POINTS: [(f64, f64); 10] = [
    (1.0, 0.0),
    (0.0, 5.0),
    (-10.0, 0.0),
    (20.0, 20.0),
    (50.0, 0.0),
    (-40.0, 0.0),
    (0.0, 30.0),
    (-25.0, 25.0),
    (30.0, -35.0),
    (10.0, -45.0),
];
pub const SQRT_GROWTH_RADII: [f64; 5] = [1.0, 4.0, 16.0, 64.0, 256.0];
/// Zero-count exponent window of the sqrt example.
pub const SQRT_EXPONENT_WINDOW: (f64, f64) = (0.35, 0.65);
/// Exponent window for a dichotomy scan to report linear zero growth.
pub const LINEAR_WINDOW: (f64, f64) = (0.85, 1.15);

struct Outcome {
    tables: Vec<Table>,
    summary: Value,
    failure: Option<String>,
}

fn function(cfg: &ExperimentConfig) -> Result<TaylorFunction, CliError> {
    let seq = cfg
        .coefficient_sequence()?
        .ok_or_else(|| CliError::Config(format!("{} needs a sequence", cfg.experiment.tag())))?;
    Ok(TaylorFunction::new(seq, PrecisionContext::new(cfg.precision_bits)?))
}

/// Runs an experiment. Numeric failures inside a sweep are recorded in the report; failures
/// that leave nothing to report are returned as errors.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let out = match cfg.experiment {
        ExperimentKind::Count => count(cfg)?,
        ExperimentKind::DichotomyScan => dichotomy(cfg)?,
        ExperimentKind::SqrtExample => sqrt_example(cfg)?,
        ExperimentKind::InterpVerify => interp_verify(cfg)?,
        ExperimentKind::HadamardProfile => hadamard_profile(cfg)?,
        ExperimentKind::Subharmonic => subharmonic(cfg)?,
        ExperimentKind::Combi => combi(cfg)?,
        ExperimentKind::Locate => locate(cfg)?,
    };
    Ok(Report {
        config: cfg.clone(),
        tables: out.tables,
        summary: out.summary,
        runtime_seconds: start.elapsed().as_secs_f64(),
        failure: out.failure,
    })
}

fn numeric(e: Error) -> Result<String, CliError> {
    if e.is_numeric_failure() {
        Ok(e.to_string())
    } else {
        Err(e.into())
    }
}

/// Appends a "failed" column when any row failed.
fn flag_failures(t: &mut Table, failed: &[bool]) {
    if !failed.iter().any(|f| *f) {
        return;
    }
    t.header.push("failed".into());
    for (row, f) in t.rows.iter_mut().zip(failed) {
        row.push(f.to_string());
    }
}

struct Counts {
    table: Table,
    profile: CountingFunction,
    failure: Option<String>,
}

fn count_sweep(f: &TaylorFunction, radii: &[f64]) -> Result<Counts, CliError> {
    let results: Vec<_> = radii.par_iter().map(|&r| winding_count(f, r)).collect();
    let mut table = Table::new("count", &COUNT_HEADER);
    let mut failed = Vec::new();
    let mut pairs = Vec::new();
    let mut failure = None;
    for (&r, res) in radii.iter().zip(results) {
        match res {
            Ok(w) => {
                table.push(count_row(r, &w));
                pairs.push((r, w.count));
                failed.push(false);
            }
            Err(e) => {
                let msg = numeric(e)?;
                failure.get_or_insert(format!("R = {r}: {msg}"));
                table.push(vec![fmt_f64(r), String::new(), String::new(), "nan".into(), String::new(), String::new()]);
                failed.push(true);
            }
        }
    }
    flag_failures(&mut table, &failed);
    if let Some(w) = pairs.windows(2).find(|w| w[1].1 < w[0].1) {
        failure.get_or_insert(format!("n_F decreases from {} at R = {} to {} at R = {}", w[0].1, w[0].0, w[1].1, w[1].0));
    }
    Ok(Counts {
        table,
        profile: CountingFunction::from_counts(&pairs),
        failure,
    })
}

fn fit_summary(profile: &CountingFunction) -> Value {
    match fit_growth(profile) {
        Ok(fit) => json!({
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
            "min_ratio": fit.min_ratio,
            "classification": if fit.min_ratio > 0.0 && (LINEAR_WINDOW.0..=LINEAR_WINDOW.1).contains(&fit.exponent) {
                "linear zero growth"
            } else {
                "inconclusive"
            },
        }),
        Err(Error::DegenerateProfile) => json!({ "classification": "exponential-function candidate" }),
        Err(e) => json!({ "classification": "inconclusive", "note": e.to_string() }),
    }
}

fn count(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = function(cfg)?;
    let c = count_sweep(&f, &cfg.radii)?;
    Ok(Outcome {
        summary: json!({ "counts": c.profile.counts(), "fit": fit_summary(&c.profile) }),
        tables: vec![c.table],
        failure: c.failure,
    })
}

fn dichotomy(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = function(cfg)?;
    let c = count_sweep(&f, &cfg.radii)?;
    let mut parseval = Table::new("parseval", &["R", "parseval_lower", "lower_envelope", "log_max_modulus"]);
    for &r in &cfg.radii {
        let p = f.parseval_lower(r)?;
        let m = f.log_max_modulus(r)?.0;
        parseval.push(vec![fmt_f64(r), fmt_f64(p), fmt_f64(r - 0.5 * r.ln() - 3.0), fmt_f64(m)]);
    }
    let seq = f.seq();
    Ok(Outcome {
        summary: json!({
            "counts": c.profile.counts(),
            "fit": fit_summary(&c.profile),
            "unimodular": seq.is_unimodular_sequence(),
            "density_hint": seq.density_hint(),
        }),
        tables: vec![c.table, parseval],
        failure: c.failure,
    })
}

fn sqrt_example(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ctx = PrecisionContext::new(cfg.precision_bits)?;
    let f = TaylorFunction::new(CoefficientSequence::cos_sqrt_plus2(), ctx);
    let c = count_sweep(&f, &cfg.radii)?;
    let mut failure = c.failure;

    let residuals: Vec<_> = SQRT_SAMPLE_POINTS
        .par_iter()
        .map(|&(re, im)| -> efetlab_core::Result<f64> {
            let bits = precision_for_radius(re.hypot(im), cfg.precision_bits);
            let g = g_factor_contour(&MpComplex::from_f64(bits, re, im), &ctx)?;
            let fz = f.with_precision(bits)?;
            let z = MpComplex::from_f64(fz.ctx().working_bits(), re, im);
            let v = fz.eval(&z)?.value;
            Ok((&v - &(&z.exp() * &g)).abs_f64() / v.abs_f64())
        })
        .collect();
    let mut fact = Table::new("factorization", &["re", "im", "abs_z", "residual"]);
    let mut failed = Vec::new();
    let mut worst = 0.0f64;
    for (&(re, im), res) in SQRT_SAMPLE_POINTS.iter().zip(residuals) {
        let cell = match res {
            Ok(v) => {
                worst = worst.max(v);
                failed.push(false);
                fmt_f64(v)
            }
            Err(e) => {
                let msg = numeric(e)?;
                failure.get_or_insert(format!("G at {re}{im:+}i: {msg}"));
                failed.push(true);
                "nan".into()
            }
        };
        fact.push(vec![fmt_f64(re), fmt_f64(im), fmt_f64(re.hypot(im)), cell]);
    }
    flag_failures(&mut fact, &failed);

    let logs: Vec<_> = SQRT_GROWTH_RADII
        .par_iter()
        .map(|&r| g_factor_contour(&MpComplex::from_f64(ctx.working_bits(), -r, 0.0), &ctx).map(|g| g.abs_f64().ln()))
        .collect();
    let mut growth = Table::new("growth", &["r", "log_abs_G", "bound_3_sqrt_r"]);
    let mut failed = Vec::new();
    let mut growth_ok = true;
    for (&r, res) in SQRT_GROWTH_RADII.iter().zip(logs) {
        let cell = match res {
            Ok(v) => {
                growth_ok &= v <= 3.0 * r.sqrt();
                failed.push(false);
                fmt_f64(v)
            }
            Err(e) => {
                let msg = numeric(e)?;
                failure.get_or_insert(format!("G at -{r}: {msg}"));
                failed.push(true);
                "nan".into()
            }
        };
        growth.push(vec![fmt_f64(r), cell, fmt_f64(3.0 * r.sqrt())]);
    }
    flag_failures(&mut growth, &failed);

    let phi10 = phi_borel(&MpComplex::from_f64(ctx.working_bits(), 10.0, 0.0), &ctx)?.to_c64();
    let fit = fit_growth(&c.profile).ok();
    let exponent = fit.as_ref().map(|f| f.exponent);
    Ok(Outcome {
        summary: json!({
            "counts": c.profile.counts(),
            "exponent": exponent,
            "exponent_window": [SQRT_EXPONENT_WINDOW.0, SQRT_EXPONENT_WINDOW.1],
            "exponent_in_window": exponent.is_some_and(|e| (SQRT_EXPONENT_WINDOW.0..=SQRT_EXPONENT_WINDOW.1).contains(&e)),
            "max_factorization_residual": worst,
            "growth_bound_holds": growth_ok,
            "phi_at_10": phi10.re,
        }),
        tables: vec![c.table, fact, growth],
        failure,
    })
}

fn interp_verify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = function(cfg)?;
    let r = cfg.extra.r.expect("resolved");
    let n_max = cfg.extra.n_max.expect("resolved");
    let prec = f.prec();
    let mut table = Table::new("interp", &["h", "n", "abs_deviation", "precision_bits", "R"]);
    let mut failed = Vec::new();
    let mut failure = None;
    let mut max_dev = 0.0f64;
    for &h in &cfg.h_list {
        let interp = Interpolator::new(&f, h, r)?;
        let devs: Vec<efetlab_core::Result<f64>> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let g = interp.eval(&MpComplex::from_f64(prec, n as f64, 0.0))?;
                let a = f.seq().value(n as u64, prec)?;
                let b = f.seq().value((n + h) as u64, prec)?;
                Ok((&g - &(&a * &b.conj())).abs_f64())
            })
            .collect();
        for (n, d) in devs.into_iter().enumerate() {
            let cell = match d {
                Ok(d) => {
                    max_dev = max_dev.max(d);
                    failed.push(false);
                    fmt_f64(d)
                }
                Err(e) => {
                    let msg = numeric(e)?;
                    failure.get_or_insert(format!("h = {h}, n = {n}: {msg}"));
                    failed.push(true);
                    "nan".into()
                }
            };
            table.push(vec![h.to_string(), n.to_string(), cell, cfg.precision_bits.to_string(), fmt_f64(r)]);
        }
    }
    flag_failures(&mut table, &failed);
    Ok(Outcome {
        summary: json!({ "max_deviation": max_dev, "R": r, "n_max": n_max, "h_list": cfg.h_list }),
        tables: vec![table],
        failure,
    })
}

fn hadamard_profile(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let e = &cfg.extra;
    let r_big = e.r.expect("resolved");
    let delta = e.delta.expect("resolved");
    let (data, envelope): (HadamardData, Box<dyn Fn(f64) -> f64>) = match cfg.coefficient_sequence()? {
        None => {
            let alpha = e.alpha.expect("resolved");
            let ap = e.alpha_prime.expect("resolved");
            let model = ZeroModel::from_family(ZeroFamily::power(alpha, std::f64::consts::PI)?, r_big)?;
            let data = HadamardData::new(model, Complex64::new(1.0, 0.0), DEFAULT_J_MAX)?.with_delta(delta)?;
            // g_R relative to R^{α′}·r/R^{1−δ}
            let env = move |r: f64| r_big.powf(ap) * r / r_big.powf(1.0 - delta);
            (data, Box::new(env))
        }
        Some(seq) => {
            let is_cosine = matches!(seq.spec(), SequenceSpec::CosineOracle);
            let f = TaylorFunction::new(seq, PrecisionContext::new(cfg.precision_bits)?);
            let set = locate_zeros(&f, r_big)?;
            let n = set.total_multiplicity() as f64;
            let model = if is_cosine {
                let inside = set
                    .zeros
                    .iter()
                    .flat_map(|z| std::iter::repeat_n(z.location, z.multiplicity as usize))
                    .collect();
                ZeroModel::with_inside(inside, ZeroFamily::cosine(), r_big)?
            } else {
                ZeroModel::from_zero_set(&set, (n / r_big).max(1.0))?
            };
            let data = HadamardData::from_function(&f, model, DEFAULT_J_MAX)?.with_delta(delta)?;
            // the O(n_F(R) log R) envelope of the angular maximum
            let env = move |_r: f64| n * (3.0 * r_big).ln() + 5.0;
            (data, Box::new(env))
        }
    };
    let mut prof = Table::new("hadamard_profile", &["r", "theta_star", "g_R", "error_bar", "tail", "envelope"]);
    let tag = if data.tail_modeled() { "modeled" } else { "tail-unmodeled" };
    let mut failed = Vec::new();
    let mut failure = None;
    let mut worst_ratio = 0.0f64;
    for &r in &cfg.radii {
        match theta_star(r, &data).and_then(|t| g_r_eval(r, &data).map(|g| (t, g))) {
            Ok((theta, (g, err))) => {
                worst_ratio = worst_ratio.max(g.abs() / envelope(r));
                prof.push(vec![fmt_f64(r), fmt_f64(theta), fmt_f64(g), fmt_f64(err), tag.into(), fmt_f64(envelope(r))]);
                failed.push(false);
            }
            Err(err) => {
                let msg = numeric(err)?;
                failure.get_or_insert(format!("r = {r}: {msg}"));
                prof.push(vec![fmt_f64(r), "nan".into(), "nan".into(), "nan".into(), tag.into(), fmt_f64(envelope(r))]);
                failed.push(true);
            }
        }
    }
    flag_failures(&mut prof, &failed);
    let eta = e.eta.expect("resolved");
    let mu = e.mu.expect("resolved");
    let boundary = r_big.powf(1.0 - delta);
    let scan = v_r_boundary_scan(boundary, 360, eta, mu, &data.model)?;
    let v_max = scan
        .column("v_R")
        .expect("scan has v_R")
        .iter()
        .map(|s| s.parse::<f64>().unwrap_or(f64::NAN))
        .fold(f64::NEG_INFINITY, f64::max);
    let claim1: Vec<Value> = data
        .s
        .iter()
        .take(9)
        .map(|p| {
            json!({
                "j": p.j,
                "abs_s_j": p.value.norm(),
                "envelope": claim1_envelope(data.sigma, r_big, p.j),
            })
        })
        .collect();
    Ok(Outcome {
        summary: json!({
            "R": r_big,
            "a_R": [data.a_r.re, data.a_r.im],
            "sigma": data.sigma,
            "tail": tag,
            "max_g_over_envelope": worst_ratio,
            "v_R_boundary_radius": boundary,
            "v_R_boundary_max": v_max,
            "claim1": claim1,
        }),
        tables: vec![prof, scan],
        failure,
    })
}

fn subharmonic(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let r_big = cfg.extra.r.expect("resolved");
    let grid = cfg.extra.grid_density.expect("resolved");
    let ex = SubharmonicExample::with_precision(r_big, cfg.precision_bits)?;
    let claims = claims_check(&ex, grid)?;
    let prop = proposition_report(&ex, &cfg.radii, 20)?;

    let mut claims_t = Table::new("claims", &["alpha", "grid_density", "points", "min_margin_a", "min_margin_b"]);
    claims_t.push(vec![
        fmt_f64(claims.alpha),
        grid.to_string(),
        claims.points.to_string(),
        fmt_f64(claims.min_margin_a),
        fmt_f64(claims.min_margin_b),
    ]);
    let mut theta = Table::new("theta_scan", &["r", "max_excess", "margin"]);
    for &r in &cfg.radii {
        let x = max_theta_excess(r, 720, &ex)?;
        theta.push(vec![fmt_f64(r), fmt_f64(x), fmt_f64(5.0 - x)]);
    }
    let mut riesz = Table::new("riesz", &["x", "density", "density_fd", "mass_0_x"]);
    for k in 0..=20 {
        let x = r_big.powf(k as f64 / 20.0).min(r_big * (1.0 - 1e-9));
        let fd = riesz_density_fd(x, 1e-4 * x.sqrt(), &ex)?;
        riesz.push(vec![fmt_f64(x), fmt_f64(riesz_density(x, &ex)), fmt_f64(fd), fmt_f64(riesz_mass(0.0, x, &ex)?)]);
    }
    let bound = (std::f64::consts::PI / ex.alpha).sqrt() + 0.01;
    Ok(Outcome {
        summary: json!({
            "proposition": prop,
            "claims": claims,
            "claims_hold": claims.holds(),
            "mass_ratio_bound": bound,
            "mass_ratio_within_bound": prop.mass_full_over_sqrt_r <= bound,
        }),
        tables: vec![claims_t, theta, riesz],
        failure: None,
    })
}

fn combi(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seq = cfg.coefficient_sequence()?.expect("resolved");
    let d = cfg.extra.d.expect("resolved");
    let r = cfg.extra.r.expect("resolved") as i64;
    let member = |n: i64| n >= 0 && seq.is_unimodular(n as u64);
    let w = match combi_find(&member, d, r) {
        Ok(w) => w,
        Err(e @ Error::WitnessNotFound(_)) => {
            return Ok(Outcome {
                tables: vec![],
                summary: json!({ "witness": null }),
                failure: Some(e.to_string()),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let violations = recheck_witness(&w, &member);
    let mut t = Table::new("combi", &["R", "d", "c1", "c2", "x", "h", "overlap", "j_len", "k_len", "recheck_ok"]);
    t.push(vec![
        w.r.to_string(),
        fmt_f64(w.d),
        fmt_f64(w.c1),
        fmt_f64(w.c2),
        w.x.to_string(),
        w.h.to_string(),
        w.overlap.to_string(),
        w.j_len.to_string(),
        w.k_len.to_string(),
        violations.is_empty().to_string(),
    ]);
    Ok(Outcome {
        failure: (!violations.is_empty()).then(|| violations.join("; ")),
        summary: json!({ "witness": w, "violations": violations }),
        tables: vec![t],
    })
}

fn locate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let f = function(cfg)?;
    let r = *cfg.radii.last().expect("resolved");
    match locate_zeros(&f, r) {
        Ok(set) => Ok(Outcome {
            summary: json!({ "R": r, "winding_total": set.winding_total, "distinct": set.zeros.len() }),
            tables: vec![set.to_table()],
            failure: None,
        }),
        Err(e) => {
            let msg = numeric(e)?;
            Ok(Outcome {
                tables: vec![],
                summary: json!({ "R": r }),
                failure: Some(msg),
            })
        }
    }
}
