use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::data::{log_abs_pi_r, HadamardData};
use super::model::ZeroModel;
use crate::error::{Error, Result};
use crate::table::{fmt_f64, Table};

const NEWTON_STEPS: usize = 100;

fn check_radius(r: f64, data: &HadamardData) -> Result<()> {
    let limit = data.radius_limit();
    if !(r > 0.0 && r <= limit * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("radius {r} outside (0, R^(1−δ)] = (0, {limit}]")));
    }
    Ok(())
}

/// S(θ) = a_R r cos θ − Σ |s_j|/j r^j cos(jθ + θ_j), in coordinates where a_R ≥ 0.
pub fn s_theta(r: f64, theta: f64, data: &HadamardData) -> Result<f64> {
    if theta.abs() > std::f64::consts::PI * (1.0 + 1e-12) {
        return Err(Error::domain(format!("θ must lie in [−π, π], got {theta}")));
    }
    if r > data.r / 2.0 {
        return Err(Error::domain(format!("S needs r ≤ R/2, got {r}")));
    }
    let d = data.rotated();
    Ok(s_rotated(r, theta, &d))
}

fn s_rotated(r: f64, theta: f64, d: &HadamardData) -> f64 {
    let mut v = d.a_r.re * r * theta.cos();
    for p in &d.s {
        let j = p.j as f64;
        v -= p.value.norm() / j * r.powi(p.j as i32) * (j * theta + p.value.arg()).cos();
    }
    v
}

/// Φ(θ) = a_R sin θ − Σ |s_j| r^{j−1} sin(jθ + θ_j) and Φ′(θ); S′ = −rΦ.
fn phi_pair(r: f64, theta: f64, d: &HadamardData) -> (f64, f64) {
    let mut v = d.a_r.re * theta.sin();
    let mut dv = d.a_r.re * theta.cos();
    for p in &d.s {
        let j = p.j as f64;
        let m = p.value.norm() * r.powi(p.j as i32 - 1);
        let a = j * theta + p.value.arg();
        v -= m * a.sin();
        dv -= j * m * a.cos();
    }
    (v, dv)
}

/// The maximizer of S near 0, by Newton from θ = 0.
pub fn theta_star(r: f64, data: &HadamardData) -> Result<f64> {
    check_radius(r, data)?;
    let d = data.rotated();
    if d.a_r.re <= 0.0 {
        return Err(Error::domain("θ* needs a_R ≠ 0"));
    }
    let mut theta = 0.0f64;
    for _ in 0..NEWTON_STEPS {
        let (v, dv) = phi_pair(r, theta, &d);
        if dv <= 0.0 {
            return Err(Error::convergence(
                format!("θ* at r = {r}: S″ ≥ 0"),
                format!("{theta}"),
                v.abs(),
            ));
        }
        let step = v / dv;
        theta -= step;
        if theta.abs() > std::f64::consts::FRAC_PI_4 {
            return Err(Error::convergence(format!("θ* at r = {r} left |θ| ≤ π/4"), format!("{theta}"), step.abs()));
        }
        if step.abs() <= 64.0 * f64::EPSILON * theta.abs().max(1.0) {
            let (_, dv) = phi_pair(r, theta, &d);
            if dv <= 0.0 {
                return Err(Error::Consistency(format!("S″(θ*) ≥ 0 at r = {r}")));
            }
            return Ok(theta);
        }
    }
    let (v, _) = phi_pair(r, theta, &d);
    Err(Error::convergence(format!("θ* at r = {r}"), format!("{theta}"), v.abs()))
}

/// g_R(r) = S(θ*) − r, the excess of max_{|z|=r} Re[a_R z + h_R(z)] over r, with error bar.
pub fn g_r_eval(r: f64, data: &HadamardData) -> Result<(f64, f64)> {
    let theta = theta_star(r, data)?;
    let d = data.rotated();
    let mut err = d.truncation_bound(r);
    for p in &d.s {
        err += p.error * r.powi(p.j as i32) / p.j as f64;
    }
    Ok((s_rotated(r, theta, &d) - r, err))
}

/// One row of a g_R profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub r: f64,
    pub theta_star: f64,
    pub g_r: f64,
    pub error: f64,
}

pub fn g_r_profile(data: &HadamardData, radii: &[f64]) -> Result<Vec<ProfilePoint>> {
    radii
        .iter()
        .map(|&r| {
            let theta = theta_star(r, data)?;
            let (g, error) = g_r_eval(r, data)?;
            Ok(ProfilePoint {
                r,
                theta_star: theta,
                g_r: g,
                error,
            })
        })
        .collect()
}

pub fn profile_table(points: &[ProfilePoint], tail_modeled: bool) -> Table {
    let mut t = Table::new("hadamard_profile", &["r", "theta_star", "g_R", "error_bar", "tail"]);
    let tag = if tail_modeled { "modeled" } else { "tail-unmodeled" };
    for p in points {
        t.push(vec![fmt_f64(p.r), fmt_f64(p.theta_star), fmt_f64(p.g_r), fmt_f64(p.error), tag.to_string()]);
    }
    t
}

/// Harmonic measure of the circular part of the boundary of the unit disk slit along [0, 1].
pub fn harmonic_measure_slit(zeta: Complex64) -> Result<f64> {
    if zeta.norm() > 1.0 + 1e-12 || !zeta.is_finite() {
        return Err(Error::domain(format!("ζ = {zeta} lies outside the closed unit disk")));
    }
    if zeta == Complex64::new(1.0, 0.0) {
        return Err(Error::domain("harmonic measure is undefined at ζ = 1"));
    }
    let mut w = zeta.sqrt();
    if w.im < 0.0 {
        w = -w;
    }
    let q = (1.0 + w) / (1.0 - w);
    Ok((2.0 / std::f64::consts::PI * q.im.atan2(q.re)).clamp(0.0, 1.0))
}

/// η r^μ cos μ(π − |θ|), harmonic off the positive ray.
pub fn killing_term(z: Complex64, eta: f64, mu: f64) -> f64 {
    let (r, theta) = z.to_polar();
    eta * r.powf(mu) * (mu * (std::f64::consts::PI - theta.abs())).cos()
}

/// v_R(z) = log|π_R(z)| − η r^μ cos μ(π − |θ|); −∞ exactly at an inside zero.
pub fn v_r_eval(z: Complex64, eta: f64, mu: f64, model: &ZeroModel) -> Result<f64> {
    if !(eta > 0.0) || !(mu > 0.0 && mu < 0.5) {
        return Err(Error::domain(format!("v_R needs η > 0 and μ ∈ (0, ½), got η = {eta}, μ = {mu}")));
    }
    Ok(log_abs_pi_r(z, model) - killing_term(z, eta, mu))
}

/// v_R on the circle |z| = radius at `n` equally spaced angles in (−π, π].
pub fn v_r_boundary_scan(radius: f64, n: usize, eta: f64, mu: f64, model: &ZeroModel) -> Result<Table> {
    let mut t = Table::new("v_R_scan", &["theta", "r", "v_R"]);
    for k in 0..n {
        let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k as f64 + 1.0) / n as f64;
        let v = v_r_eval(Complex64::from_polar(radius, theta), eta, mu, model)?;
        t.push(vec![fmt_f64(theta), fmt_f64(radius), fmt_f64(v)]);
    }
    Ok(t)
}
