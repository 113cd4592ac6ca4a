use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{power_sums, ZeroModel};
use crate::error::{Error, Result};
use crate::mp::MpComplex;
use crate::taylor::TaylorFunction;

pub const DEFAULT_J_MAX: u32 = 40;
pub const DEFAULT_DELTA: f64 = 0.1;

/// A tail power sum with its error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSum {
    pub j: u32,
    pub value: Complex64,
    pub error: f64,
}

/// a_R and s_j(R) for a zero model, the data of F = exp(a_R z + h_R(z))·π_R(z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadamardData {
    #[serde(rename = "R")]
    pub r: f64,
    pub a_r: Complex64,
    pub s: Vec<PowerSum>,
    pub model: ZeroModel,
    /// n(t) ≤ σt, from the model.
    pub sigma: f64,
    /// Radii above R^{1−δ} are rejected by the angular functions.
    pub delta: f64,
}

impl HadamardData {
    pub fn new(model: ZeroModel, a_r: Complex64, j_max: u32) -> Result<Self> {
        let s = power_sums(&model, j_max)?
            .into_iter()
            .zip(2..)
            .map(|((value, error), j)| PowerSum { j, value, error })
            .collect();
        Ok(HadamardData {
            r: model.r,
            a_r,
            s,
            sigma: model.sigma(),
            model,
            delta: DEFAULT_DELTA,
        })
    }

    /// Data with a_R taken from F.
    pub fn from_function(f: &TaylorFunction, model: ZeroModel, j_max: u32) -> Result<Self> {
        let a = a_r_estimate(f, &model)?;
        Self::new(model, a, j_max)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("δ must lie in (0, 1), got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn j_max(&self) -> u32 {
        self.s.last().map_or(1, |p| p.j)
    }

    pub fn tail_modeled(&self) -> bool {
        self.model.tail_modeled()
    }

    /// Bound on Σ_{j>J_max} |s_j|/j r^j from the Claim-1 envelope.
    pub fn truncation_bound(&self, r: f64) -> f64 {
        let q = r / self.r;
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let j = self.j_max();
        2.0 * self.sigma * self.r * q.powi(j as i32 + 1) / (j as f64 * (1.0 - q))
    }

    /// The same data in coordinates where a_R ≥ 0: s_j picks up e^{−ijψ}, ψ = arg a_R.
    pub fn rotated(&self) -> HadamardData {
        let psi = self.a_r.arg();
        let mut out = self.clone();
        out.a_r = Complex64::new(self.a_r.norm(), 0.0);
        for p in &mut out.s {
            p.value *= Complex64::from_polar(1.0, -(p.j as f64) * psi);
        }
        out
    }

    /// Largest radius accepted by the angular functions.
    pub fn radius_limit(&self) -> f64 {
        self.r.powf(1.0 - self.delta)
    }
}

/// h_R(z) = −Σ_{j≥2} s_j z^j/j with an error bar.
pub fn h_r_eval(z: Complex64, data: &HadamardData) -> Result<(Complex64, f64)> {
    let r = z.norm();
    if r > data.r / 2.0 {
        return Err(Error::domain(format!("h_R needs |z| ≤ R/2, got |z| = {r}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = data.truncation_bound(r);
    let mut zj = z;
    for p in &data.s {
        zj *= z;
        sum -= p.value * zj / p.j as f64;
        err += p.error * r.powi(p.j as i32) / p.j as f64;
    }
    Ok((sum, err + 8.0 * f64::EPSILON * sum.norm()))
}

/// π_R(z) = ∏_{|λ|≤R} (1 − z/λ).
pub fn pi_r_eval(z: Complex64, model: &ZeroModel) -> Complex64 {
    model.inside.iter().map(|l| 1.0 - z / l).product()
}

/// log|π_R(z)|, summed factor by factor; −∞ at an inside zero.
pub fn log_abs_pi_r(z: Complex64, model: &ZeroModel) -> f64 {
    model.inside.iter().map(|l| (1.0 - z / l).norm().ln()).sum()
}

/// a_R = F′(0)/F(0) + Σ_{|λ|≤R} 1/λ.
pub fn a_r_estimate(f: &TaylorFunction, model: &ZeroModel) -> Result<Complex64> {
    let prec = f.prec();
    let w0 = f.seq().value(0, prec)?;
    if w0.is_zero() {
        return Err(Error::domain("a_R needs F(0) ≠ 0"));
    }
    let w1 = f.seq().value(1, prec)?;
    let ratio: MpComplex = &w1 / &w0;
    Ok(ratio.to_c64() + model.inside.iter().map(|l| 1.0 / l).sum::<Complex64>())
}

/// Sample points of the factorization check: a polar grid in |z| ≤ R/4 kept 0.5 away
/// from every inside zero.
pub fn residual_grid(model: &ZeroModel, points: usize) -> Vec<Complex64> {
    let side = (points as f64).sqrt().ceil() as usize;
    let mut out = Vec::new();
    let mut radial = side;
    while out.len() < points && radial < 64 * side {
        out.clear();
        for i in 0..radial {
            let rad = (i as f64 + 0.5) / radial as f64 * model.r / 4.0;
            for k in 0..side {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / side as f64;
                let z = Complex64::from_polar(rad, th);
                if model.inside.iter().all(|l| (z - l).norm() >= 0.5) {
                    out.push(z);
                }
            }
        }
        radial += 1;
    }
    out.truncate(points);
    out
}

/// max |F(z)·e^{−a_R z − h_R(z)}/(F(0)π_R(z)) − 1| over the given points.
pub fn factorization_residual(f: &TaylorFunction, data: &HadamardData, points: &[Complex64]) -> Result<f64> {
    let prec = f.prec();
    let f0 = f.seq().value(0, prec)?.to_c64();
    if f0 == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("factorization check needs F(0) ≠ 0"));
    }
    let mut worst = 0.0f64;
    for &z in points {
        let fz = f.eval(&MpComplex::from_c64(prec, z))?.value.to_c64();
        let (h, _) = h_r_eval(z, data)?;
        let pi = pi_r_eval(z, &data.model);
        let v = fz / f0 * (-(data.a_r * z) - h).exp() / pi;
        worst = worst.max((v - 1.0).norm());
    }
    Ok(worst)
}
