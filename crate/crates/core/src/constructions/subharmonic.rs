use num_complex::Complex64;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{gauss_legendre, MpComplex, PrecisionContext};

/// u(z) = Re z + √R Im F(√(z/R)) on the upper half of R𝔻, reflected to the lower half,
/// with F(w) = ∫₀^w e^{−αt²} dt and 5e^{2α} = √R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicExample {
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha: f64,
    #[serde(skip, default = "default_ctx")]
    ctx: PrecisionContext,
}

fn default_ctx() -> PrecisionContext {
    PrecisionContext::new(PrecisionContext::DEFAULT_BITS).expect("default precision")
}

impl SubharmonicExample {
    pub fn new(r: f64) -> Result<Self> {
        Self::with_precision(r, PrecisionContext::DEFAULT_BITS)
    }

    pub fn with_precision(r: f64, bits: u32) -> Result<Self> {
        if !(r >= 100.0 && r.is_finite()) {
            return Err(Error::domain(format!("the subharmonic example needs R ≥ 100, got {r}")));
        }
        Ok(SubharmonicExample {
            r,
            alpha: 0.5 * (r.sqrt() / 5.0).ln(),
            ctx: PrecisionContext::new(bits)?,
        })
    }

    /// Same construction with an arbitrary α > 0, for the claim checks.
    pub fn with_alpha(r: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("α must be positive, got {alpha}")));
        }
        let mut ex = Self::new(r.max(100.0))?;
        ex.r = r;
        ex.alpha = alpha;
        Ok(ex)
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }
}

/// F(w) = Σ (−α)^m w^{2m+1}/(m!(2m+1)), summed until the tail is below 2^{−p}.
pub fn f_gauss(w: &MpComplex, alpha: f64, ctx: &PrecisionContext) -> MpComplex {
    let prec = ctx.working_bits();
    let w = w.clone().with_prec(prec);
    let w2 = &w * &w;
    let x = w2.scale_f64(-alpha);
    let q = alpha * w2.abs_f64();
    let eps = ctx.epsilon();
    let mut power = w.clone();
    let mut sum = w.clone();
    let mut m = 0u32;
    loop {
        m += 1;
        power = (&power * &x).div_u32(m);
        sum += &power.div_u32(2 * m + 1);
        // remaining terms are dominated by a geometric series once q/(m+1) < 1/2
        let next = power.abs_f64() * q / (m + 1) as f64;
        if q / ((m + 1) as f64) < 0.5 && 2.0 * next <= eps * sum.abs_f64().max(f64::MIN_POSITIVE) {
            return sum;
        }
        if power.is_zero() {
            return sum;
        }
    }
}

fn f_gauss_c64(w: Complex64, ex: &SubharmonicExample) -> Complex64 {
    f_gauss(&MpComplex::from_c64(ex.ctx.working_bits(), w), ex.alpha, &ex.ctx).to_c64()
}

/// u at a point of the closed disk of radius R.
pub fn u_eval(z: Complex64, ex: &SubharmonicExample) -> Result<f64> {
    if z.norm() > ex.r * (1.0 + 1e-12) {
        return Err(Error::domain(format!("u is defined on |z| ≤ {}, got |z| = {}", ex.r, z.norm())));
    }
    let z = if z.im < 0.0 { z.conj() } else { z };
    let prec = ex.ctx.working_bits();
    let zz = MpComplex::from_c64(prec, z).scale_f64(1.0 / ex.r);
    let mut w = zz.sqrt();
    if w.im < 0 {
        w = -w;
    }
    let f = f_gauss(&w, ex.alpha, &ex.ctx);
    let sq = Float::with_val(prec, ex.r).sqrt();
    Ok(z.re + Float::with_val(prec, &f.im * &sq).to_f64())
}

/// μ_u([a, b]) = 2√R [F(√(b/R)) − F(√(a/R))].
pub fn riesz_mass(a: f64, b: f64, ex: &SubharmonicExample) -> Result<f64> {
    if !(0.0 <= a && a <= b && b <= ex.r) {
        return Err(Error::domain(format!("riesz_mass needs 0 ≤ a ≤ b ≤ R, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let prec = ex.ctx.working_bits();
    let at = |x: f64| {
        let w = Float::with_val(prec, x / ex.r).sqrt();
        f_gauss(&MpComplex::from_real(w), ex.alpha, &ex.ctx).re
    };
    let diff = at(b) - at(a);
    Ok((diff * Float::with_val(prec, ex.r).sqrt() * 2u32).to_f64())
}

/// Closed-form density e^{−αx/R}/√x of μ_u on (0, R].
pub fn riesz_density(x: f64, ex: &SubharmonicExample) -> f64 {
    (-ex.alpha * x / ex.r).exp() / x.sqrt()
}

/// Jump of ∂_y u across the segment at x, by second-order one-sided differences.
pub fn riesz_density_fd(x: f64, eps: f64, ex: &SubharmonicExample) -> Result<f64> {
    let u0 = u_eval(Complex64::new(x, 0.0), ex)?;
    let u1 = u_eval(Complex64::new(x, eps), ex)?;
    let u2 = u_eval(Complex64::new(x, 2.0 * eps), ex)?;
    // the lower side mirrors the upper, so the jump is twice the one-sided derivative
    Ok(2.0 * (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * eps))
}

/// ∫_a^b of the finite-difference density, by 32-point Gauss–Legendre on 16 panels.
pub fn riesz_mass_fd(a: f64, b: f64, ex: &SubharmonicExample) -> Result<f64> {
    if !(0.0 < a && a <= b && b <= ex.r) {
        return Err(Error::domain(format!("riesz_mass_fd needs 0 < a ≤ b ≤ R, got [{a}, {b}]")));
    }
    let rule = gauss_legendre(32, 64);
    let nodes: Vec<(f64, f64)> = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| (x.to_f64(), w.to_f64())).collect();
    let panels = 16;
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for &(x, w) in &nodes {
            let t = mid + 0.5 * width * x;
            total += 0.5 * width * w * riesz_density_fd(t, 1e-4 * t.sqrt().max(1e-3), ex)?;
        }
    }
    Ok(total)
}

/// Worst margins of the two claim inequalities on a grid of the upper unit semi-disk;
/// a margin ≥ 0 means the inequality holds there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimsReport {
    pub alpha: f64,
    pub grid_density: usize,
    pub points: usize,
    pub min_margin_a: f64,
    pub min_margin_b: f64,
    pub worst_a: [f64; 2],
    pub worst_b: [f64; 2],
}

impl ClaimsReport {
    pub fn holds(&self) -> bool {
        self.min_margin_a >= 0.0 && self.min_margin_b >= 0.0
    }
}

/// Claim A: |Im e^{−αz²}| ≤ 5e^{2α}y² + 2α|x|e^{−αx²/2}y.
/// Claim B: Im F(x+iy) ≤ 10e^{2α}y² + e^{−2α}.
pub fn claims_check(ex: &SubharmonicExample, grid_density: usize) -> Result<ClaimsReport> {
    if grid_density < 10 {
        return Err(Error::domain(format!("grid density must be at least 10, got {grid_density}")));
    }
    let n = grid_density;
    let a = ex.alpha;
    let e2a = (2.0 * a).exp();
    let rows: Vec<Vec<(f64, f64, f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let y = k as f64 / (n - 1) as f64;
            let mut row = Vec::new();
            for i in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                if x * x + y * y > 1.0 + 1e-12 {
                    continue;
                }
                let z = Complex64::new(x, y);
                let fz = (-a * z * z).exp();
                let ma = 5.0 * e2a * y * y + 2.0 * a * x.abs() * (-0.5 * a * x * x).exp() * y - fz.im.abs();
                let big_f = f_gauss_c64(z, ex);
                let mb = 10.0 * e2a * y * y + (-2.0 * a).exp() - big_f.im;
                row.push((x, y, ma, mb));
            }
            row
        })
        .collect();
    let mut rep = ClaimsReport {
        alpha: a,
        grid_density: n,
        points: 0,
        min_margin_a: f64::INFINITY,
        min_margin_b: f64::INFINITY,
        worst_a: [0.0; 2],
        worst_b: [0.0; 2],
    };
    for (x, y, ma, mb) in rows.into_iter().flatten() {
        rep.points += 1;
        if ma < rep.min_margin_a {
            rep.min_margin_a = ma;
            rep.worst_a = [x, y];
        }
        if mb < rep.min_margin_b {
            rep.min_margin_b = mb;
            rep.worst_b = [x, y];
        }
    }
    Ok(rep)
}

/// max over `n` equally spaced angles of u(re^{iθ}) − r.
pub fn max_theta_excess(r: f64, n: usize, ex: &SubharmonicExample) -> Result<f64> {
    let vals: Result<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            u_eval(Complex64::from_polar(r, th), ex)
        })
        .collect();
    Ok(vals?.into_iter().fold(f64::NEG_INFINITY, f64::max) - r)
}

/// The summary written by the subharmonic experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha: f64,
    pub max_theta_margin: f64,
    pub mass_unit_disk: f64,
    #[serde(rename = "mass_full_over_sqrtR")]
    pub mass_full_over_sqrt_r: f64,
    pub laplacian_max_abs: f64,
}

/// Item checks of the proposition: the largest θ-excess over r ∈ radii (should stay ≤ 5),
/// the two Riesz masses, and the largest |Δu| on a grid off the segment [0, R].
pub fn proposition_report(ex: &SubharmonicExample, radii: &[f64], grid: usize) -> Result<PropositionReport> {
    let mut worst = f64::NEG_INFINITY;
    for &r in radii {
        worst = worst.max(max_theta_excess(r, 720, ex)?);
    }
    Ok(PropositionReport {
        r: ex.r,
        alpha: ex.alpha,
        max_theta_margin: 5.0 - worst,
        mass_unit_disk: riesz_mass(0.0, 1.0, ex)?,
        mass_full_over_sqrt_r: riesz_mass(0.0, ex.r, ex)? / ex.r.sqrt(),
        laplacian_max_abs: laplacian_off_support(ex, grid)?,
    })
}

/// max |5-point Laplacian of u| over grid points of the disk at least R/(2·grid) away from
/// [0, R] and the circle.
pub fn laplacian_off_support(ex: &SubharmonicExample, grid: usize) -> Result<f64> {
    let step = ex.r / grid as f64;
    let h = step * 1e-3;
    let pts: Vec<Complex64> = (0..=2 * grid)
        .flat_map(|i| (0..=2 * grid).map(move |k| (i, k)))
        .map(|(i, k)| Complex64::new(-ex.r + (i as f64 + 0.5) * step, -ex.r + (k as f64 + 0.5) * step))
        .filter(|z| {
            let seg = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
            seg >= step / 2.0 && z.norm() <= ex.r - step / 2.0
        })
        .collect();
    let laps: Result<Vec<f64>> = pts
        .par_iter()
        .map(|&z| {
            let u = |dz: Complex64| u_eval(z + dz, ex);
            let c = u(Complex64::new(0.0, 0.0))?;
            let s = u(Complex64::new(h, 0.0))? + u(Complex64::new(-h, 0.0))? + u(Complex64::new(0.0, h))?
                + u(Complex64::new(0.0, -h))?;
            Ok(((s - 4.0 * c) / (h * h)).abs())
        })
        .collect();
    Ok(laps?.into_iter().fold(0.0, f64::max))
}
