use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zeros::ZeroSet;

/// Direct terms summed before switching to Euler–Maclaurin.
const DIRECT_TERMS: u64 = 32;
const EM_ORDER: usize = 6;
/// B_{2m}/(2m)! for m = 1..=7.
const EM_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Closed-form zero family λ_k = e^{iφ}(scale·(k + shift))^{1/α}, k ≥ k0, optionally
/// together with −λ_k. Its counting function grows like t^α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFamily {
    pub alpha: f64,
    pub scale: f64,
    pub shift: f64,
    pub k0: u64,
    pub phase: f64,
    pub symmetric: bool,
}

impl ZeroFamily {
    /// ±(k + ½)π, the zeros of cos.
    pub fn cosine() -> Self {
        ZeroFamily {
            alpha: 1.0,
            scale: std::f64::consts::PI,
            shift: 0.5,
            k0: 0,
            phase: 0.0,
            symmetric: true,
        }
    }

    /// e^{iφ}k^{1/α} for k ≥ 1, so that n(t) = ⌊t^α⌋.
    pub fn power(alpha: f64, phase: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("power profile exponent must lie in (0, 1], got {alpha}")));
        }
        Ok(ZeroFamily {
            alpha,
            scale: 1.0,
            shift: 0.0,
            k0: 1,
            phase,
            symmetric: false,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0 && self.scale > 0.0 && self.k0 as f64 + self.shift > 0.0) {
            return Err(Error::domain(format!("invalid zero family {self:?}")));
        }
        Ok(())
    }

    pub fn modulus(&self, k: u64) -> f64 {
        (self.scale * (k as f64 + self.shift)).powf(1.0 / self.alpha)
    }

    fn point(&self, k: u64) -> Complex64 {
        Complex64::from_polar(self.modulus(k), self.phase)
    }

    /// First index whose modulus exceeds r.
    pub fn first_outside(&self, r: f64) -> u64 {
        let guess = (r.powf(self.alpha) / self.scale - self.shift).floor().max(self.k0 as f64) as u64;
        let mut k = guess.saturating_sub(2).max(self.k0);
        while self.modulus(k) <= r {
            k += 1;
        }
        k
    }

    fn multiplier(&self, j: u32) -> f64 {
        if self.symmetric {
            if j % 2 == 0 {
                2.0
            } else {
                0.0
            }
        } else {
            1.0
        }
    }

    /// Zeros with modulus ≤ r.
    pub fn inside(&self, r: f64) -> Vec<Complex64> {
        let end = self.first_outside(r);
        let mut out = Vec::new();
        for k in self.k0..end {
            let p = self.point(k);
            out.push(p);
            if self.symmetric {
                out.push(-p);
            }
        }
        out
    }

    /// sup_t n(t)/t, attained just at a zero modulus.
    pub fn sigma(&self) -> f64 {
        let per = if self.symmetric { 2.0 } else { 1.0 };
        let mut best = 0.0f64;
        for (i, k) in (self.k0..self.k0 + 100_000).enumerate() {
            best = best.max(per * (i + 1) as f64 / self.modulus(k));
        }
        best
    }

    /// s_j = Σ_{|λ|>r} λ^{−j} with an absolute error bar.
    pub fn power_sum(&self, r: f64, j: u32) -> (Complex64, f64) {
        let m = self.multiplier(j);
        if m == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let p = j as f64 / self.alpha;
        let start = self.first_outside(r);
        // g(x) = (scale (x + shift))^{−p}
        let g = |x: f64| (self.scale * (x + self.shift)).powf(-p);
        let mut direct = 0.0;
        for k in (start..start + DIRECT_TERMS).rev() {
            direct += g(k as f64);
        }
        let x0 = (start + DIRECT_TERMS) as f64 + self.shift;
        let cp = self.scale.powf(-p);
        let mut em = cp * x0.powf(1.0 - p) / (p - 1.0) + 0.5 * cp * x0.powf(-p);
        // g^{(2m−1)}(x) = −p(p+1)…(p+2m−2) scale^{−p} x^{−p−2m+1}
        let mut rising = p;
        let mut last = 0.0;
        for (i, c) in EM_COEFFS.iter().enumerate().take(EM_ORDER + 1) {
            let n = 2 * i + 1;
            if i > 0 {
                rising *= (p + n as f64 - 2.0) * (p + n as f64 - 1.0);
            }
            let deriv = -rising * cp * x0.powf(-p - n as f64);
            let term = -c * deriv;
            if i == EM_ORDER {
                last = term.abs();
            } else {
                em += term;
            }
        }
        let sum = direct + em;
        let phase = Complex64::from_polar(1.0, -(j as f64) * self.phase);
        let err = m * (2.0 * last + 4.0 * f64::EPSILON * sum);
        (phase * (m * sum), err)
    }
}

/// What is known about the zeros outside the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroTail {
    /// Closed-form family; its members beyond R form the tail.
    Family(ZeroFamily),
    /// Unknown beyond R apart from n(t) ≤ σ t.
    Unmodeled { sigma: f64 },
}

/// Zeros inside |λ| ≤ R and a description of the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroModel {
    #[serde(rename = "R")]
    pub r: f64,
    pub inside: Vec<Complex64>,
    pub tail: ZeroTail,
}

impl ZeroModel {
    /// Every zero of the family, split at R.
    pub fn from_family(family: ZeroFamily, r: f64) -> Result<Self> {
        family.validate()?;
        Ok(ZeroModel {
            r,
            inside: family.inside(r),
            tail: ZeroTail::Family(family),
        })
    }

    /// Explicit inside zeros with a closed-form tail.
    pub fn with_inside(inside: Vec<Complex64>, family: ZeroFamily, r: f64) -> Result<Self> {
        family.validate()?;
        check_inside(&inside, r)?;
        Ok(ZeroModel {
            r,
            inside,
            tail: ZeroTail::Family(family),
        })
    }

    /// Computed zeros (repeated by multiplicity) with an unmodeled tail.
    pub fn from_zero_set(set: &ZeroSet, sigma: f64) -> Result<Self> {
        let inside = set
            .zeros
            .iter()
            .flat_map(|z| std::iter::repeat_n(z.location, z.multiplicity as usize))
            .collect::<Vec<_>>();
        Self::unmodeled(inside, sigma, set.region_radius)
    }

    pub fn unmodeled(inside: Vec<Complex64>, sigma: f64, r: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::domain(format!("tail bound σ must be non-negative, got {sigma}")));
        }
        check_inside(&inside, r)?;
        Ok(ZeroModel {
            r,
            inside,
            tail: ZeroTail::Unmodeled { sigma },
        })
    }

    pub fn sigma(&self) -> f64 {
        match &self.tail {
            ZeroTail::Family(f) => f.sigma(),
            ZeroTail::Unmodeled { sigma } => *sigma,
        }
    }

    pub fn tail_modeled(&self) -> bool {
        matches!(self.tail, ZeroTail::Family(_))
    }
}

fn check_inside(inside: &[Complex64], r: f64) -> Result<()> {
    if let Some(z) = inside.iter().find(|z| z.norm() > r * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("zero {z} lies outside |λ| ≤ {r}")));
    }
    Ok(())
}

/// Claim-1 envelope 2σ·j/(j−1)·R^{1−j}.
pub fn claim1_envelope(sigma: f64, r: f64, j: u32) -> f64 {
    2.0 * sigma * j as f64 / (j as f64 - 1.0) * r.powi(1 - j as i32)
}

/// s_2..=s_{j_max} for the tail beyond R, each with an error bar.
pub fn power_sums(model: &ZeroModel, j_max: u32) -> Result<Vec<(Complex64, f64)>> {
    if j_max < 2 {
        return Err(Error::domain("power sums need J_max ≥ 2"));
    }
    Ok((2..=j_max)
        .map(|j| match &model.tail {
            ZeroTail::Family(f) => f.power_sum(model.r, j),
            ZeroTail::Unmodeled { sigma } => (Complex64::new(0.0, 0.0), claim1_envelope(*sigma, model.r, j)),
        })
        .collect())
}
