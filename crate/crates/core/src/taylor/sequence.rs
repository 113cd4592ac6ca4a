use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rng;
use crate::error::{Error, Result};
use crate::mp::MpComplex;

/// Complex parameter accepted as a number, a `[re, im]` pair or `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNum(pub Complex64);

impl CNum {
    pub fn real(x: f64) -> Self {
        CNum(Complex64::new(x, 0.0))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CNumRepr {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, #[serde(default)] im: f64 },
}

impl<'de> Deserialize<'de> for CNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match CNumRepr::deserialize(d)? {
            CNumRepr::Real(x) => CNum::real(x),
            CNumRepr::Pair([re, im]) | CNumRepr::Parts { re, im } => CNum(Complex64::new(re, im)),
        })
    }
}

impl Serialize for CNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

/// Exact rational parameter. Parsed from "p/q", from decimal strings, or from JSON numbers
/// through their shortest decimal form (so 0.2 is read as 1/5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("rational parameter with zero denominator"));
        }
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ok(Ratio {
            num: s * num / g,
            den: s * den / g,
        })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::domain("non-finite rational parameter"));
        }
        format!("{x}").parse()
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("cannot read {s:?} as a rational number"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Ratio::new(p, q);
        }
        if s.contains(['e', 'E']) {
            return Err(bad());
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if frac.len() > 15 || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let mut num: i64 = digits.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        Ratio::new(num, 10i64.pow(frac.len() as u32))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::ZERO
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatioRepr {
    Int(i64),
    Num(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = match RatioRepr::deserialize(d)? {
            RatioRepr::Int(n) => Ratio::new(n, 1),
            RatioRepr::Num(x) => Ratio::from_f64(x),
            RatioRepr::Text(s) => s.parse(),
        };
        r.map_err(serde::de::Error::custom)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn one() -> CNum {
    CNum::real(1.0)
}

fn half() -> f64 {
    0.5
}

/// Declarative description of a coefficient sequence n ↦ ωₙ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// ωₙ = Θ·αⁿ, so F(z) = Θ·e^{αz}.
    Constant {
        #[serde(default = "one")]
        theta: CNum,
        #[serde(default = "one")]
        alpha: CNum,
    },
    /// ωₙ = e^{2πi(βn² + γn + δ)}.
    QuadraticPhase {
        #[serde(default)]
        beta: Ratio,
        #[serde(default)]
        gamma: Ratio,
        #[serde(default)]
        delta: Ratio,
    },
    /// ωₙ = cos √n + 2.
    CosSqrtPlus2,
    /// ωₙ = e^{2πi uₙ} with uₙ from counter-based SplitMix64.
    RandomUnimodular { seed: u64 },
    /// `base` on a periodic set of the given density (or explicit period pattern),
    /// `off_modulus · base` elsewhere.
    Masked {
        base: Box<SequenceSpec>,
        #[serde(default)]
        density: Option<f64>,
        #[serde(default)]
        pattern: Option<Vec<bool>>,
        #[serde(default = "half")]
        off_modulus: f64,
    },
    /// Finitely many coefficients; F is then a polynomial.
    Explicit { values: Vec<CNum> },
    /// ω_{2k} = (−1)^k, odd terms zero: F = cos.
    CosineOracle,
    /// ω₀ = 0, ωₙ = 1 otherwise: F = e^z − 1.
    Expm1Oracle,
}

/// Unimodular positions of a masked sequence.
#[derive(Debug, Clone, PartialEq)]
enum Mask {
    /// n is on the set iff ⌊(n+1)p/q⌋ − ⌊np/q⌋ = 1.
    Beatty { p: i64, q: i64 },
    Pattern(Vec<bool>),
}

impl Mask {
    fn contains(&self, n: u64) -> bool {
        match self {
            Mask::Beatty { p, q } => {
                let (p, q, n) = (*p as i128, *q as i128, n as i128);
                ((n + 1) * p).div_euclid(q) - (n * p).div_euclid(q) == 1
            }
            Mask::Pattern(bits) => bits[(n % bits.len() as u64) as usize],
        }
    }

    fn density(&self) -> f64 {
        match self {
            Mask::Beatty { p, q } => *p as f64 / *q as f64,
            Mask::Pattern(bits) => bits.iter().filter(|b| **b).count() as f64 / bits.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Constant { theta: Complex64, alpha: Complex64 },
    Quadratic { num: [i128; 3], den: i128 },
    CosSqrt,
    Random { seed: u64 },
    Masked { base: Box<Kind>, mask: Mask, off: f64 },
    Explicit(Vec<Complex64>),
    Cosine,
    Expm1,
}

/// A validated coefficient sequence with declared modulus bounds.
///
/// Bounds are declared as c_low·ρⁿ ≤ |ωₙ| ≤ C_high·ρⁿ (ρ = `rate`, 1 for every kind
/// except `constant` with |α| ≠ 1); `c_low = 0` means no lower bound is declared.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    spec: SequenceSpec,
    kind: Kind,
    pub c_low: f64,
    pub c_high: f64,
    pub rate: f64,
    sigma_hint: Option<f64>,
}

fn mask_from(density: Option<f64>, pattern: Option<Vec<bool>>) -> Result<Mask> {
    match (density, pattern) {
        (Some(_), Some(_)) => Err(Error::domain("masked sequence takes either density or pattern, not both")),
        (None, None) => Err(Error::domain("masked sequence needs a density or a pattern")),
        (None, Some(bits)) => {
            if bits.is_empty() {
                return Err(Error::domain("mask pattern must be non-empty"));
            }
            Ok(Mask::Pattern(bits))
        }
        (Some(d), None) => {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::domain(format!("mask density must lie in (0, 1], got {d}")));
            }
            let r = Ratio::from_f64(d)?;
            // Keep the period manageable for long decimal expansions.
            let (p, q) = if r.den > 10_000 {
                let q = 10_000i64;
                let p = (d * q as f64).round() as i64;
                let g = gcd(p, q);
                (p / g, q / g)
            } else {
                (r.num, r.den)
            };
            Ok(Mask::Beatty { p, q })
        }
    }
}

fn build(spec: &SequenceSpec) -> Result<(Kind, f64, f64, f64)> {
    Ok(match spec {
        SequenceSpec::Constant { theta, alpha } => {
            let (t, a) = (theta.0, alpha.0);
            if !(t.is_finite() && a.is_finite()) || t.norm() == 0.0 {
                return Err(Error::domain("constant sequence needs finite parameters and Θ ≠ 0"));
            }
            let rate = a.norm().max(1.0);
            let low = if a.norm() >= 1.0 { t.norm() * a.norm() / rate } else { 0.0 };
            (Kind::Constant { theta: t, alpha: a }, low.min(t.norm()), t.norm(), rate)
        }
        SequenceSpec::QuadraticPhase { beta, gamma, delta } => {
            for r in [beta, gamma, delta] {
                if r.num < 0 || r.num >= r.den {
                    return Err(Error::domain(format!("quadratic phase parameter {r} must lie in [0, 1)")));
                }
            }
            let den = lcm(lcm(beta.den, gamma.den), delta.den) as i128;
            let scale = |r: &Ratio| r.num as i128 * (den / r.den as i128);
            (
                Kind::Quadratic {
                    num: [scale(beta), scale(gamma), scale(delta)],
                    den,
                },
                1.0,
                1.0,
                1.0,
            )
        }
        SequenceSpec::CosSqrtPlus2 => (Kind::CosSqrt, 1.0, 3.0, 1.0),
        SequenceSpec::RandomUnimodular { seed } => (Kind::Random { seed: *seed }, 1.0, 1.0, 1.0),
        SequenceSpec::Masked {
            base,
            density,
            pattern,
            off_modulus,
        } => {
            let (bkind, blow, bhigh, brate) = build(base)?;
            if !(*off_modulus >= 0.0 && off_modulus.is_finite()) {
                return Err(Error::domain("off_modulus must be a non-negative real"));
            }
            let mask = mask_from(*density, pattern.clone())?;
            let high = bhigh * off_modulus.max(1.0);
            let low = blow * off_modulus.min(1.0);
            (
                Kind::Masked {
                    base: Box::new(bkind),
                    mask,
                    off: *off_modulus,
                },
                low,
                high,
                brate,
            )
        }
        SequenceSpec::Explicit { values } => {
            if values.is_empty() {
                return Err(Error::domain("explicit sequence needs at least one value"));
            }
            let vals: Vec<Complex64> = values.iter().map(|c| c.0).collect();
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("explicit sequence values must be finite"));
            }
            let high = vals.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let low = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
            (Kind::Explicit(vals), low, high, 1.0)
        }
        SequenceSpec::CosineOracle => (Kind::Cosine, 0.0, 1.0, 1.0),
        SequenceSpec::Expm1Oracle => (Kind::Expm1, 0.0, 1.0, 1.0),
    })
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

fn kind_value(kind: &Kind, n: u64, prec: u32) -> Result<MpComplex> {
    Ok(match kind {
        Kind::Constant { theta, alpha } => {
            let a = MpComplex::from_c64(prec, *alpha);
            &MpComplex::from_c64(prec, *theta) * &a.powi(n as i64)
        }
        Kind::Quadratic { num, den } => {
            let n = n as i128;
            let k = (num[0] * (n * n % den) + num[1] * (n % den) + num[2]).rem_euclid(*den);
            let pi2 = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
            let theta = pi2 * Float::with_val(prec, k as f64) / Float::with_val(prec, *den as f64);
            MpComplex::cis(&theta)
        }
        Kind::CosSqrt => {
            let r = Float::with_val(prec, n).sqrt().cos() + 2u32;
            MpComplex::from_real(r)
        }
        Kind::Random { seed } => {
            let m = rng::unit_mantissa(*seed, n);
            let pi2 = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
            let u = Float::with_val(prec, m) >> 53u32;
            MpComplex::cis(&(pi2 * u))
        }
        Kind::Masked { base, mask, off } => {
            let v = kind_value(base, n, prec)?;
            if mask.contains(n) {
                v
            } else {
                v.scale_f64(*off)
            }
        }
        Kind::Explicit(vals) => {
            let v = vals.get(n as usize).ok_or(Error::OutOfRange {
                index: n as usize,
                len: vals.len(),
            })?;
            MpComplex::from_c64(prec, *v)
        }
        Kind::Cosine => match n % 4 {
            0 => MpComplex::one(prec),
            2 => MpComplex::from_f64(prec, -1.0, 0.0),
            _ => MpComplex::zero(prec),
        },
        Kind::Expm1 => {
            if n == 0 {
                MpComplex::zero(prec)
            } else {
                MpComplex::one(prec)
            }
        }
    })
}

fn kind_unimodular(kind: &Kind, n: u64) -> bool {
    match kind {
        Kind::Constant { theta, alpha } => theta.norm() == 1.0 && (n == 0 || alpha.norm() == 1.0),
        Kind::Quadratic { .. } | Kind::Random { .. } => true,
        // cos √n = −1 would need √n to be an odd multiple of π
        Kind::CosSqrt => false,
        Kind::Masked { base, mask, off } => kind_unimodular(base, n) && (mask.contains(n) || *off == 1.0),
        Kind::Explicit(vals) => vals.get(n as usize).is_some_and(|v| (v.norm() - 1.0).abs() < 1e-15),
        Kind::Cosine => n % 2 == 0,
        Kind::Expm1 => n > 0,
    }
}

impl CoefficientSequence {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        let (kind, c_low, c_high, rate) = build(&spec)?;
        Ok(CoefficientSequence {
            spec,
            kind,
            c_low,
            c_high,
            rate,
            sigma_hint: None,
        })
    }

    pub fn constant(theta: Complex64, alpha: Complex64) -> Self {
        Self::new(SequenceSpec::Constant {
            theta: CNum(theta),
            alpha: CNum(alpha),
        })
        .expect("valid constant sequence")
    }

    /// ωₙ ≡ 1, F = e^z.
    pub fn ones() -> Self {
        Self::constant(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn quadratic_phase(beta: Ratio, gamma: Ratio, delta: Ratio) -> Result<Self> {
        Self::new(SequenceSpec::QuadraticPhase { beta, gamma, delta })
    }

    /// Quadratic phase with γ = δ = 0 and β = p/q.
    pub fn quadratic_beta(p: i64, q: i64) -> Self {
        Self::quadratic_phase(Ratio::new(p, q).unwrap(), Ratio::ZERO, Ratio::ZERO).expect("β in [0, 1)")
    }

    pub fn cos_sqrt_plus2() -> Self {
        Self::new(SequenceSpec::CosSqrtPlus2).unwrap()
    }

    pub fn random_unimodular(seed: u64) -> Self {
        Self::new(SequenceSpec::RandomUnimodular { seed }).unwrap()
    }

    pub fn cosine_oracle() -> Self {
        Self::new(SequenceSpec::CosineOracle).unwrap()
    }

    pub fn expm1_oracle() -> Self {
        Self::new(SequenceSpec::Expm1Oracle).unwrap()
    }

    /// One representative of every sequence kind, with a short label.
    pub fn catalogue() -> Vec<(&'static str, CoefficientSequence)> {
        let masked = Self::new(SequenceSpec::Masked {
            base: Box::new(SequenceSpec::RandomUnimodular { seed: 5 }),
            density: Some(0.5),
            pattern: None,
            off_modulus: 0.5,
        })
        .expect("valid masked sequence");
        vec![
            ("ones", Self::ones()),
            ("constant", Self::constant(Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0))),
            ("quadratic_1_5", Self::quadratic_beta(1, 5)),
            ("quadratic_1_3", Self::quadratic_beta(1, 3)),
            ("cos_sqrt_plus2", Self::cos_sqrt_plus2()),
            ("random_7", Self::random_unimodular(7)),
            ("masked", masked),
            ("explicit", Self::explicit(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(0.5, 0.5)]).unwrap()),
            ("cosine", Self::cosine_oracle()),
            ("expm1", Self::expm1_oracle()),
        ]
    }

    pub fn explicit(values: Vec<Complex64>) -> Result<Self> {
        Self::new(SequenceSpec::Explicit {
            values: values.into_iter().map(CNum).collect(),
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// Short tag of the sequence kind as used in configs.
    pub fn kind_name(&self) -> &'static str {
        match self.spec {
            SequenceSpec::Constant { .. } => "constant",
            SequenceSpec::QuadraticPhase { .. } => "quadratic_phase",
            SequenceSpec::CosSqrtPlus2 => "cos_sqrt_plus2",
            SequenceSpec::RandomUnimodular { .. } => "random_unimodular",
            SequenceSpec::Masked { .. } => "masked",
            SequenceSpec::Explicit { .. } => "explicit",
            SequenceSpec::CosineOracle => "cosine_oracle",
            SequenceSpec::Expm1Oracle => "expm1_oracle",
        }
    }

    /// ωₙ at `prec` bits.
    pub fn value(&self, n: u64, prec: u32) -> Result<MpComplex> {
        kind_value(&self.kind, n, prec)
    }

    pub fn value_c64(&self, n: u64) -> Result<Complex64> {
        Ok(self.value(n, 64)?.to_c64())
    }

    /// Number of coefficients for finite sequences.
    pub fn len(&self) -> Option<usize> {
        match &self.kind {
            Kind::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_unimodular(&self, n: u64) -> bool {
        kind_unimodular(&self.kind, n)
    }

    /// True when every coefficient is unimodular.
    pub fn is_unimodular_sequence(&self) -> bool {
        match &self.kind {
            Kind::Constant { theta, alpha } => theta.norm() == 1.0 && alpha.norm() == 1.0,
            Kind::Quadratic { .. } | Kind::Random { .. } => true,
            Kind::Masked { base, off, .. } => *off == 1.0 && matches!(**base, Kind::Quadratic { .. } | Kind::Random { .. }),
            _ => false,
        }
    }

    /// Declared lower density of the unimodular set, when one is known.
    pub fn density_hint(&self) -> Option<f64> {
        fn go(kind: &Kind) -> Option<f64> {
            match kind {
                Kind::Constant { theta, alpha } => Some(if theta.norm() == 1.0 && alpha.norm() == 1.0 { 1.0 } else { 0.0 }),
                Kind::Quadratic { .. } | Kind::Random { .. } | Kind::Expm1 => Some(1.0),
                Kind::CosSqrt => Some(0.0),
                Kind::Cosine => Some(0.5),
                Kind::Masked { base, mask, off } => {
                    let b = go(base)?;
                    if *off == 1.0 {
                        Some(b)
                    } else {
                        Some(mask.density().min(b))
                    }
                }
                Kind::Explicit(_) => None,
            }
        }
        go(&self.kind)
    }

    /// Declared exponential type; defaults to the coefficient growth rate.
    pub fn sigma_hint(&self) -> f64 {
        self.sigma_hint.unwrap_or(self.rate)
    }

    pub fn with_sigma_hint(mut self, sigma: f64) -> Self {
        self.sigma_hint = Some(sigma);
        self
    }

    /// Replaces every random seed in the description.
    pub fn with_seed(&self, seed: u64) -> Self {
        fn reseed(spec: &SequenceSpec, seed: u64) -> SequenceSpec {
            match spec {
                SequenceSpec::RandomUnimodular { .. } => SequenceSpec::RandomUnimodular { seed },
                SequenceSpec::Masked {
                    base,
                    density,
                    pattern,
                    off_modulus,
                } => SequenceSpec::Masked {
                    base: Box::new(reseed(base, seed)),
                    density: *density,
                    pattern: pattern.clone(),
                    off_modulus: *off_modulus,
                },
                other => other.clone(),
            }
        }
        let mut out = Self::new(reseed(&self.spec, seed)).expect("reseeding keeps a valid sequence");
        out.sigma_hint = self.sigma_hint;
        out
    }
}
