use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::{Assign, Float};

/// Extended-precision complex number backed by a pair of MPFR reals.
///
/// Binary operations produce a value at the larger of the two operand precisions.
#[derive(Clone, PartialEq)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} {:+e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i", self.re.to_f64(), self.im.to_f64())
    }
}

impl MpComplex {
    pub fn zero(prec: u32) -> Self {
        MpComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 1.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        MpComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Self::from_f64(prec, z.re, z.im)
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        MpComplex { re, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        MpComplex { re, im }
    }

    /// e^{i theta}.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        MpComplex { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
        self
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        MpComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.mul_add_mul_ref(&self.re, &self.im, &self.im))
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec().max(k.prec());
        MpComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        let p = self.prec();
        MpComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    /// Exact division by a small integer.
    pub fn div_u32(&self, k: u32) -> Self {
        let p = self.prec();
        MpComplex {
            re: Float::with_val(p, &self.re / k),
            im: Float::with_val(p, &self.im / k),
        }
    }

    pub fn recip(&self) -> Self {
        MpComplex::one(self.prec()) / self
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        let mut c = MpComplex::cis(&self.im);
        c.re *= &m;
        c.im *= &m;
        c
    }

    /// Principal logarithm, imaginary part in (-pi, pi].
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, self.norm_sqr().ln()) / 2u32;
        MpComplex { re, im: self.arg() }
    }

    /// Principal square root (non-negative real part).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return MpComplex::zero(p);
        }
        let r = self.abs();
        // t = sqrt((|z| + |re|)/2)
        let t = Float::with_val(p, &r + Float::with_val(p, self.re.abs_ref())) / 2u32;
        let t = t.sqrt();
        let half_im = Float::with_val(p, &self.im / &t) / 2u32;
        if self.re.is_sign_positive() {
            MpComplex { re: t, im: half_im }
        } else {
            let re = half_im.abs();
            let im = if self.im.is_sign_negative() { -t } else { t };
            MpComplex { re, im }
        }
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let sh = self.im.clone().sinh();
        let ch = self.im.clone().cosh();
        MpComplex {
            re: s * ch,
            im: c * sh,
        }
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(p));
        let sh = self.im.clone().sinh();
        let ch = self.im.clone().cosh();
        MpComplex {
            re: c * ch,
            im: -(s * sh),
        }
    }

    /// self^n by repeated squaring.
    pub fn powi(&self, mut n: i64) -> Self {
        let p = self.prec();
        let mut base = if n < 0 {
            n = -n;
            self.recip()
        } else {
            self.clone()
        };
        let mut acc = MpComplex::one(p);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal power self^w = exp(w log self).
    pub fn powc(&self, w: &MpComplex) -> Self {
        (&self.ln() * w).exp()
    }

    /// `self = self * z + c` without allocating; `scratch` must hold two reals.
    pub fn mul_add_assign(&mut self, z: &MpComplex, c: &MpComplex, scratch: &mut [Float; 2]) {
        let [t_re, t_im] = scratch;
        t_re.assign(self.re.mul_sub_mul_ref(&z.re, &self.im, &z.im));
        t_im.assign(self.re.mul_add_mul_ref(&z.im, &self.im, &z.re));
        std::mem::swap(&mut self.re, t_re);
        std::mem::swap(&mut self.im, t_im);
        self.re += &c.re;
        self.im += &c.im;
    }

    /// `self = self * z` in place; `scratch` must hold two reals.
    pub fn mul_assign_scratch(&mut self, z: &MpComplex, scratch: &mut [Float; 2]) {
        let [t_re, t_im] = scratch;
        t_re.assign(self.re.mul_sub_mul_ref(&z.re, &self.im, &z.im));
        t_im.assign(self.re.mul_add_mul_ref(&z.im, &self.im, &z.re));
        std::mem::swap(&mut self.re, t_re);
        std::mem::swap(&mut self.im, t_im);
    }
}

impl<'a> Add<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn add(self, rhs: &MpComplex) -> MpComplex {
        let p = self.prec().max(rhs.prec());
        MpComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn sub(self, rhs: &MpComplex) -> MpComplex {
        let p = self.prec().max(rhs.prec());
        MpComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn mul(self, rhs: &MpComplex) -> MpComplex {
        let p = self.prec().max(rhs.prec());
        MpComplex {
            re: Float::with_val(p, self.re.mul_sub_mul_ref(&rhs.re, &self.im, &rhs.im)),
            im: Float::with_val(p, self.re.mul_add_mul_ref(&rhs.im, &self.im, &rhs.re)),
        }
    }
}

impl<'a> Div<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn div(self, rhs: &MpComplex) -> MpComplex {
        let p = self.prec().max(rhs.prec());
        let d = rhs.norm_sqr();
        let re = Float::with_val(p, self.re.mul_add_mul_ref(&rhs.re, &self.im, &rhs.im));
        let im = Float::with_val(p, self.im.mul_sub_mul_ref(&rhs.re, &self.re, &rhs.im));
        MpComplex {
            re: re / &d,
            im: im / &d,
        }
    }
}

impl Div<&MpComplex> for MpComplex {
    type Output = MpComplex;
    fn div(self, rhs: &MpComplex) -> MpComplex {
        &self / rhs
    }
}

impl Mul<&MpComplex> for MpComplex {
    type Output = MpComplex;
    fn mul(self, rhs: &MpComplex) -> MpComplex {
        &self * rhs
    }
}

impl Add<&MpComplex> for MpComplex {
    type Output = MpComplex;
    fn add(mut self, rhs: &MpComplex) -> MpComplex {
        self += rhs;
        self
    }
}

impl Sub<&MpComplex> for MpComplex {
    type Output = MpComplex;
    fn sub(mut self, rhs: &MpComplex) -> MpComplex {
        self -= rhs;
        self
    }
}

impl Neg for MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&MpComplex> for MpComplex {
    fn add_assign(&mut self, rhs: &MpComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&MpComplex> for MpComplex {
    fn sub_assign(&mut self, rhs: &MpComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&MpComplex> for MpComplex {
    fn mul_assign(&mut self, rhs: &MpComplex) {
        let prod = &*self * rhs;
        *self = prod;
    }
}
