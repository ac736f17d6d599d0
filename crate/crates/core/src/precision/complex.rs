use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

/// Complex number carried as two MPFR floats of a common precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexAP {
    pub re: Float,
    pub im: Float,
}

impl ComplexAP {
    pub fn new(re: Float, im: Float) -> Self {
        ComplexAP { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexAP { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(0.0, 1.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexAP { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        ComplexAP { re, im }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_real(Float::with_val(prec, v))
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        Self::from_f64(z.re, z.im, prec)
    }

    /// Parse decimal strings exactly rounded to `prec`, e.g. ("0", "0.1").
    pub fn parse(re: &str, im: &str, prec: u32) -> crate::Result<Self> {
        let one = |s: &str| {
            Float::parse(s.trim())
                .map(|v| Float::with_val(prec, v))
                .map_err(|_| crate::Error::Parse(format!("not a decimal number: {s:?}")))
        };
        Ok(ComplexAP { re: one(re)?, im: one(im)? })
    }

    /// Real and imaginary parts as decimal strings with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (self.re.to_string_radix(10, Some(digits)), self.im.to_string_radix(10, Some(digits)))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
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
        ComplexAP { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), &self.re * &self.re);
        n += Float::with_val(self.prec(), &self.im * &self.im);
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        ComplexAP { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        let p = self.prec();
        ComplexAP { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn mul_i(&self) -> Self {
        ComplexAP { re: Float::with_val(self.prec(), -&self.im), im: self.re.clone() }
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        let re = Float::with_val(p, &self.re / &n);
        let mut im = Float::with_val(p, &self.im / &n);
        im = -im;
        ComplexAP { re, im }
    }

    /// e^z.
    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        ComplexAP { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return ComplexAP::zero(p);
        }
        let r = self.abs();
        let mut a = Float::with_val(p, &r + &self.re);
        a /= 2;
        let mut re = a.sqrt();
        if re.is_zero() {
            // negative real axis
            let mut im = Float::with_val(p, &r);
            im = im.sqrt();
            if self.im.is_sign_negative() {
                im = -im;
            }
            return ComplexAP { re: Float::new(p), im };
        }
        let mut im = Float::with_val(p, &self.im / &re);
        im /= 2;
        re.set_prec(p);
        ComplexAP { re, im }
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = ComplexAP::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexAP { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }
}

impl fmt::Display for ComplexAP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = Some(((self.prec() as f64) * 0.30103) as usize);
        let re = self.re.to_string_radix(10, digits);
        let im = self.im.to_string_radix(10, digits);
        write!(f, "({re}, {im})")
    }
}

impl<'a> Add<&'a ComplexAP> for &'a ComplexAP {
    type Output = ComplexAP;
    fn add(self, o: &ComplexAP) -> ComplexAP {
        let p = self.prec().max(o.prec());
        ComplexAP { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl<'a> Sub<&'a ComplexAP> for &'a ComplexAP {
    type Output = ComplexAP;
    fn sub(self, o: &ComplexAP) -> ComplexAP {
        let p = self.prec().max(o.prec());
        ComplexAP { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl<'a> Mul<&'a ComplexAP> for &'a ComplexAP {
    type Output = ComplexAP;
    fn mul(self, o: &ComplexAP) -> ComplexAP {
        let p = self.prec().max(o.prec());
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= Float::with_val(p, &self.im * &o.im);
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += Float::with_val(p, &self.im * &o.re);
        ComplexAP { re, im }
    }
}

impl<'a> Div<&'a ComplexAP> for &'a ComplexAP {
    type Output = ComplexAP;
    fn div(self, o: &ComplexAP) -> ComplexAP {
        self * &o.inv()
    }
}

impl Neg for &ComplexAP {
    type Output = ComplexAP;
    fn neg(self) -> ComplexAP {
        let p = self.prec();
        ComplexAP { re: Float::with_val(p, -&self.re), im: Float::with_val(p, -&self.im) }
    }
}

impl Add for ComplexAP {
    type Output = ComplexAP;
    fn add(self, o: ComplexAP) -> ComplexAP {
        &self + &o
    }
}

impl Sub for ComplexAP {
    type Output = ComplexAP;
    fn sub(self, o: ComplexAP) -> ComplexAP {
        &self - &o
    }
}

impl Mul for ComplexAP {
    type Output = ComplexAP;
    fn mul(self, o: ComplexAP) -> ComplexAP {
        &self * &o
    }
}

impl Div for ComplexAP {
    type Output = ComplexAP;
    fn div(self, o: ComplexAP) -> ComplexAP {
        &self / &o
    }
}

impl Neg for ComplexAP {
    type Output = ComplexAP;
    fn neg(self) -> ComplexAP {
        -&self
    }
}

impl AddAssign<&ComplexAP> for ComplexAP {
    fn add_assign(&mut self, o: &ComplexAP) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&ComplexAP> for ComplexAP {
    fn sub_assign(&mut self, o: &ComplexAP) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&ComplexAP> for ComplexAP {
    fn mul_assign(&mut self, o: &ComplexAP) {
        *self = &*self * o;
    }
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}
