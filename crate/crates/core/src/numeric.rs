//! Arbitrary-precision complex numbers over MPFR floats.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

/// A complex number whose parts share one working precision (in bits).
///
/// Binary operations run at the larger of the two operand precisions, so
/// precision never drops silently.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        Self {
            re: Float::with_val(prec, r),
            im: Float::with_val(prec, 0),
        }
    }

    /// Both parts are rounded to the larger of their precisions.
    pub fn from_parts(re: Float, im: Float) -> Self {
        let p = re.prec().max(im.prec());
        Self {
            re: Float::with_val(p, re),
            im: Float::with_val(p, im),
        }
    }

    /// ρ·e^{2πi h/k}.
    pub fn polar_root(prec: u32, rho: &Float, h: i64, k: u64) -> Self {
        let work = prec + 16;
        let ang = Float::with_val(work, Constant::Pi) * 2u32 * h / k;
        let (s, c) = ang.sin_cos(Float::new(work));
        Self::from_parts(
            Float::with_val(prec, c * rho),
            Float::with_val(prec, s * rho),
        )
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Same value rounded to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn scale(&self, r: &Float) -> Self {
        let p = self.prec().max(r.prec());
        Self {
            re: Float::with_val(p, &self.re * r),
            im: Float::with_val(p, &self.im * r),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * r),
            im: Float::with_val(p, &self.im * r),
        }
    }

    /// Multiplicative inverse; `None` at zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.prec();
        let d = self.norm_sqr();
        Some(Self {
            re: Float::with_val(p, &self.re / &d),
            im: Float::with_val(p, -Float::with_val(p, &self.im / &d)),
        })
    }

    /// Integer power by repeated squaring; negative exponents invert.
    pub fn powi(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut m = e.unsigned_abs();
        let mut acc = Self::one(self.prec());
        let mut sq = base;
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &sq;
            }
            m >>= 1;
            if m > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    /// Argument in (−π, π].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    /// Principal-branch power z^r = exp(r·Log z) for rational r; 0^r = 0 for r > 0.
    pub fn pow_rational(&self, r: &Rational) -> Option<Self> {
        if self.is_zero() {
            return (*r > 0).then(|| Self::zero(self.prec()));
        }
        if *r.denom() == 1 {
            return self.powi(r.numer().to_i64()?);
        }
        let p = self.prec() + 16;
        let modulus = Float::with_val(p, self.abs()).pow(Float::with_val(p, r));
        let ang = Float::with_val(p, self.arg()) * Float::with_val(p, r);
        let (s, c) = ang.sin_cos(Float::new(p));
        Some(
            Self::from_parts(
                Float::with_val(p, &c * &modulus),
                Float::with_val(p, &s * &modulus),
            )
            .with_prec(self.prec()),
        )
    }

    /// Decimal rendering with `digits` significant digits per part.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = format_float(&self.re, digits);
        if self.im.is_zero() {
            return re;
        }
        let im_abs = Float::with_val(self.prec(), self.im.abs_ref());
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        if self.re.is_zero() {
            let lead = if sign == '-' { "-" } else { "" };
            return format!("{lead}{}i", format_float(&im_abs, digits));
        }
        format!("{re} {sign} {}i", format_float(&im_abs, digits))
    }

    /// Parse `re` or `re,im` decimal components.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let mut parts = s.split(',');
        let re = parts.next()?.trim();
        let im = parts.next().map(str::trim).unwrap_or("0");
        if parts.next().is_some() {
            return None;
        }
        let re = Float::parse(re).ok()?;
        let im = Float::parse(im).ok()?;
        Some(Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        })
    }
}

fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_integer() && x.clone().abs() < 1e15 {
        return x.to_integer().map(|i| i.to_string()).unwrap_or_default();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // mantissa trailing zeros carry no information
    match s.split_once('e') {
        Some((m, e)) if m.contains('.') => {
            let m = m.trim_end_matches('0').trim_end_matches('.');
            format!("{m}e{e}")
        }
        _ => s,
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize;
        f.write_str(&self.to_decimal(digits.max(1)))
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        BigComplex {
            re: ac - bd,
            im: ad + bc,
        }
    }
}

impl Div for &BigComplex {
    type Output = Option<BigComplex>;
    fn div(self, rhs: &BigComplex) -> Option<BigComplex> {
        Some(self * &rhs.inv()?)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_basics() {
        let z = BigComplex::from_f64(128, 3.0, 4.0);
        assert_eq!(z.abs_f64(), 5.0);
        let w = (&z * &z.inv().unwrap()).with_prec(64);
        assert!((w.re().to_f64() - 1.0).abs() < 1e-30 && w.im().to_f64().abs() < 1e-30);
        assert!(BigComplex::zero(64).inv().is_none());
    }

    #[test]
    fn principal_square_root() {
        let m1 = BigComplex::from_f64(128, -1.0, 0.0);
        let r = m1.pow_rational(&Rational::from((1, 2))).unwrap();
        assert!(r.re().to_f64().abs() < 1e-30);
        assert!((r.im().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn precision_is_preserved() {
        let a = BigComplex::one(64);
        let b = BigComplex::one(256);
        assert_eq!((&a + &b).prec(), 256);
    }

    #[test]
    fn rendering() {
        assert_eq!(BigComplex::one(128).to_string(), "1");
        assert_eq!(BigComplex::from_f64(64, 0.5, -2.0).to_decimal(5), "5e-1 - 2i");
        let p = BigComplex::parse("0.25,-1", 64).unwrap();
        assert_eq!(p, BigComplex::from_f64(64, 0.25, -1.0));
    }
}
