//! Dense univariate polynomials over Q and the cyclotomic polynomial table.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rug::Rational;

/// Polynomial with rational coefficients in ascending degree order.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(Rational::from).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_integers([1])
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![Rational::new(); n + 1];
        c[0] = Rational::from(-1);
        c[n] = Rational::from(1);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::new(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// Euclidean division: returns `(quotient, remainder)`.
    ///
    /// Panics when dividing by the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = Rational::from(divisor.coeffs[dd].recip_ref());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = Rational::from(&rem[i + dd] * &lead_inv);
            if c == 0 {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= Rational::from(&c * d);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Inverse of `self` modulo `modulus` via the extended Euclidean
    /// algorithm, or `None` when the two are not coprime.
    pub fn inverse_mod(&self, modulus: &Self) -> Option<Self> {
        // Invariant: s_i * self ≡ r_i (mod modulus).
        let (_, reduced) = self.div_rem(modulus);
        let mut r0 = modulus.clone();
        let mut r1 = reduced;
        let mut s0 = Self::zero();
        let mut s1 = Self::one();
        while !r1.is_zero() {
            let (q, r2) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let c = Rational::from(r0.coeffs[0].recip_ref());
        let (_, inv) = s0.scale(&c).div_rem(modulus);
        Some(inv)
    }

    /// Evaluate by Horner's rule at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == 1;
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Precomputed data for one conductor N.
#[derive(Debug)]
pub(crate) struct CycloData {
    pub phi: usize,
    /// Coefficients of Φ_N, ascending, monic, length φ(N) + 1.
    pub poly: Vec<i64>,
    /// `powers[e]` holds x^e mod Φ_N for 0 ≤ e < N.
    pub powers: Vec<Vec<i64>>,
}

fn table() -> &'static RwLock<HashMap<u32, Arc<CycloData>>> {
    static TABLE: OnceLock<RwLock<HashMap<u32, Arc<CycloData>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn cyclo_data(n: u32) -> Arc<CycloData> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(d) = table().read().expect("cyclotomic table poisoned").get(&n) {
        return Arc::clone(d);
    }
    let poly = integer_cyclotomic(n);
    let data = Arc::new(build_data(n, poly));
    let mut w = table().write().expect("cyclotomic table poisoned");
    Arc::clone(w.entry(n).or_insert(data))
}

/// Φ_N with integer coefficients, by dividing x^N - 1 by Φ_d for every
/// proper divisor d of N.
fn integer_cyclotomic(n: u32) -> Vec<i64> {
    let n_us = n as usize;
    let mut p = vec![0i64; n_us + 1];
    p[0] = -1;
    p[n_us] = 1;
    for d in 1..n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let phi_d = cyclo_data(d).poly.clone();
        p = exact_monic_div(&p, &phi_d);
    }
    p
}

fn exact_monic_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem: Vec<i64> = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        if c == 0 {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] = rem[i + j]
                .checked_sub(c.checked_mul(*d).expect("cyclotomic coefficient overflow"))
                .expect("cyclotomic coefficient overflow");
        }
        quot[i] = c;
    }
    debug_assert!(rem[..dd].iter().all(|&c| c == 0), "inexact division");
    quot
}

fn build_data(n: u32, poly: Vec<i64>) -> CycloData {
    let phi = poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce the degree-φ coefficient with the monic Φ_N
        let top = cur[phi - 1];
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..phi {
                cur[i] -= top * poly[i];
            }
        }
    }
    CycloData {
        phi,
        poly,
        powers,
    }
}

/// The N-th cyclotomic polynomial Φ_N.
pub fn cyclotomic_polynomial(n: u32) -> RationalPoly {
    RationalPoly::from_integers(cyclo_data(n).poly.iter().copied())
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}
