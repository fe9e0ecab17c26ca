//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! A [`CycNum`] is stored in the power basis 1, ζ_N, …, ζ_N^{φ(N)-1} with an
//! integer numerator vector over one positive common denominator, always
//! reduced modulo Φ_N. Binary operations promote both operands to the lcm
//! of their conductors, so values from different fields mix freely.

mod poly;
mod text;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use rug::float::Constant;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::BigComplex;
pub(crate) use poly::{gcd_u64, lcm_u64};
pub use poly::{cyclotomic_polynomial, euler_phi, RationalPoly};
pub use text::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),
    #[error("conductor {from} does not divide {to}")]
    ConductorMismatch { from: u32, to: u32 },
    #[error("root of unity order must be positive")]
    ZeroOrder,
}

/// The root of unity ζ_k^h with gcd(h, k) = 1 and 0 ≤ h < k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedRoot {
    h: u64,
    k: u64,
}

/// Normalize h/k to lowest terms with the numerator in [0, k).
///
/// Panics if `k == 0`; callers parsing user input reject that first.
pub fn reduce_fraction(h: i64, k: u64) -> ReducedRoot {
    assert!(k >= 1, "root of unity order must be positive");
    let g = gcd_u64(h.unsigned_abs(), k);
    let k2 = k / g;
    let h2 = (h / g as i64).rem_euclid(k2 as i64) as u64;
    // gcd(0, 1) = 1 covers the trivial root
    ReducedRoot { h: h2, k: k2 }
}

impl ReducedRoot {
    pub fn new(h: i64, k: u64) -> Result<Self, CycError> {
        if k == 0 {
            return Err(CycError::ZeroOrder);
        }
        Ok(reduce_fraction(h, k))
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Order of the root.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// ζ_k^{h m}, reduced.
    pub fn pow(&self, m: i64) -> ReducedRoot {
        let e = (self.h as i128 * m as i128).rem_euclid(self.k as i128) as i64;
        reduce_fraction(e, self.k)
    }

    /// The root -ζ_k^h, reduced (order 2k for odd k, k for even k).
    pub fn negate(&self) -> ReducedRoot {
        if self.k.is_multiple_of(2) {
            reduce_fraction((self.h + self.k / 2) as i64, self.k)
        } else {
            reduce_fraction((2 * self.h + self.k) as i64, 2 * self.k)
        }
    }

    /// All reduced roots of order `k`, sorted by numerator.
    pub fn all_of_order(k: u64) -> Vec<ReducedRoot> {
        (0..k)
            .filter(|&h| gcd_u64(h, k) == 1)
            .map(|h| ReducedRoot { h, k })
            .collect()
    }
}

impl fmt::Display for ReducedRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.h, self.k)
    }
}

/// An exact element of Q(ζ_N).
#[derive(Clone, Debug)]
pub struct CycNum {
    n: u32,
    num: Vec<Integer>,
    den: Integer,
}

impl CycNum {
    fn from_parts(n: u32, mut num: Vec<Integer>, mut den: Integer) -> Self {
        debug_assert_eq!(num.len(), poly::cyclo_data(n).phi);
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g == 1 {
                break;
            }
            g.gcd_mut(c);
        }
        if num.iter().all(|c| *c == 0) {
            den = Integer::from(1);
        } else if g != 1 {
            for c in num.iter_mut() {
                c.div_exact_mut(&g);
            }
            den.div_exact_mut(&g);
        }
        Self { n, num, den }
    }

    pub fn zero(n: u32) -> Self {
        let phi = poly::cyclo_data(n).phi;
        Self {
            n,
            num: vec![Integer::new(); phi],
            den: Integer::from(1),
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rational(&Rational::from(1), n)
    }

    pub fn from_rational(r: &Rational, n: u32) -> Self {
        let phi = poly::cyclo_data(n).phi;
        let mut num = vec![Integer::new(); phi];
        num[0] = r.numer().clone();
        Self::from_parts(n, num, r.denom().clone())
    }

    pub fn from_int(v: i64, n: u32) -> Self {
        Self::from_rational(&Rational::from(v), n)
    }

    /// ζ_n^e for any integer exponent.
    pub fn zeta(e: i64, n: u32) -> Self {
        let data = poly::cyclo_data(n);
        let idx = e.rem_euclid(n as i64) as usize;
        let num = data.powers[idx].iter().map(|&c| Integer::from(c)).collect();
        Self {
            n,
            num,
            den: Integer::from(1),
        }
    }

    /// ζ_k^h at conductor k.
    pub fn from_root(r: &ReducedRoot) -> Self {
        Self::zeta(r.h as i64, r.k as u32)
    }

    /// The exact value -ζ_k^h: conductor k for even k, 2k for odd k.
    pub fn negate_root(r: &ReducedRoot) -> Self {
        Self::from_root(&r.negate())
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    /// Coordinates in the power basis at the stored conductor.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::from((c.clone(), self.den.clone())))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(|c| *c == 0)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| Rational::from((self.num[0].clone(), self.den.clone())))
    }

    /// Same value at conductor `m`, a multiple of the current conductor.
    pub fn coerce(&self, m: u32) -> Result<Self, CycError> {
        if m == self.n {
            return Ok(self.clone());
        }
        if m == 0 || !m.is_multiple_of(self.n) {
            return Err(CycError::ConductorMismatch { from: self.n, to: m });
        }
        let step = (m / self.n) as usize;
        let data = poly::cyclo_data(m);
        let mut acc = vec![Integer::new(); data.phi];
        for (j, c) in self.num.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let row = &data.powers[(j * step) % m as usize];
            for (a, &r) in acc.iter_mut().zip(row) {
                if r != 0 {
                    *a += Integer::from(c * r);
                }
            }
        }
        Ok(Self::from_parts(m, acc, self.den.clone()))
    }

    fn promote(a: &Self, b: &Self) -> (Self, Self) {
        let m = lcm_u64(a.n as u64, b.n as u64) as u32;
        (
            a.coerce(m).expect("lcm is a common multiple"),
            b.coerce(m).expect("lcm is a common multiple"),
        )
    }

    fn add_same(&self, other: &Self, negate_other: bool) -> Self {
        debug_assert_eq!(self.n, other.n);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| {
                let x = Integer::from(a * &other.den);
                let y = Integer::from(b * &self.den);
                if negate_other {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        Self::from_parts(self.n, num, Integer::from(&self.den * &other.den))
    }

    fn mul_same(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let data = poly::cyclo_data(self.n);
        let phi = data.phi;
        let mut prod = vec![Integer::new(); 2 * phi - 1];
        for (i, a) in self.num.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if *b != 0 {
                    prod[i + j] += a * b;
                }
            }
        }
        let n = self.n as usize;
        let (low, high) = prod.split_at_mut(phi);
        for (off, c) in high.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let row = &data.powers[(phi + off) % n];
            for (a, &r) in low.iter_mut().zip(row) {
                if r != 0 {
                    *a += Integer::from(c * r);
                }
            }
        }
        prod.truncate(phi);
        Self::from_parts(self.n, prod, Integer::from(&self.den * &other.den))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let num = self.num.iter().map(|c| Integer::from(c * r.numer())).collect();
        Self::from_parts(self.n, num, Integer::from(&self.den * r.denom()))
    }

    /// Multiplicative inverse, computed by the extended Euclidean algorithm
    /// against Φ_N.
    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero(self.n));
        }
        if let Some(r) = self.to_rational() {
            return Ok(Self::from_rational(&r.recip(), self.n));
        }
        let key = (self.n, self.num.clone(), self.den.clone());
        if let Some(hit) = inverse_cache().read().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let p = RationalPoly::new(self.coeffs());
        let inv = p
            .inverse_mod(&cyclotomic_polynomial(self.n))
            .ok_or(CycError::DivisionByZero(self.n))?;
        let phi = poly::cyclo_data(self.n).phi;
        let mut coeffs = inv.coeffs().to_vec();
        coeffs.resize(phi, Rational::new());
        let out = Self::from_rational_coeffs(self.n, &coeffs);
        let mut cache = inverse_cache().write().expect("cache poisoned");
        if cache.len() > INVERSE_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, out.clone());
        Ok(out)
    }

    /// Image of Σ v_i x^i ∈ Z[x]/(x^n − 1) under x ↦ ζ_n, divided by `den`.
    pub(crate) fn from_cyclic(n: u32, v: &[Integer], den: Integer) -> Self {
        let data = poly::cyclo_data(n);
        debug_assert_eq!(v.len(), n as usize);
        let mut acc: Vec<Integer> = v[..data.phi].to_vec();
        for (i, c) in v.iter().enumerate().skip(data.phi) {
            if *c == 0 {
                continue;
            }
            for (a, &r) in acc.iter_mut().zip(&data.powers[i]) {
                if r != 0 {
                    *a += Integer::from(c * r);
                }
            }
        }
        Self::from_parts(n, acc, den)
    }

    /// Build from power-basis coordinates at conductor `n`.
    pub fn from_rational_coeffs(n: u32, coeffs: &[Rational]) -> Self {
        let phi = poly::cyclo_data(n).phi;
        assert_eq!(coeffs.len(), phi, "expected φ({n}) = {phi} coordinates");
        let mut den = Integer::from(1);
        for c in coeffs {
            den.lcm_mut(c.denom());
        }
        let num = coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&den / c.denom()))
            .collect();
        Self::from_parts(n, num, den)
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self, CycError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut m = e.unsigned_abs();
        let mut acc = Self::one(self.n);
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
        Ok(acc)
    }

    /// The automorphism ζ_N ↦ ζ_N^j (j coprime to N).
    pub fn galois(&self, j: i64) -> Self {
        let data = poly::cyclo_data(self.n);
        let n = self.n as i64;
        let mut acc = vec![Integer::new(); data.phi];
        for (i, c) in self.num.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let row = &data.powers[(i as i64 * j).rem_euclid(n) as usize];
            for (a, &r) in acc.iter_mut().zip(row) {
                if r != 0 {
                    *a += Integer::from(c * r);
                }
            }
        }
        Self::from_parts(self.n, acc, self.den.clone())
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// |a|², an element of the maximal real subfield.
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    /// Numeric image under ζ_N ↦ e^{2πi/N}.
    ///
    /// Terms are accumulated with `EMBED_GUARD_BITS` extra bits, so the
    /// result is within 2^{-precision+4} of the true value relative to the
    /// coefficient mass Σ|c_j|.
    pub fn embed(&self, precision: u32) -> BigComplex {
        let work = precision + EMBED_GUARD_BITS;
        let trig = trig_table(self.n, work);
        let mut re = Float::with_val(work, 0);
        let mut im = Float::with_val(work, 0);
        for (c, (cs, sn)) in self.num.iter().zip(trig.iter()) {
            if *c == 0 {
                continue;
            }
            re += Float::with_val(work, cs * c);
            im += Float::with_val(work, sn * c);
        }
        re /= &self.den;
        im /= &self.den;
        BigComplex::from_parts(Float::with_val(precision, re), Float::with_val(precision, im))
    }

    /// Quick double-precision embedding for diagnostics.
    pub fn embed_f64(&self) -> (f64, f64) {
        let z = self.embed(64);
        (z.re().to_f64(), z.im().to_f64())
    }

    /// Smallest conductor d | N with the value in Q(ζ_d), and the value there.
    pub fn minimal(&self) -> Self {
        if let Some(r) = self.to_rational() {
            return Self::from_rational(&r, 1);
        }
        let n = self.n;
        for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
            // Q(ζ_d) = Q(ζ_{2d}) for odd d; representation at odd d is preferred
            if let Some(v) = self.descend(d) {
                return v;
            }
        }
        self.clone()
    }

    /// Coordinates at conductor d if the value lies in Q(ζ_d).
    fn descend(&self, d: u32) -> Option<Self> {
        let n = self.n as u64;
        // fixed by every σ_j with j ≡ 1 (mod d)
        for j in (1..n).filter(|&j| j % d as u64 == 1 && gcd_u64(j, n) == 1) {
            if self.galois(j as i64) != *self {
                return None;
            }
        }
        let phi_d = poly::cyclo_data(d).phi;
        let basis: Vec<Vec<Rational>> = (0..phi_d)
            .map(|i| Self::zeta(i as i64, d).coerce(self.n).unwrap().coeffs())
            .collect();
        let sol = solve_in_span(&basis, &self.coeffs())?;
        Some(Self::from_rational_coeffs(d, &sol))
    }

    /// Serialized canonical form `{N, ["c0", "c1", ...]}`.
    pub fn to_canonical(&self) -> String {
        let cs: Vec<String> = self
            .coeffs()
            .iter()
            .map(|c| format!("\"{c}\""))
            .collect();
        format!("{{{}, [{}]}}", self.n, cs.join(", "))
    }

    /// Inverse of [`CycNum::to_canonical`].
    pub fn from_canonical(s: &str) -> Result<Self, ParseError> {
        text::parse_canonical(s)
    }
}

const EMBED_GUARD_BITS: u32 = 32;
const INVERSE_CACHE_LIMIT: usize = 1 << 16;

type InverseKey = (u32, Vec<Integer>, Integer);

fn inverse_cache() -> &'static RwLock<HashMap<InverseKey, CycNum>> {
    static CACHE: OnceLock<RwLock<HashMap<InverseKey, CycNum>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

type TrigTable = Arc<Vec<(Float, Float)>>;

fn trig_table(n: u32, prec: u32) -> TrigTable {
    static TABLE: OnceLock<RwLock<HashMap<(u32, u32), TrigTable>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = table.read().expect("trig table poisoned").get(&(n, prec)) {
        return Arc::clone(t);
    }
    let phi = poly::cyclo_data(n).phi;
    let two_pi = Float::with_val(prec + 16, Constant::Pi) * 2u32;
    let rows: Vec<(Float, Float)> = (0..phi)
        .map(|j| {
            let ang = Float::with_val(prec + 16, &two_pi * j as u32) / n;
            let (s, c) = ang.sin_cos(Float::new(prec + 16));
            (Float::with_val(prec, c), Float::with_val(prec, s))
        })
        .collect();
    let rows = Arc::new(rows);
    table
        .write()
        .expect("trig table poisoned")
        .insert((n, prec), Arc::clone(&rows));
    rows
}

/// Solve Σ x_i basis[i] = target over Q; `None` when target is not in the span.
fn solve_in_span(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let cols = basis.len();
    // augmented matrix, one row per coordinate
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::from(m[r][c].recip_ref());
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = Rational::from(&f * &m[r][j]);
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| row[cols] != 0) {
        return None;
    }
    let mut sol = vec![Rational::new(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = m[i][cols].clone();
    }
    Some(sol)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b) = Self::promote(self, other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for CycNum {}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        if self.n == rhs.n {
            return self.add_same(rhs, false);
        }
        let (a, b) = CycNum::promote(self, rhs);
        a.add_same(&b, false)
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        if self.n == rhs.n {
            return self.add_same(rhs, true);
        }
        let (a, b) = CycNum::promote(self, rhs);
        a.add_same(&b, true)
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        if self.n == rhs.n {
            return self.mul_same(rhs);
        }
        let (a, b) = CycNum::promote(self, rhs);
        a.mul_same(&b)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            n: self.n,
            num: self.num.iter().map(|c| Integer::from(-c)).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    /// Textual syntax, e.g. `1/2 - 1/3*zeta(1,8) + zeta(1,8)^3`, printed at
    /// the minimal conductor.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_value(&self.minimal()))
    }
}

impl std::str::FromStr for CycNum {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(e: i64, n: u32) -> CycNum {
        CycNum::zeta(e, n)
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn reduce_fraction_examples() {
        assert_eq!(reduce_fraction(2, 4), ReducedRoot { h: 1, k: 2 });
        assert_eq!(reduce_fraction(3, 7), ReducedRoot { h: 3, k: 7 });
        assert_eq!(reduce_fraction(-1, 4), ReducedRoot { h: 3, k: 4 });
        assert_eq!(reduce_fraction(0, 5), ReducedRoot { h: 0, k: 1 });
        assert_eq!(ReducedRoot::new(1, 0), Err(CycError::ZeroOrder));
    }

    #[test]
    fn invert_zeta4() {
        assert_eq!(z(1, 4).inv().unwrap(), -&z(1, 4));
        assert_eq!(CycNum::zero(4).inv(), Err(CycError::DivisionByZero(4)));
    }

    #[test]
    fn norm_of_one_minus_zeta3() {
        let one = CycNum::one(3);
        let a = &one - &z(1, 3);
        let b = &one - &z(2, 3);
        assert_eq!(&a * &b, CycNum::from_int(3, 3));
        assert_eq!((&a * &b).to_rational(), Some(Rational::from(3)));
    }

    #[test]
    fn additive_identity() {
        let a = &CycNum::from_rational(&q(1, 3), 12) + &z(5, 12);
        assert_eq!(&a + &CycNum::zero(1), a);
    }

    #[test]
    fn coerce_examples() {
        assert_eq!(z(1, 2).coerce(4).unwrap(), z(2, 4));
        let third = CycNum::from_rational(&q(1, 3), 1).coerce(10).unwrap();
        assert_eq!(third.coeffs()[0], q(1, 3));
        assert!(third.coeffs()[1..].iter().all(|c| *c == 0));
        let c = z(1, 3).coerce(12).unwrap();
        assert_eq!(c, z(4, 12));
        let (a, b) = (c.embed_f64(), z(1, 3).embed_f64());
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        assert_eq!(
            z(1, 3).coerce(8),
            Err(CycError::ConductorMismatch { from: 3, to: 8 })
        );
    }

    #[test]
    fn negate_root_examples() {
        let one = ReducedRoot::new(1, 1).unwrap();
        let v = CycNum::negate_root(&one);
        assert_eq!(v.conductor(), 2);
        assert_eq!(v.to_rational(), Some(Rational::from(-1)));
        let r4 = ReducedRoot::new(1, 4).unwrap();
        assert_eq!(CycNum::negate_root(&r4), z(3, 4));
        let r3 = ReducedRoot::new(1, 3).unwrap();
        let v3 = CycNum::negate_root(&r3);
        assert_eq!(v3, z(5, 6));
        // -e^{2πi/3} = e^{2πi·5/6}
        let (re, im) = v3.embed_f64();
        let ang = 2.0 * std::f64::consts::PI / 3.0;
        assert!((re + ang.cos()).abs() < 1e-15 && (im + ang.sin()).abs() < 1e-15);
    }

    #[test]
    fn embed_examples() {
        let (re, im) = z(1, 4).embed_f64();
        assert!(re.abs() < 1e-18 && (im - 1.0).abs() < 1e-18);
        let (re, _) = CycNum::from_rational(&q(1, 3), 1).embed_f64();
        assert!((re - 1.0 / 3.0).abs() < 1e-16);
        let a = &CycNum::one(3) - &z(1, 3);
        let v = a.embed(128);
        let expect_im = Float::with_val(128, 3).sqrt() / 2u32;
        assert!((Float::with_val(128, v.re() - 1.5)).abs() < 1e-35);
        assert!((Float::with_val(128, v.im() + &expect_im)).abs() < 1e-35);
    }

    #[test]
    fn primitivity_of_roots() {
        for k in 1..=40u64 {
            for r in ReducedRoot::all_of_order(k) {
                let x = CycNum::from_root(&r);
                let mut p = CycNum::one(k as u32);
                for j in 1..=k {
                    p = &p * &x;
                    assert_eq!(p == CycNum::one(1), j == k, "root {r}, power {j}");
                }
            }
        }
    }

    #[test]
    fn phi_n_vanishes_at_zeta_n() {
        for n in 1..=200u32 {
            let p = cyclotomic_polynomial(n);
            let x = z(1, n);
            let mut acc = CycNum::zero(n);
            for c in p.coeffs().iter().rev() {
                acc = &(&acc * &x) + &CycNum::from_rational(c, n);
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn minimal_conductor() {
        let v = z(4, 12).minimal();
        assert_eq!(v.conductor(), 3);
        assert_eq!(v, z(1, 3));
        // i + 1/2 lives in Q(ζ_4)
        let w = &z(3, 12) + &CycNum::from_rational(&q(1, 2), 12);
        assert_eq!(w.minimal().conductor(), 4);
        // √2 = ζ_8 + ζ_8^7 lives in Q(ζ_8) only
        let s2 = &z(1, 8) + &z(7, 8);
        assert_eq!(s2.coerce(24).unwrap().minimal().conductor(), 8);
    }

    #[test]
    fn canonical_round_trip() {
        let v = &z(1, 8).scale(&q(-2, 7)) + &CycNum::from_rational(&q(5, 3), 8);
        let s = v.to_canonical();
        assert_eq!(s, "{8, [\"5/3\", \"-2/7\", \"0\", \"0\"]}");
        assert_eq!(CycNum::from_canonical(&s).unwrap(), v);
    }
}
