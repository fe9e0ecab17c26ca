//! Certified numeric evaluation inside the unit disk.
//!
//! Every routine sums until a proven geometric tail bound drops below a
//! quarter of the requested tolerance, and reports `TolUnreachable` when the
//! accumulated rounding error at the working precision (the precision of the
//! argument) could exceed the tolerance. Tolerances are handled as base-2
//! logarithms internally and magnitudes as MPFR floats, so neither tiny
//! tolerances nor huge intermediate terms near the boundary over- or
//! underflow.

use std::collections::HashMap;

use rug::{Float, Rational};

use super::generator::{generator, Generator, Lp};
use super::{ArgTransform, QError, SeriesId, TransformKind};
use crate::numeric::BigComplex;

/// Distance from the unit circle below which numeric evaluation is refused.
pub const DISK_MARGIN: f64 = 1e-6;

/// Ceiling for automatic precision escalation, in bits.
pub const MAX_PREC: u32 = 1 << 20;

const MAX_TERMS: usize = 5_000_000;

/// Low-precision modulus (exponent range is unbounded, unlike f64).
pub(crate) fn mag(z: &BigComplex) -> Float {
    let re = Float::with_val(64, z.re());
    let im = Float::with_val(64, z.im());
    re.hypot(&im)
}

/// log2 of a nonnegative float, −∞ for zero.
pub(crate) fn lg(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(64, x.log2_ref()).to_f64()
    }
}

/// log2 of a tolerance given as f64.
pub(crate) fn tol_lg(tol: f64) -> f64 {
    tol.log2()
}

fn check_disk(q: &BigComplex) -> Result<f64, QError> {
    let r = q.abs_f64();
    if !(r < 1.0 - DISK_MARGIN) {
        return Err(QError::OutsideDisk {
            margin: DISK_MARGIN,
        });
    }
    Ok(r)
}

fn unreachable(tol_lg: f64, prec: u32, needed: f64) -> QError {
    QError::TolUnreachable {
        tol: tol_lg.exp2(),
        prec,
        needed: needed.ceil().min(u32::MAX as f64) as u32,
    }
}

/// Fails when `terms` rounding steps on a sum of absolute mass `mass` could
/// exceed half the tolerance; the error names the precision that would do.
fn check_rounding(mass: &Float, terms: usize, prec: u32, tol_lg: f64) -> Result<(), QError> {
    let need = lg(mass) + (terms as f64 + 16.0).log2() + 5.0 - tol_lg;
    if need > prec as f64 {
        return Err(unreachable(tol_lg, prec, need + 8.0));
    }
    Ok(())
}

/// A computed denominator factor counts as a pole when it is zero to within
/// the working precision.
pub(crate) fn vanishes(d: &BigComplex) -> bool {
    d.is_zero() || lg(&mag(d)) < 8.0 - d.prec() as f64
}

/// log2(1 − 2^x) for x < 0.
fn lg_one_minus(x_lg: f64) -> f64 {
    (-x_lg.exp2()).ln_1p() / std::f64::consts::LN_2
}

/// Retries `f` at increasing precision while it reports `TolUnreachable`.
pub(crate) fn escalate<T>(
    start: u32,
    mut f: impl FnMut(u32) -> Result<T, QError>,
) -> Result<T, QError> {
    let mut prec = start.max(64);
    loop {
        match f(prec) {
            Err(QError::TolUnreachable { needed, .. }) if prec < MAX_PREC => {
                prec = needed.max(prec + 32).min(MAX_PREC);
            }
            other => return other,
        }
    }
}

/// Evaluates to `bits` bits of relative accuracy, where `f(prec, tol_lg)`
/// computes the value at working precision `prec` to absolute tolerance
/// 2^tol_lg. The magnitude of the value is learned on the fly.
pub(crate) fn relative(
    bits: u32,
    start: u32,
    mut f: impl FnMut(u32, f64) -> Result<BigComplex, QError>,
) -> Result<BigComplex, QError> {
    let mut guess = 0.0f64;
    let mut prec = start;
    loop {
        let v = escalate(prec, |p| f(p, guess - bits as f64))?;
        prec = prec.max(v.prec());
        let m = lg(&mag(&v));
        if m >= guess {
            return Ok(v);
        }
        if m > guess - bits as f64 + 8.0 {
            // a few significant bits: the magnitude is known
            guess = m.floor() - 4.0;
        } else {
            // indistinguishable from zero at this tolerance: look twice as deep
            guess = 2.0 * guess - bits as f64;
        }
        if -guess > MAX_PREC as f64 {
            return Ok(v);
        }
    }
}

/// Powers of a fixed base, extended incrementally from nearby cached powers.
struct PowCache {
    base: BigComplex,
    small: Vec<BigComplex>,
    cache: HashMap<i64, BigComplex>,
}

impl PowCache {
    const STRIDE: usize = 8;

    fn new(base: BigComplex) -> Self {
        let mut small = vec![BigComplex::one(base.prec())];
        for i in 1..=Self::STRIDE {
            let next = &small[i - 1] * &base;
            small.push(next);
        }
        Self {
            base,
            small,
            cache: HashMap::new(),
        }
    }

    fn pow(&mut self, e: i64) -> BigComplex {
        if (0..=Self::STRIDE as i64).contains(&e) {
            return self.small[e as usize].clone();
        }
        if let Some(v) = self.cache.get(&e) {
            return v.clone();
        }
        let near = (1..=Self::STRIDE as i64).find_map(|d| self.cache.get(&(e - d)).map(|v| (d, v)));
        let v = match near {
            Some((d, v)) => v * &self.small[d as usize],
            None => self.base.powi(e).expect("nonzero base for negative powers"),
        };
        self.cache.insert(e, v.clone());
        v
    }

    fn eval(&mut self, lp: &Lp) -> BigComplex {
        let mut acc = BigComplex::zero(self.base.prec());
        for &(c, e) in lp.terms() {
            let t = self.pow(e).scale_rational(&Rational::from(c));
            acc = &acc + &t;
        }
        acc
    }

    /// Forget cached powers below `e`.
    fn evict_below(&mut self, e: i64) {
        if self.cache.len() > 64 {
            self.cache.retain(|&k, _| k >= e);
        }
    }
}

fn transform_point(t: &ArgTransform, q: &BigComplex) -> BigComplex {
    match t.kind {
        TransformKind::Identity => q.clone(),
        TransformKind::Negate => -q,
        TransformKind::Square => q * q,
    }
}

/// Σ_{j≥0} t_j with t_j = t_{j−1}·ratio(j). `bound(j)` must bound |ratio(i)|
/// for every i ≥ j; the sum stops once the geometric tail it implies is below
/// a quarter of the tolerance.
pub(crate) fn sum_by_ratios(
    first: BigComplex,
    mut ratio: impl FnMut(i64) -> Result<BigComplex, QError>,
    bound: impl Fn(i64) -> f64,
    tol_lg: f64,
) -> Result<BigComplex, QError> {
    let prec = first.prec();
    let mut term = first;
    let mut sum = term.clone();
    let mut mass = mag(&term);
    for j in 1..MAX_TERMS as i64 {
        let beta = bound(j);
        if term.is_zero() || beta == 0.0 {
            check_rounding(&mass, j as usize, prec, tol_lg)?;
            return Ok(sum);
        }
        if beta < 1.0 {
            let tail = lg(&mag(&term)) + (beta / (1.0 - beta)).log2();
            if tail < tol_lg - 2.0 {
                check_rounding(&mass, j as usize, prec, tol_lg)?;
                return Ok(sum);
            }
        }
        term = &term * &ratio(j)?;
        sum = &sum + &term;
        mass += mag(&term);
    }
    Err(unreachable(tol_lg, prec, prec as f64))
}

fn sum_generated(gen: &Generator, y: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    let r = y.abs_f64() * (1.0 + 1e-12);
    let mut pw = PowCache::new(y.clone());
    let a0 = pw.eval(&gen.start_num);
    let b0 = pw.eval(&gen.start_den);
    if vanishes(&b0) {
        return Err(QError::PoleEncountered { index: 0 });
    }
    let first = (&a0 / &b0).expect("nonzero denominator");
    let ratio = |j: i64| {
        let (a, d) = (gen.factor)(j);
        let num = pw.eval(&a);
        let den = pw.eval(&d);
        pw.evict_below(j);
        if vanishes(&den) {
            return Err(QError::PoleEncountered { index: j as u64 });
        }
        Ok((&num / &den).expect("nonzero denominator"))
    };
    sum_by_ratios(first, ratio, |j| (gen.ratio_bound)(r, j), tol_lg)
}

/// Σ_{n≥0} (±1)^n x^{(a n² + b n)/2} for a ≥ 1 and a ≡ b (mod 2).
pub(crate) fn quadratic_sum(
    x: &BigComplex,
    a: i64,
    b: i64,
    alternating: bool,
    tol_lg: f64,
) -> Result<BigComplex, QError> {
    assert!(a >= 1 && (a - b).rem_euclid(2) == 0 && a + b >= 0);
    check_disk(x)?;
    let prec = x.prec();
    let r = x.abs_f64() * (1.0 + 1e-12);
    let lr = r.log2();
    let xa = x.powi(a).expect("positive power");
    // cur = x^{e_n}, step = x^{e_{n+1} − e_n}
    let mut cur = BigComplex::one(prec);
    let mut step = x.powi((a + b) / 2).expect("nonnegative power");
    let mut sum = BigComplex::one(prec);
    let mut mass = Float::with_val(64, 1);
    // e_n = (a n² + b n)/2 and Δ_n = e_{n+1} − e_n = a n + (a + b)/2
    let mut e_n = (a + b) / 2;
    for n in 1..MAX_TERMS as i64 {
        let delta_n = a * n + (a + b) / 2;
        let tail = e_n as f64 * lr - lg_one_minus(delta_n as f64 * lr);
        if r == 0.0 || tail < tol_lg - 2.0 {
            check_rounding(&mass, n as usize, prec, tol_lg)?;
            return Ok(sum);
        }
        cur = &cur * &step;
        step = &step * &xa;
        let term = if alternating && n % 2 == 1 { -&cur } else { cur.clone() };
        sum = &sum + &term;
        mass += mag(&term);
        e_n += delta_n;
    }
    Err(unreachable(tol_lg, prec, prec as f64))
}

/// θ₄(0; x) = 1 + 2Σ_{n≥1}(−1)^n x^{n²} and θ₂(0; x) = 2x^{1/4}Σ_{n≥0} x^{n²+n},
/// the latter with the principal fourth root.
pub(crate) fn theta(id: SeriesId, x: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    if id == SeriesId::Theta4 {
        let s = quadratic_sum(x, 2, 0, true, tol_lg - 2.0)?;
        let two = Rational::from(2);
        return Ok(&s.scale_rational(&two) - &BigComplex::one(x.prec()));
    }
    check_disk(x)?;
    if x.is_zero() {
        return Ok(BigComplex::zero(x.prec()));
    }
    let quarter = x
        .pow_rational(&Rational::from((1, 4)))
        .expect("nonzero base");
    let s = quadratic_sum(x, 2, 2, false, tol_lg - 2.0)?;
    Ok((&quarter * &s).scale_rational(&Rational::from(2)))
}

/// One factor (c·q^b; q^a)_∞^e of an infinite product, c = ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PochPiece {
    pub c: i64,
    pub b: u32,
    pub a: u32,
    pub e: i32,
}

impl PochPiece {
    pub const fn new(c: i64, b: u32, a: u32, e: i32) -> Self {
        Self { c, b, a, e }
    }
}

/// log2 Σ 2^{x_i}.
fn lg_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp2()).sum::<f64>().log2()
}

/// Relative truncation bound for a product whose remaining factors are
/// 1 + ε_j with Σ|ε_j| ≤ 2^s_lg: |Π − 1| ≤ e^s − 1 ≤ 2s for s ≤ 1/2.
fn product_done(acc: &BigComplex, s_lg: f64, tol_lg: f64) -> bool {
    s_lg < -1.0 && lg(&mag(acc)) + s_lg + 1.0 < tol_lg - 2.0
}

fn pochhammer_product(pieces: &[PochPiece], q: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    let r = check_disk(q)? * (1.0 + 1e-12);
    let prec = q.prec();
    let one = BigComplex::one(prec);
    if q.is_zero() {
        return Ok(one);
    }
    let lr = r.log2();
    let mut acc = one.clone();
    let mut pw = PowCache::new(q.clone());
    let mut steps = 0usize;
    for m in 0..MAX_TERMS as i64 {
        // log-tail of the factors with index ≥ m
        let s_lg = lg_sum(pieces.iter().map(|p| {
            let lead = (p.b as f64 + p.a as f64 * m as f64) * lr;
            (p.e.unsigned_abs() as f64).log2() + lead
                - lg_one_minus(p.a as f64 * lr)
                - lg_one_minus(lead)
        }));
        if product_done(&acc, s_lg, tol_lg) {
            check_rounding(&mag(&acc), steps + 1, prec, tol_lg)?;
            return Ok(acc);
        }
        for p in pieces {
            let qe = pw.pow(p.b as i64 + p.a as i64 * m);
            let f = &one - &qe.scale_rational(&Rational::from(p.c));
            if p.e < 0 && vanishes(&f) {
                return Err(QError::PoleEncountered { index: m as u64 });
            }
            let fe = f.powi(p.e as i64).ok_or(QError::PoleEncountered { index: m as u64 })?;
            acc = &acc * &fe;
            steps += p.e.unsigned_abs() as usize;
        }
        pw.evict_below(m);
    }
    Err(unreachable(tol_lg, prec, prec as f64))
}

/// Π over pieces of (c q^b; q^a)_∞^e, truncated with a log-tail bound.
pub fn eval_pochhammer_product(
    pieces: &[PochPiece],
    q: &BigComplex,
    tol: f64,
) -> Result<BigComplex, QError> {
    pochhammer_product(pieces, q, tol_lg(tol))
}

/// (c; x)_∞ = Π_{j≥0}(1 − c x^j) for an arbitrary complex c.
pub(crate) fn pochhammer_inf(c: &BigComplex, x: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    let r = check_disk(x)? * (1.0 + 1e-12);
    let prec = x.prec().max(c.prec());
    let one = BigComplex::one(prec);
    let lc = c.abs_f64().log2();
    let lr = r.log2();
    let mut acc = one.clone();
    let mut cx = c.clone();
    for j in 0..MAX_TERMS as i64 {
        let s_lg = if c.is_zero() || (x.is_zero() && j > 0) {
            f64::NEG_INFINITY
        } else {
            let lead = if j == 0 { lc } else { lc + j as f64 * lr };
            if lead < -1.0 {
                lead - lg_one_minus(lr) - lg_one_minus(lead)
            } else {
                f64::INFINITY
            }
        };
        if s_lg == f64::NEG_INFINITY || product_done(&acc, s_lg, tol_lg) {
            check_rounding(&mag(&acc), j as usize + 1, prec, tol_lg)?;
            return Ok(acc);
        }
        let f = &one - &cx;
        if vanishes(&f) {
            return Err(QError::PoleEncountered { index: j as u64 });
        }
        acc = &acc * &f;
        cx = &cx * x;
    }
    Err(unreachable(tol_lg, prec, prec as f64))
}

/// (q; q)_∞ by Euler's pentagonal number theorem, to absolute tolerance 2^tol_lg.
pub(crate) fn euler_sum(q: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    check_disk(q)?;
    let prec = q.prec();
    let r = q.abs_f64() * (1.0 + 1e-12);
    let lr = r.log2();
    // exponents n(3n−1)/2 and n(3n+1)/2 for n ≥ 1
    let mut sum = BigComplex::one(prec);
    let mut mass = Float::with_val(64, 1);
    let q3 = q.powi(3).expect("positive power");
    let mut lo = q.clone(); // q^{n(3n−1)/2}
    let mut hi = q * q; // q^{n(3n+1)/2}
    let mut step_lo = q.powi(4).expect("positive power"); // q^{3n+1}
    let mut qn = q * q; // q^{n+1}
    for n in 1..MAX_TERMS as i64 {
        let p = (n * (3 * n - 1) / 2) as f64;
        let tail = 1.0 + p * lr - lg_one_minus((3 * n + 1) as f64 * lr);
        if r == 0.0 || tail < tol_lg - 2.0 {
            check_rounding(&mass, 2 * n as usize, prec, tol_lg)?;
            return Ok(sum);
        }
        let pair = &lo + &hi;
        let t = if n % 2 == 1 { -&pair } else { pair };
        mass += mag(&t);
        sum = &sum + &t;
        // advance: lo_{n+1} = lo_n q^{3n+1}, hi_{n+1} = lo_{n+1} q^{n+1}
        lo = &lo * &step_lo;
        step_lo = &step_lo * &q3;
        hi = &lo * &qn;
        qn = &qn * q;
    }
    Err(unreachable(tol_lg, prec, prec as f64))
}

/// (q; q)_∞ by Euler's pentagonal number theorem.
pub fn euler_function(q: &BigComplex, tol: f64) -> Result<BigComplex, QError> {
    euler_sum(q, tol_lg(tol))
}

fn product_pieces(id: SeriesId) -> Option<(Rational, Rational, Vec<PochPiece>)> {
    use SeriesId::*;
    let p = PochPiece::new;
    Some(match id {
        UProd => (
            Rational::from(1),
            Rational::new(),
            vec![p(1, 1, 1, 2), p(1, 2, 2, -1), p(-1, 1, 1, -1)],
        ),
        VProd => (
            Rational::from(1),
            Rational::from((-1, 2)),
            vec![p(1, 2, 2, 1), p(1, 1, 2, -2)],
        ),
        WProd => (
            Rational::from((3, 4)),
            Rational::new(),
            vec![p(1, 3, 3, 4), p(1, 6, 6, -2), p(1, 1, 1, -1)],
        ),
        XProd => (
            Rational::from((3, 2)),
            Rational::new(),
            vec![p(1, 6, 6, 2), p(1, 3, 6, -2), p(1, 2, 2, -1)],
        ),
        QPochhammerInf => (Rational::from(1), Rational::new(), vec![p(1, 1, 1, 1)]),
        _ => return None,
    })
}

fn product_numeric(id: SeriesId, q: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    let (constant, q_exp, pieces) = product_pieces(id).ok_or_else(|| {
        QError::UnsupportedSeries(format!("{id} is not an infinite product"))
    })?;
    let r = check_disk(q)?;
    if q_exp < 0 && q.is_zero() {
        return Err(QError::PoleEncountered { index: 0 });
    }
    let amplify = (constant.to_f64().abs() * 2.0).log2() + q_exp.to_f64() * r.log2();
    let body = pochhammer_product(&pieces, q, tol_lg - amplify.max(0.0))?;
    let pre = q
        .pow_rational(&q_exp)
        .unwrap_or_else(|| BigComplex::one(q.prec()));
    Ok((&pre * &body).scale_rational(&constant))
}

/// The products u, v, w, x and (q;q)_∞. Fractional powers of q use the
/// principal branch.
pub fn eval_product_numeric(id: SeriesId, q: &BigComplex, tol: f64) -> Result<BigComplex, QError> {
    product_numeric(id, q, tol_lg(tol))
}

pub(crate) fn series_numeric(
    id: SeriesId,
    t: &ArgTransform,
    q: &BigComplex,
    tol_lg: f64,
) -> Result<BigComplex, QError> {
    let r = check_disk(q)?;
    if t.prefactor < 0 && q.is_zero() {
        return Err(QError::PoleEncountered { index: 0 });
    }
    let tol_lg = tol_lg - (t.prefactor as f64 * r.log2()).max(0.0);
    let x = transform_point(t, q);
    let value = if let Some(gen) = generator(id) {
        let y = if !gen.half_variable {
            x
        } else if t.kind == TransformKind::Square {
            q.clone()
        } else {
            x.pow_rational(&Rational::from((1, 2)))
                .unwrap_or_else(|| BigComplex::zero(q.prec()))
        };
        if gen.mult_exp < 0 && y.is_zero() {
            return Err(QError::PoleEncountered { index: 0 });
        }
        let ry = y.abs_f64();
        let scale = gen.mult.to_f64().abs().log2() + gen.mult_exp as f64 * ry.log2();
        let s = sum_generated(&gen, &y, tol_lg - 1.0 - scale.max(0.0))?;
        let m = y
            .powi(gen.mult_exp)
            .expect("nonzero base")
            .scale_rational(&gen.mult);
        let c = BigComplex::from_rational(q.prec(), &gen.constant);
        &c + &(&m * &s)
    } else if matches!(id, SeriesId::Theta2 | SeriesId::Theta4) {
        theta(id, &x, tol_lg)?
    } else {
        product_numeric(id, &x, tol_lg)?
    };
    if t.prefactor == 0 {
        return Ok(value);
    }
    let pre = q.powi(t.prefactor).ok_or(QError::PoleEncountered { index: 0 })?;
    Ok(&pre * &value)
}

/// Numeric value of any series id at the transformed argument, times q^e for
/// the transform's prefactor.
pub fn eval_series_numeric(
    id: SeriesId,
    t: &ArgTransform,
    q: &BigComplex,
    tol: f64,
) -> Result<BigComplex, QError> {
    series_numeric(id, t, q, tol_lg(tol))
}
