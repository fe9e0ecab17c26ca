//! Closing step of period resummation.
//!
//! Once terms are known to satisfy t_{s+P} = c·t_s with c = α/β for every s,
//! the series equals (Σ_{s<P} t_s)/(1 − c). Convergence is certified by an
//! exact comparison |α| < |β|.

use rug::{Float, Rational};

use super::QError;
use crate::cyclotomic::CycNum;

/// Result of closing a resummation.
#[derive(Clone, Debug, PartialEq)]
pub struct Resummed {
    pub value: CycNum,
    /// The period ratio c.
    pub ratio: CycNum,
    /// False when the value is the analytic continuation of the geometric
    /// sum (|c| ≥ 1) rather than the limit of partial sums.
    pub convergent: bool,
}

/// Certified comparison |a| < |b| for cyclotomic numbers.
///
/// The difference |b|² − |a|² is an exact real element; if it is rational the
/// sign is read off directly, otherwise its embedding is computed at doubling
/// precision until the error bound separates it from zero (it is nonzero,
/// since a nonzero rational check already failed).
pub fn modulus_below(a: &CycNum, b: &CycNum) -> bool {
    let d = &b.norm_sqr() - &a.norm_sqr();
    if let Some(r) = d.to_rational() {
        return r > 0;
    }
    let mut mass = Rational::new();
    for c in d.coeffs() {
        mass += c.abs();
    }
    let mut prec = 128u32;
    loop {
        let v = d.embed(prec);
        let bound = Float::with_val(64, &mass) >> (prec as i32 - 4);
        if Float::with_val(prec, v.re().abs_ref()) > bound {
            return v.re().is_sign_positive();
        }
        prec *= 2;
    }
}

/// Value of Σ t_n given Σ_{s<P} t_s = num/den and the period ratio α/β.
pub(crate) fn finish(
    num: &CycNum,
    den: &CycNum,
    alpha: &CycNum,
    beta: &CycNum,
    allow_continuation: bool,
) -> Result<Resummed, QError> {
    if beta.is_zero() {
        return Err(QError::NotConvergent("period ratio has a zero denominator".into()));
    }
    let gap = beta - alpha;
    if gap.is_zero() {
        return Err(QError::NotConvergent("period ratio equals 1".into()));
    }
    let convergent = modulus_below(alpha, beta);
    if !convergent && !allow_continuation {
        return Err(QError::NotConvergent("period ratio has modulus >= 1".into()));
    }
    let value = (num * beta).div(&(den * &gap))?;
    Ok(Resummed {
        value,
        ratio: alpha.div(beta)?,
        convergent,
    })
}
