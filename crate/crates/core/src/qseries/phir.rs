//! The series φ_r(a; b; q; t) = Σ_n Π_i (a_i q;q)_n/(b_i q;q)_n · t^n and its
//! geometric coefficients u, δ, c.

use super::resum::finish;
use super::{EvalResult, QError};
use crate::cyclotomic::{CycNum, ReducedRoot};
use crate::numeric::BigComplex;

/// Exact evaluation mode at a root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMode {
    /// The full series by period resummation. With `continuation`, a period
    /// ratio of modulus ≥ 1 yields the analytic continuation of the geometric
    /// sum instead of an error.
    FullAtRoot { continuation: bool },
    /// The first `k` terms.
    Truncated(u64),
}

/// u_{r,k}, δ_{r,k} = (1 − u)^{-1} and c_{r,k} = δ·u_{r,k}/u_{r,1}.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiRCoefficients {
    pub u: CycNum,
    pub delta: CycNum,
    pub c: CycNum,
}

fn u_coefficient(a: &[CycNum], b: &[CycNum], t: &CycNum, k: u64) -> Result<CycNum, QError> {
    let one = CycNum::one(1);
    let mut num = t.pow(k as i64)?;
    let mut den = one.clone();
    for ai in a {
        num = &num * &(&one - &ai.pow(k as i64)?);
    }
    for (i, bi) in b.iter().enumerate() {
        let f = &one - &bi.pow(k as i64)?;
        if f.is_zero() {
            return Err(QError::DegenerateParameters(format!(
                "1 - b_{}^{k} = 0",
                i + 1
            )));
        }
        den = &den * &f;
    }
    Ok(num.div(&den)?)
}

pub fn phi_r_coefficients(
    a: &[CycNum],
    b: &[CycNum],
    t: &CycNum,
    k: u64,
) -> Result<PhiRCoefficients, QError> {
    let u = u_coefficient(a, b, t, k)?;
    let u1 = u_coefficient(a, b, t, 1)?;
    if u1.is_zero() {
        return Err(QError::DegenerateParameters("u_{r,1} = 0".into()));
    }
    let gap = &CycNum::one(1) - &u;
    if gap.is_zero() {
        return Err(QError::DegenerateParameters(format!("u_{{r,{k}}} = 1")));
    }
    let delta = gap.inv()?;
    let c = (&delta * &u).div(&u1)?;
    Ok(PhiRCoefficients { u, delta, c })
}

/// The factor pair (a_j, d_j) with t_j = t_{j-1}·a_j/d_j.
fn factors(a: &[CycNum], b: &[CycNum], t: &CycNum, qj: &CycNum) -> (CycNum, CycNum) {
    let one = CycNum::one(1);
    let mut num = t.clone();
    for ai in a {
        num = &num * &(&one - &(ai * qj));
    }
    let mut den = one.clone();
    for bi in b {
        den = &den * &(&one - &(bi * qj));
    }
    (num, den)
}

/// Exact φ_r at q = ζ_k^h.
pub fn eval_phi_r(
    a: &[CycNum],
    b: &[CycNum],
    t: &CycNum,
    q: &ReducedRoot,
    mode: PhiMode,
) -> Result<EvalResult, QError> {
    assert_eq!(a.len(), b.len(), "parameter vectors must have equal length");
    let qv = CycNum::from_root(q);
    let count = match mode {
        PhiMode::FullAtRoot { .. } => q.k(),
        PhiMode::Truncated(n) => n,
    };
    let one = CycNum::one(1);
    let mut num = one.clone();
    let mut den = one.clone();
    let mut x = if count == 0 { CycNum::zero(1) } else { one.clone() };
    let mut qj = one.clone();
    for j in 1..count {
        qj = &qj * &qv;
        let (aj, dj) = factors(a, b, t, &qj);
        if dj.is_zero() {
            return Err(QError::PoleEncountered { index: j });
        }
        num = &num * &aj;
        den = &den * &dj;
        x = &(&x * &dj) + &num;
    }
    match mode {
        PhiMode::Truncated(n) => Ok(EvalResult {
            value: x.div(&den)?,
            route: "truncation".into(),
            period: 0,
            terms_summed: n,
        }),
        PhiMode::FullAtRoot { continuation } => {
            let k = q.k();
            qj = &qj * &qv;
            let (ak, dk) = factors(a, b, t, &qj);
            if dk.is_zero() {
                return Err(QError::PoleEncountered { index: k });
            }
            let alpha = &num * &ak;
            let beta = &den * &dk;
            let r = finish(&x, &den, &alpha, &beta, continuation)?;
            let route = if r.convergent {
                format!("period resummation (P={k})")
            } else {
                format!("continued period resummation (P={k}, |ratio| >= 1)")
            };
            Ok(EvalResult {
                value: r.value,
                route,
                period: k,
                terms_summed: k,
            })
        }
    }
}

/// Numeric φ_r inside the disk with a geometric tail bound.
pub fn eval_phi_r_numeric(
    a: &[BigComplex],
    b: &[BigComplex],
    t: &BigComplex,
    q: &BigComplex,
    tol: f64,
) -> Result<BigComplex, QError> {
    phi_r_numeric(a, b, t, q, tol.log2())
}

pub(crate) fn phi_r_numeric(
    a: &[BigComplex],
    b: &[BigComplex],
    t: &BigComplex,
    q: &BigComplex,
    tol_lg: f64,
) -> Result<BigComplex, QError> {
    let prec = q.prec().max(t.prec());
    let r = q.abs_f64() * (1.0 + 1e-12);
    if r >= 1.0 - super::DISK_MARGIN {
        return Err(QError::OutsideDisk {
            margin: super::DISK_MARGIN,
        });
    }
    let ta = t.abs_f64() * (1.0 + 1e-12);
    let amax: Vec<f64> = a.iter().map(|v| v.abs_f64() * (1.0 + 1e-12)).collect();
    let bmax: Vec<f64> = b.iter().map(|v| v.abs_f64() * (1.0 + 1e-12)).collect();
    let bound = |j: i64| {
        let rj = r.powi(j as i32);
        if bmax.iter().any(|x| x * rj >= 1.0) {
            return f64::INFINITY;
        }
        let top: f64 = amax.iter().map(|x| 1.0 + x * rj).product();
        let bottom: f64 = bmax.iter().map(|x| 1.0 - x * rj).product();
        ta * top / bottom
    };
    let one = BigComplex::one(prec);
    let mut qj = one.clone();
    let ratio = |j: i64| {
        qj = &qj * q;
        let mut f = t.clone();
        for ai in a {
            f = &f * &(&one - &(ai * &qj));
        }
        for bi in b {
            let d = &one - &(bi * &qj);
            if super::vanishes(&d) {
                return Err(QError::PoleEncountered { index: j as u64 });
            }
            f = (&f / &d).expect("nonzero denominator");
        }
        Ok(f)
    };
    super::sum_by_ratios(one.clone(), ratio, bound, tol_lg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn c(v: i64, d: i64) -> CycNum {
        CycNum::from_rational(&Rational::from((v, d)), 1)
    }

    #[test]
    fn t_zero_gives_one() {
        let q = ReducedRoot::new(1, 5).unwrap();
        let v = eval_phi_r(&[c(0, 1)], &[c(1, 2)], &c(0, 1), &q, PhiMode::FullAtRoot { continuation: false })
            .unwrap();
        assert_eq!(v.value, CycNum::one(1));
    }

    #[test]
    fn coefficient_examples() {
        let b = c(1, 2);
        let t = c(1, 3);
        let co = phi_r_coefficients(&[c(0, 1)], std::slice::from_ref(&b), &t, 3).unwrap();
        // u_{1,k}(0, b, t) = t^k/(1 − b^k)
        assert_eq!(co.u, c(1, 27).div(&c(7, 8)).unwrap());
        let e = phi_r_coefficients(&[c(1, 2)], &[c(1, 2)], &c(1, 1), 1).unwrap_err();
        assert!(matches!(e, QError::DegenerateParameters(_)));
    }
}
