//! Exact evaluation of generated series at roots of unity.

use rug::Float;
use serde::Serialize;

use super::cyclic::{CyclicVec, RingPoint};
use super::generator::{generator, Generator};
use super::resum::finish;
use super::{ArgTransform, EvalResult, QError, SeriesId, TransformKind};
use crate::cyclotomic::{CycNum, ReducedRoot};

/// (a; q)_n = Π_{j<n} (1 − a q^j), computed exactly.
pub fn qpochhammer(a: &CycNum, q: &CycNum, n: u64) -> CycNum {
    let one = CycNum::one(1);
    let mut acc = one.clone();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = &acc * &(&one - &aq);
        aq = &aq * q;
    }
    acc
}

/// Whether (series, transform, k) belongs to the documented convergence
/// classes of the mock theta functions.
pub fn in_convergence_table(id: SeriesId, kind: TransformKind, k: u64) -> bool {
    use SeriesId::*;
    use TransformKind::*;
    match (id, kind) {
        (Psi, Negate) | (Phi, Negate) => k % 2 == 1 || k.is_multiple_of(4),
        (Nu, Negate) => k.is_multiple_of(2),
        (Omega, Square) => k.is_multiple_of(4),
        (Rho, Square) => k.is_multiple_of(12),
        (F, Identity) => k % 2 == 1,
        (Chi, Identity) => k % 6 == 3,
        _ => false,
    }
}

struct Setup {
    gen: Generator,
    point: RingPoint,
}

fn setup(id: SeriesId, t: &ArgTransform, q: &ReducedRoot) -> Result<Setup, QError> {
    let gen = generator(id).ok_or_else(|| {
        QError::UnsupportedSeries(format!("{id} has no term generator for exact evaluation"))
    })?;
    let y = if gen.half_variable {
        if t.kind != TransformKind::Square {
            return Err(QError::UnsupportedSeries(format!(
                "{id} involves q^(1/2); exact evaluation needs the squared argument (sq)"
            )));
        }
        *q
    } else {
        t.apply_root(q)
    };
    let n = u32::try_from(y.k())
        .map_err(|_| QError::UnsupportedSeries("root order too large".into()))?;
    Ok(Setup {
        gen,
        point: RingPoint { n, h: y.h() },
    })
}

/// Running fraction Σ_{i≤n} t_i = x/u with t_n = num/u.
struct Partial {
    num: CyclicVec,
    den: CyclicVec,
    x: CyclicVec,
}

impl Setup {
    fn check_nonzero(&self, lp: &super::Lp, index: u64) -> Result<(), QError> {
        if self.point.key(lp).is_empty() || self.point.eval(lp).is_zero() {
            return Err(QError::PoleEncountered { index });
        }
        Ok(())
    }

    /// Partial sums over the first `count` generator terms.
    fn partial(&self, count: u64) -> Result<Partial, QError> {
        let p = &self.point;
        self.check_nonzero(&self.gen.start_den, 0)?;
        let num = p.lift(&self.gen.start_num);
        let den = p.lift(&self.gen.start_den);
        let mut part = Partial {
            x: if count == 0 { p.zero() } else { num.clone() },
            num,
            den,
        };
        for j in 1..count as i64 {
            let (a, d) = (self.gen.factor)(j);
            if d != super::Lp::one() {
                self.check_nonzero(&d, j as u64)?;
            }
            part.num = p.mul_lp(&part.num, &a);
            part.den = p.mul_lp(&part.den, &d);
            part.x = p.mul_lp(&part.x, &d);
            part.x.add_assign(&part.num);
        }
        Ok(part)
    }

    /// constant + mult · y^{mult_exp} · q^{prefactor} · value
    fn shape(&self, sum: &CycNum, t: &ArgTransform, q: &ReducedRoot) -> CycNum {
        let g = &self.gen;
        let y = CycNum::zeta(g.mult_exp * self.point.h as i64, self.point.n);
        
        &(&CycNum::from_rational(&g.constant, 1) + &(&sum.scale(&g.mult) * &y))
            * &CycNum::from_root(&q.pow(t.prefactor))
    }

    fn factor_key(&self, j: i64) -> (Vec<(usize, i64)>, Vec<(usize, i64)>) {
        let (a, d) = (self.gen.factor)(j);
        (self.point.key(&a), self.point.key(&d))
    }

    fn is_period(&self, period: u64) -> bool {
        (1..=period as i64).all(|j| self.factor_key(j) == self.factor_key(j + period as i64))
    }
}

/// The exact truncation S_[k]: the indexed sum over n < k, with the series'
/// additive constant and multiplier applied whole.
pub fn truncated_series(
    id: SeriesId,
    t: &ArgTransform,
    q: &ReducedRoot,
    k: u64,
) -> Result<CycNum, QError> {
    let s = setup(id, t, q)?;
    let count = k.saturating_sub(s.gen.offset);
    let part = s.partial(count)?;
    let sum = s
        .point
        .to_cycnum(&part.x)
        .div(&s.point.to_cycnum(&part.den))?;
    Ok(s.shape(&sum, t, q))
}

/// Exact value of a generated series at a root of unity by period
/// resummation, with a runtime convergence audit.
pub fn eval_mock_at_root(
    id: SeriesId,
    t: &ArgTransform,
    q: &ReducedRoot,
) -> Result<EvalResult, QError> {
    let s = setup(id, t, q)?;
    let k = q.k();
    let order = s.point.n as u64;
    let cap = 4 * k.max(order);
    let period = (1..)
        .map(|m| m * order)
        .take_while(|&p| p <= cap)
        .find(|&p| s.is_period(p))
        .ok_or_else(|| QError::NotConvergent(format!("no factor period up to {cap}")))?;

    let listed = in_convergence_table(id, t.kind, k);
    let divergent = QError::DivergentClass {
        series: id,
        transform: *t,
        k,
    };
    let part = match s.partial(period) {
        Err(QError::PoleEncountered { .. }) if !listed => return Err(divergent),
        other => other?,
    };
    let p = &s.point;
    let mut alpha = p.one();
    let mut beta = p.one();
    for j in 1..=period as i64 {
        let (a, d) = (s.gen.factor)(j);
        alpha = p.mul_lp(&alpha, &a);
        beta = p.mul_lp(&beta, &d);
    }
    let closed = finish(
        &p.to_cycnum(&part.x),
        &p.to_cycnum(&part.den),
        &p.to_cycnum(&alpha),
        &p.to_cycnum(&beta),
        false,
    );
    let resummed = match closed {
        Ok(r) => r,
        Err(QError::NotConvergent(_)) if !listed => return Err(divergent),
        Err(e) => return Err(e),
    };
    let route = if listed {
        format!("period resummation (P={period})")
    } else {
        log::info!("{id}({t}) at {q}: outside the convergence table but the audit passed");
        format!("period resummation (P={period}, audit only)")
    };
    Ok(EvalResult {
        value: s.shape(&resummed.value, t, q),
        route,
        period,
        terms_summed: period,
    })
}

/// Range of term moduli over a window, as evidence for (non)convergence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceEvidence {
    pub from: u64,
    pub to: u64,
    pub inf: f64,
    pub sup: f64,
}

/// inf and sup of |term_n| for n in [window, 2·window], where term_n is the
/// n-th term of the indexed sum including the series' multiplier.
pub fn eval_companion_infinite_check(
    id: SeriesId,
    t: &ArgTransform,
    q: &ReducedRoot,
    window: u64,
) -> Result<DivergenceEvidence, QError> {
    let s = setup(id, t, q)?;
    let p = &s.point;
    let to = 2 * window;
    let scale = s.gen.mult.to_f64().abs();
    let mut num = p.lift(&s.gen.start_num);
    let mut den = p.lift(&s.gen.start_den);
    let (mut inf, mut sup) = (f64::INFINITY, 0.0f64);
    let first = window.saturating_sub(s.gen.offset);
    let last = to.saturating_sub(s.gen.offset);
    for j in 0..=last as i64 {
        if j > 0 {
            let (a, d) = (s.gen.factor)(j);
            num = p.mul_lp(&num, &a);
            if d != super::Lp::one() {
                den = p.mul_lp(&den, &d);
            }
        }
        if (j as u64) < first {
            continue;
        }
        let top = p.to_cycnum(&num).embed(64).abs();
        let bottom = p.to_cycnum(&den).embed(64).abs();
        if bottom.is_zero() {
            return Err(QError::PoleEncountered { index: j as u64 });
        }
        let m = Float::with_val(64, top / bottom).to_f64() * scale;
        inf = inf.min(m);
        sup = sup.max(m);
    }
    Ok(DivergenceEvidence {
        from: window,
        to,
        inf,
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn root(h: i64, k: u64) -> ReducedRoot {
        ReducedRoot::new(h, k).unwrap()
    }

    fn rat(v: &CycNum) -> Rational {
        v.to_rational().expect("rational value")
    }

    #[test]
    fn pochhammer_examples() {
        let one = CycNum::one(1);
        assert_eq!(qpochhammer(&CycNum::zeta(1, 3), &one, 0), one);
        assert_eq!(
            rat(&qpochhammer(&CycNum::from_int(-1, 1), &one, 3)),
            Rational::from(8)
        );
    }

    #[test]
    fn truncation_examples() {
        let v = truncated_series(SeriesId::PsiA, &ArgTransform::NEGATE, &root(1, 1), 1).unwrap();
        assert_eq!(rat(&v), Rational::from(-1));
        let v = truncated_series(SeriesId::FA, &ArgTransform::IDENTITY, &root(1, 1), 1).unwrap();
        assert_eq!(rat(&v), Rational::from(4));
        let v = truncated_series(SeriesId::PhiA, &ArgTransform::NEGATE, &root(1, 3), 0).unwrap();
        assert_eq!(rat(&v), Rational::from(1));
        let v = truncated_series(SeriesId::NuA, &ArgTransform::NEGATE, &root(1, 3), 0).unwrap();
        assert!(v.is_zero());
        // ω̃_a truncated at k = 4 with q = i gives −1
        let v = truncated_series(SeriesId::OmegaA, &ArgTransform::SQUARE, &root(1, 4), 4).unwrap();
        assert_eq!(rat(&v), Rational::from(-1));
        assert!(truncated_series(SeriesId::Theta4, &ArgTransform::IDENTITY, &root(1, 1), 1).is_err());
        assert!(truncated_series(SeriesId::OmegaA, &ArgTransform::IDENTITY, &root(1, 4), 1).is_err());
    }

    #[test]
    fn resummation_examples() {
        let v = eval_mock_at_root(SeriesId::Psi, &ArgTransform::NEGATE, &root(1, 1)).unwrap();
        assert_eq!(rat(&v.value), Rational::from((-1, 3)));
        let v = eval_mock_at_root(SeriesId::Phi, &ArgTransform::NEGATE, &root(1, 1)).unwrap();
        assert_eq!(rat(&v.value), Rational::from((2, 3)));
        let v = eval_mock_at_root(SeriesId::Omega, &ArgTransform::SQUARE, &root(1, 4)).unwrap();
        assert_eq!(rat(&v.value), Rational::from((1, 3)));
        let v = eval_mock_at_root(SeriesId::F, &ArgTransform::IDENTITY, &root(0, 1)).unwrap();
        assert_eq!(rat(&v.value), Rational::from((4, 3)));
    }

    #[test]
    fn divergent_class_is_reported() {
        let e = eval_mock_at_root(SeriesId::Psi, &ArgTransform::NEGATE, &root(1, 2)).unwrap_err();
        assert!(matches!(e, QError::DivergentClass { k: 2, .. }), "{e:?}");
    }

    #[test]
    fn period_identity_for_pochhammer() {
        // (xq;q)_{s+mk} = (1 − x^k)^m (xq;q)_s at q = ζ_k^h
        for k in 1..=24u64 {
            for r in ReducedRoot::all_of_order(k) {
                let q = CycNum::from_root(&r);
                let xs = [
                    CycNum::from_int(2, 1),
                    CycNum::zeta(1, 3),
                    &CycNum::one(4) + &CycNum::zeta(1, 4),
                ];
                for x in &xs {
                    let xq = x * &q;
                    let xk = x.pow(k as i64).unwrap();
                    let one = CycNum::one(1);
                    for s in [0, k / 2, k] {
                        let base = qpochhammer(&xq, &q, s);
                        for m in 1..=3u64 {
                            let lhs = qpochhammer(&xq, &q, s + m * k);
                            let rhs = &(&one - &xk).pow(m as i64).unwrap() * &base;
                            assert_eq!(lhs, rhs, "k={k} r={r} s={s} m={m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn witness_examples() {
        let e = eval_companion_infinite_check(SeriesId::PsiA, &ArgTransform::NEGATE, &root(1, 1), 100)
            .unwrap();
        // |(−q²;q²)_n q^{n+1}| = 2^n at q = −1
        assert!(e.inf >= 2f64.powi(99));
        let e = eval_companion_infinite_check(SeriesId::NuA, &ArgTransform::NEGATE, &root(1, 4), 100)
            .unwrap();
        assert!(e.inf > 1e-3, "{e:?}");
    }
}
