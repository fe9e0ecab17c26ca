use std::fmt;

use crate::cyclotomic::{CycNum, ReducedRoot};
use crate::qseries::{
    eval_mock_at_root, eval_phi_r, phi_r_coefficients, truncated_series, PhiMode, QError,
    TransformKind,
};

use super::{IdentityId, Report, Status, Value};

fn lcm(a: u32, b: u32) -> u32 {
    crate::cyclotomic::lcm_u64(a as u64, b as u64) as u32
}

fn one() -> CycNum {
    CycNum::one(1)
}

/// Conductor needed for q = ζ_k^h under the line's argument transform.
fn working_conductor(kind: TransformKind, k: u64) -> u32 {
    let n = if kind == TransformKind::Negate && k % 2 == 1 {
        2 * k
    } else {
        k
    };
    n as u32
}

fn exact(v: &CycNum) -> Option<Value> {
    Some(Value::Exact(v.clone()))
}

fn is_divergence(e: &QError) -> bool {
    matches!(
        e,
        QError::DivergentClass { .. } | QError::NotConvergent(_) | QError::PoleEncountered { .. }
    )
}

/// Checks one mock theta line at a root: the mock side by exact period
/// resummation, the companion side by exact truncation after k terms.
///
/// Outside the line's class the mock side is still evaluated: a divergent
/// or singular series gives `divergent_input`, a convergent one
/// `out_of_class` with both sides recorded and whether they happen to agree.
pub fn verify_antiquantum(id: IdentityId, root: &ReducedRoot) -> Report {
    let line = id
        .line()
        .unwrap_or_else(|| panic!("{id} is not a mock theta line"));
    let k = root.k();
    let mut report = Report::new(id, Some(root));
    report.conductor = Some(working_conductor(line.t.kind, k));
    let lhs = match eval_mock_at_root(line.mock, &line.t, root) {
        Ok(v) => v,
        Err(e) if is_divergence(&e) => {
            report.route = "period resummation".into();
            return report.with_status(Status::DivergentInput, e.to_string());
        }
        Err(e) => return report.with_status(Status::Fail, e.to_string()),
    };
    report.route = format!("{}; truncation after {k} terms", lhs.route);
    report.lhs = exact(&lhs.value);
    let rhs = truncated_series(line.companion, &line.t, root, k).map(|t| {
        &CycNum::from_rational(&line.constant, 1) + &t.scale(&line.mult)
    });
    let rhs = match rhs {
        Ok(v) => v,
        Err(e) => {
            let status = if id.claims(k) {
                Status::Fail
            } else {
                Status::OutOfClass
            };
            return report.with_status(status, format!("companion truncation: {e}"));
        }
    };
    report.rhs = exact(&rhs);
    let equal = lhs.value == rhs;
    if !id.claims(k) {
        return report
            .param("agrees", equal)
            .with_status(Status::OutOfClass, format!("k = {k} is outside {}", class_of(id)));
    }
    if equal {
        report.status = Status::Pass;
        report
    } else {
        report.with_status(Status::Fail, "sides differ")
    }
}

fn class_of(id: IdentityId) -> &'static str {
    super::catalog()
        .into_iter()
        .find(|e| e.id == id)
        .map(|e| e.class)
        .unwrap_or("the stated class")
}

/// ω(q²) = q⁻¹ν(−q) at roots of order divisible by 4, both sides by
/// period resummation.
pub fn verify_omega_chain(root: &ReducedRoot) -> Report {
    use crate::qseries::ArgTransform;
    let mut report = Report::new(IdentityId::OmegaChain, Some(root));
    report.conductor = Some(root.k() as u32);
    report.route = "period resummation on both sides".into();
    if !root.k().is_multiple_of(4) {
        return report.with_status(Status::OutOfClass, "k must be divisible by 4");
    }
    let omega = eval_mock_at_root(crate::qseries::SeriesId::Omega, &ArgTransform::SQUARE, root);
    let nu = eval_mock_at_root(crate::qseries::SeriesId::Nu, &ArgTransform::NEGATE, root);
    let (omega, nu) = match (omega, nu) {
        (Ok(a), Ok(b)) => (a.value, b.value),
        (Err(e), _) | (_, Err(e)) => return report.with_status(Status::DivergentInput, e.to_string()),
    };
    let q_inv = CycNum::from_root(&root.pow(-1));
    let rhs = &q_inv * &nu;
    report.lhs = exact(&omega);
    report.rhs = exact(&rhs);
    if omega == rhs {
        report.status = Status::Pass;
        report
    } else {
        report.with_status(Status::Fail, "sides differ")
    }
}

/// Sign choice ± in the two-parameter identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn identity(self) -> IdentityId {
        match self {
            Sign::Plus => IdentityId::ThmBidPlus,
            Sign::Minus => IdentityId::ThmBidMinus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// p_{h,k}(b, q) = (1 + (−b⁻¹)^{k/2}(1 − b^{k/2}))·b^{k/2−1}·(1 + (−1)^h(1 − b^{−k/2})).
#[derive(Clone, Debug, PartialEq)]
pub struct PhkFactor {
    pub b: CycNum,
    pub root: ReducedRoot,
    /// The three factors, in order.
    pub factors: [CycNum; 3],
    pub value: CycNum,
}

impl PhkFactor {
    pub fn new(b: &CycNum, root: &ReducedRoot) -> Result<Self, QError> {
        let k = root.k() as i64;
        let half = k / 2;
        let sign_h = if root.h().is_multiple_of(2) { 1 } else { -1 };
        let b_half = b.pow(half)?;
        let minus_b_inv = (-b).inv()?;
        let first = &one() + &(&minus_b_inv.pow(half)? * &(&one() - &b_half));
        let second = b.pow(half - 1)?;
        let third = &one() + &(&one() - &b_half.inv()?).scale(&sign_h.into());
        let value = &(&first * &second) * &third;
        Ok(Self {
            b: b.clone(),
            root: *root,
            factors: [first, second, third],
            value,
        })
    }
}

/// Values of the left side at each stage of the proof route.
#[derive(Clone, Debug, PartialEq)]
pub struct BidStages {
    /// Σ_{n<k}(b;q²)_n(−b⁻¹q²)ⁿ.
    pub lhs: CycNum,
    /// The sum over n < k/2 times 1 + (−b⁻¹)^{k/2}(1 − b^{k/2}).
    pub split: CycNum,
    /// After the polynomial identity in base q² with z = −b⁻¹q².
    pub polynomial: CycNum,
    /// p_{h,k}·Σ_{n<k/4}(b⁻²;q⁻⁴)_n q^{−2n}.
    pub reduced: CycNum,
    /// p_{h,k}·c⁻¹·φ₁(0; b⁻²q⁴; q⁴; q²).
    pub phi_form: CycNum,
    pub phi1: CycNum,
    pub phi1_route: String,
    pub phk: PhkFactor,
    /// 1 − b^{−k/2} − (−1)^h.
    pub theorem_factor: CycNum,
}

fn degenerate(msg: impl Into<String>) -> QError {
    QError::DegenerateParameters(msg.into())
}

/// Runs the staged evaluation for k ≡ 0 (mod 4). Any vanishing factor or
/// denominator is reported as `DegenerateParameters`.
pub fn thm_bid_stages(b: &CycNum, root: &ReducedRoot) -> Result<BidStages, QError> {
    let k = root.k();
    if !k.is_multiple_of(4) {
        return Err(degenerate("k must be divisible by 4"));
    }
    if b.is_zero() {
        return Err(degenerate("b = 0"));
    }
    let q = CycNum::from_root(root);
    let q2 = &q * &q;
    let q_inv = CycNum::from_root(&root.pow(-1));
    let b_inv = b.inv()?;
    let half = (k / 2) as i64;

    // (b;q²)_n(−b⁻¹q²)ⁿ for n < k, partial sums at k/2 and k
    let z = -&(&b_inv * &q2);
    let mut poch = one();
    let mut zn = one();
    let mut qb = b.clone();
    let mut lhs = CycNum::zero(1);
    let mut half_sum = CycNum::zero(1);
    for n in 0..k as i64 {
        if n == half {
            half_sum = lhs.clone();
        }
        lhs = &lhs + &(&poch * &zn);
        poch = &poch * &(&one() - &qb);
        qb = &qb * &q2;
        zn = &zn * &z;
    }
    let phk = PhkFactor::new(b, root)?;
    if let Some(i) = phk.factors.iter().position(|f| f.is_zero()) {
        return Err(degenerate(format!("factor {} of p_hk vanishes", i + 1)));
    }
    let split = &phk.factors[0] * &half_sum;

    // Σ_{n<k/2}(b;q²)_n(−b;q²)_n(−b⁻²q²)ⁿq^{−2n²−2n}
    let w = -&(&(&b_inv * &b_inv) * &q2);
    let mut p1 = one();
    let mut p2 = one();
    let mut wn = one();
    let q_inv4 = q_inv.pow(4)?;
    let mut q_pow = one(); // q^{−2n²−2n}
    let mut q_step = q_inv4.clone(); // q^{−4(n+1)}
    let mut qb1 = b.clone();
    let mut qb2 = -b;
    let mut inner = CycNum::zero(1);
    for _ in 0..half {
        inner = &inner + &(&(&(&p1 * &p2) * &wn) * &q_pow);
        p1 = &p1 * &(&one() - &qb1);
        p2 = &p2 * &(&one() - &qb2);
        qb1 = &qb1 * &q2;
        qb2 = &qb2 * &q2;
        wn = &wn * &w;
        q_pow = &q_pow * &q_step;
        q_step = &q_step * &q_inv4;
    }
    let polynomial = &(&phk.factors[0] * &phk.factors[1]) * &inner;

    // Σ_{n<k/4}(b⁻²;q⁻⁴)_n q^{−2n}
    let b_inv2 = &b_inv * &b_inv;
    let q_inv2 = &q_inv * &q_inv;
    let mut poch = one();
    let mut xq = b_inv2.clone();
    let mut qn = one();
    let mut quarter = CycNum::zero(1);
    for _ in 0..k / 4 {
        quarter = &quarter + &(&poch * &qn);
        poch = &poch * &(&one() - &xq);
        xq = &xq * &q_inv4;
        qn = &qn * &q_inv2;
    }
    let reduced = &phk.value * &quarter;

    // φ₁(0; b⁻²q⁴; q⁴; q²) at the root q⁴ of order k/4
    let q4 = q2.pow(2)?;
    let beta = &b_inv2 * &q4;
    let base = root.pow(4);
    let phi = match eval_phi_r(
        &[CycNum::zero(1)],
        std::slice::from_ref(&beta),
        &q2,
        &base,
        PhiMode::FullAtRoot { continuation: true },
    ) {
        Ok(v) => v,
        Err(QError::PoleEncountered { index }) => {
            return Err(degenerate(format!("1 - b^-2 q^{} vanishes", 4 * (index + 1))))
        }
        Err(QError::NotConvergent(m)) => return Err(degenerate(format!("phi_1 resummation: {m}"))),
        Err(e) => return Err(e),
    };
    let coeffs = phi_r_coefficients(&[CycNum::zero(1)], &[beta], &q2, k / 4)?;
    if coeffs.c.is_zero() {
        return Err(degenerate("c_{1,k/4} = 0"));
    }
    let phi_form = (&phk.value * &phi.value).div(&coeffs.c)?;
    let sign_h = if root.h().is_multiple_of(2) { 1 } else { -1 };
    let theorem_factor = &(&one() - &b.pow(-half)?) - &CycNum::from_int(sign_h, 1);
    Ok(BidStages {
        lhs,
        split,
        polynomial,
        reduced,
        phi_form,
        phi1: phi.value,
        phi1_route: phi.route,
        phk,
        theorem_factor,
    })
}

/// The two-parameter identity for one sign at q = ζ_k^h. The right side
/// is p_{h,k}(−1)^h(±b)(1 − b^{−k/2} − (−1)^h)·B_±, where the bracket B_± is
/// given its value at the root through φ₁:
/// B_± = (±b⁻¹q²)/(1 − b⁻²q⁴)·φ₁(0; b⁻²q⁴; q⁴; q²).
pub fn verify_thm_bid(b: &CycNum, sign: Sign, root: &ReducedRoot) -> Report {
    let k = root.k();
    let mut report = Report::new(sign.identity(), Some(root))
        .param("b", b)
        .param("sign", sign);
    report.conductor = Some(lcm(k as u32, b.minimal().conductor()));
    report.route = "staged: split, polynomial identity, quarter sum, phi_1 resummation".into();
    if !k.is_multiple_of(4) {
        return report.with_status(Status::OutOfClass, "k must be divisible by 4");
    }
    let stages = match thm_bid_stages(b, root) {
        Ok(s) => s,
        Err(QError::DegenerateParameters(m)) => return report.with_status(Status::DegenerateParams, m),
        Err(e) => return report.with_status(Status::Fail, e.to_string()),
    };
    report.route = format!("staged; phi_1 by {}", stages.phi1_route);
    report.lhs = exact(&stages.lhs);
    if stages.theorem_factor.is_zero() {
        return report.with_status(Status::DegenerateParams, "1 - b^(-k/2) - (-1)^h = 0");
    }
    let q = CycNum::from_root(root);
    let q2 = &q * &q;
    let s = CycNum::from_int(sign.value(), 1);
    let b_inv = b.inv().expect("b is nonzero");
    let denom = &one() - &(&(&b_inv * &b_inv) * &(&q2 * &q2));
    if denom.is_zero() {
        return report.with_status(Status::DegenerateParams, "1 - b^-2 q^4 = 0");
    }
    let bracket = (&(&(&s * &b_inv) * &q2) * &stages.phi1).div(&denom).expect("nonzero");
    let sign_h = CycNum::from_int(if root.h().is_multiple_of(2) { 1 } else { -1 }, 1);
    let rhs = &(&(&(&stages.phk.value * &sign_h) * &(&s * b)) * &stages.theorem_factor) * &bracket;
    report.rhs = exact(&rhs);
    let chain = [
        ("split", &stages.split),
        ("polynomial", &stages.polynomial),
        ("reduced", &stages.reduced),
        ("phi_form", &stages.phi_form),
    ];
    if let Some((name, _)) = chain.iter().find(|(_, v)| **v != stages.lhs) {
        return report.with_status(Status::Fail, format!("stage '{name}' differs from the left side"));
    }
    if rhs == stages.lhs {
        report.status = Status::Pass;
        report
    } else {
        report.with_status(Status::Fail, "sides differ")
    }
}

/// Σ_{n<k}(b;q)_n zⁿ = b^{k−1}Σ_{n<k}(b;q)_n(q/z;q)_n(z/b)ⁿq^{−n²−n}, exactly.
pub fn verify_lovejoy_245(b: &CycNum, z: &CycNum, root: &ReducedRoot) -> Report {
    let k = root.k();
    let mut report = Report::new(IdentityId::Lovejoy245, Some(root))
        .param("b", b)
        .param("z", z);
    report.conductor = Some(lcm(
        k as u32,
        lcm(b.minimal().conductor(), z.minimal().conductor()),
    ));
    report.route = "finite sums".into();
    if b.is_zero() || z.is_zero() {
        return report.with_status(Status::DegenerateParams, "b and z must be nonzero");
    }
    let q = CycNum::from_root(root);
    let q_inv = CycNum::from_root(&root.pow(-1));
    let z_inv = z.inv().expect("nonzero");
    let ratio = (z * &b.inv().expect("nonzero")).clone();
    let mut lhs = CycNum::zero(1);
    let mut rhs = CycNum::zero(1);
    let mut pb = one();
    let mut pz = one();
    let mut bq = b.clone();
    let mut qz = &q * &z_inv;
    let mut zn = one();
    let mut rn = one();
    let mut qpow = one(); // q^{−n²−n}
    let mut qstep = q_inv.pow(2).expect("root"); // q^{−2(n+1)}
    let q_inv2 = qstep.clone();
    for _ in 0..k {
        lhs = &lhs + &(&pb * &zn);
        rhs = &rhs + &(&(&(&pb * &pz) * &rn) * &qpow);
        pb = &pb * &(&one() - &bq);
        pz = &pz * &(&one() - &qz);
        bq = &bq * &q;
        qz = &qz * &q;
        zn = &zn * z;
        rn = &rn * &ratio;
        qpow = &qpow * &qstep;
        qstep = &qstep * &q_inv2;
    }
    let rhs = &b.pow(k as i64 - 1).expect("nonzero") * &rhs;
    report.lhs = exact(&lhs);
    report.rhs = exact(&rhs);
    if lhs == rhs {
        report.status = Status::Pass;
        report
    } else {
        report.with_status(Status::Fail, "sides differ")
    }
}

fn vector(v: &[CycNum]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join("; "))
}

/// φ_r(a; b; q; t) = c_{r,k}(a,b,t)·(φ_r)_[k](b; a; q⁻¹; t⁻¹). The left side
/// is resummed (it must converge: |u_{r,k}| < 1); at t = 0 the right side is
/// taken as its limit (u_{r,k}/t^k)/(u_{r,1}/t)·(coefficient of t^{−(k−1)}).
pub fn verify_fm_prop21(a: &[CycNum], b: &[CycNum], t: &CycNum, root: &ReducedRoot) -> Report {
    let k = root.k();
    let mut report = Report::new(IdentityId::FmProp21, Some(root))
        .param("r", a.len())
        .param("a", vector(a))
        .param("b", vector(b))
        .param("t", t);
    let cond = a
        .iter()
        .chain(b)
        .chain(std::iter::once(t))
        .fold(k as u32, |acc, x| lcm(acc, x.minimal().conductor()));
    report.conductor = Some(cond);
    report.route = format!("period resummation; truncation after {k} terms");
    match fm_sides(a, b, t, root) {
        Ok((lhs, rhs)) => {
            report.lhs = exact(&lhs);
            report.rhs = exact(&rhs);
            if lhs == rhs {
                report.status = Status::Pass;
                report
            } else {
                report.with_status(Status::Fail, "sides differ")
            }
        }
        Err(QError::NotConvergent(m)) => report.with_status(Status::DivergentInput, m),
        Err(QError::DegenerateParameters(m)) => report.with_status(Status::DegenerateParams, m),
        Err(QError::PoleEncountered { index }) => report.with_status(
            Status::DegenerateParams,
            format!("denominator factor {index} vanishes"),
        ),
        Err(e) => report.with_status(Status::Fail, e.to_string()),
    }
}

fn fm_sides(a: &[CycNum], b: &[CycNum], t: &CycNum, root: &ReducedRoot) -> Result<(CycNum, CycNum), QError> {
    let k = root.k();
    let inverse = root.pow(-1);
    if t.is_zero() {
        // (φ_r)_[k] at t⁻¹ is dominated by its top term as t → 0
        let ratio = |j: u64| -> Result<CycNum, QError> {
            let mut v = one();
            for ai in a {
                v = &v * &(&one() - &ai.pow(j as i64)?);
            }
            for bi in b {
                let d = &one() - &bi.pow(j as i64)?;
                if d.is_zero() {
                    return Err(degenerate(format!("1 - b_i^{j} = 0")));
                }
                v = v.div(&d)?;
            }
            Ok(v)
        };
        let rk = ratio(k)?;
        let r1 = ratio(1)?;
        if r1.is_zero() {
            return Err(degenerate("u_{r,1} vanishes identically in t"));
        }
        // top coefficient: Π (b_i q⁻¹; q⁻¹)_{k−1}/(a_i q⁻¹; q⁻¹)_{k−1}
        let q_inv = CycNum::from_root(&inverse);
        let mut top = one();
        let mut qj = one();
        for _ in 1..k {
            qj = &qj * &q_inv;
            for bi in b {
                top = &top * &(&one() - &(bi * &qj));
            }
            for ai in a {
                let d = &one() - &(ai * &qj);
                if d.is_zero() {
                    return Err(QError::PoleEncountered { index: 0 });
                }
                top = top.div(&d)?;
            }
        }
        let rhs = &rk.div(&r1)? * &top;
        return Ok((one(), rhs));
    }
    let coeffs = phi_r_coefficients(a, b, t, k)?;
    let lhs = eval_phi_r(a, b, t, root, PhiMode::FullAtRoot { continuation: false })?;
    let trunc = eval_phi_r(b, a, &t.inv()?, &inverse, PhiMode::Truncated(k))?;
    Ok((lhs.value, &coeffs.c * &trunc.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn root(h: i64, k: u64) -> ReducedRoot {
        ReducedRoot::new(h, k).unwrap()
    }

    fn rat(n: i64, d: i64) -> CycNum {
        CycNum::from_rational(&Rational::from((n, d)), 1)
    }

    #[test]
    fn small_lines() {
        for id in [IdentityId::PsiLine, IdentityId::FLineA, IdentityId::FLineFrak, IdentityId::PhiLine] {
            let r = verify_antiquantum(id, &root(1, 1));
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        let r = verify_antiquantum(IdentityId::PsiLine, &root(1, 1));
        assert_eq!(r.lhs, Some(Value::Exact(rat(-1, 3))));
        let r = verify_antiquantum(IdentityId::OmegaLine, &root(1, 4));
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.lhs, Some(Value::Exact(rat(1, 3))));
        let r = verify_antiquantum(IdentityId::PsiLine, &root(1, 2));
        assert_eq!(r.status, Status::DivergentInput);
    }

    #[test]
    fn omega_chain_examples() {
        assert_eq!(verify_omega_chain(&root(1, 4)).status, Status::Pass);
        assert_eq!(verify_omega_chain(&root(3, 4)).status, Status::Pass);
        assert_eq!(verify_omega_chain(&root(1, 2)).status, Status::OutOfClass);
    }

    #[test]
    fn thm_bid_examples() {
        let r = verify_thm_bid(&CycNum::from_int(2, 1), Sign::Plus, &root(1, 4));
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let r = verify_thm_bid(&CycNum::from_int(3, 1), Sign::Minus, &root(3, 8));
        assert_eq!(r.status, Status::Pass, "{r:?}");
        // b^{k/2} = 1/2 makes 1 − b^{−k/2} − (−1)^h = 2 − 2 = 0; b² = 1/2 needs
        // a square root of 1/2, i.e. b = (ζ_8 + ζ_8⁻¹)/2
        let z8 = CycNum::zeta(1, 8);
        let b = (&z8 + &z8.inv().unwrap()).scale(&Rational::from((1, 2)));
        let r = verify_thm_bid(&b, Sign::Plus, &root(1, 4));
        assert_eq!(r.status, Status::DegenerateParams, "{r:?}");
    }

    #[test]
    fn lovejoy_examples() {
        let r = verify_lovejoy_245(&CycNum::from_int(2, 1), &CycNum::from_int(3, 1), &root(1, 5));
        assert_eq!(r.status, Status::Pass);
        let r = verify_lovejoy_245(&CycNum::zeta(1, 3), &rat(1, 2), &root(2, 9));
        assert_eq!(r.status, Status::Pass);
        let r = verify_lovejoy_245(&CycNum::from_int(7, 1), &rat(-5, 2), &root(0, 1));
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.lhs, Some(Value::Exact(one())));
    }

    #[test]
    fn fm_examples() {
        let zero = CycNum::zero(1);
        let r = verify_fm_prop21(std::slice::from_ref(&zero), &[rat(1, 2)], &rat(1, 3), &root(1, 3));
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let r = verify_fm_prop21(&[rat(2, 1)], &[rat(1, 2)], &zero, &root(1, 3));
        assert_eq!(r.status, Status::Pass, "{r:?}");
        // u_{1,1} = (1 − a)/(1 − b)·t = 1
        let r = verify_fm_prop21(&[zero], &[rat(1, 2)], &rat(1, 2), &root(0, 1));
        assert_eq!(r.status, Status::DegenerateParams, "{r:?}");
    }
}
