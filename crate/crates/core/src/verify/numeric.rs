use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use serde::Serialize;

use crate::cyclotomic::ReducedRoot;
use crate::eta::{product_as_eta, radial_point};
use crate::numeric::BigComplex;
use crate::qseries::{
    escalate, euler_sum, eval_pochhammer_product, eval_product_numeric, lg, mag, phi_r_numeric,
    pochhammer_inf, quadratic_sum, relative, series_numeric, sum_by_ratios, theta, ArgTransform,
    PochPiece, QError, SeriesId,
};

use super::{IdentityId, Report, Sign, Status, Value, VerifyError};

/// Working precision of the numeric suite, in bits.
pub const NUMERIC_PREC: u32 = 256;
/// Residual tolerance of the numeric suite.
pub const NUMERIC_TOL: f64 = 1e-40;
/// Seed of the standard sample points.
pub const SAMPLE_SEED: u64 = 0x9e37_79b9_7f4a_7c15;
/// Bound on the modulus of the radial bracket.
pub const RADIAL_CAP: f64 = 10.0;

/// `n` pseudo-random points, uniform in the disk |q| ≤ 1/2. Coordinates are
/// binary fractions, so the points are exact at every precision.
pub fn sample_points(n: usize, seed: u64, prec: u32) -> Vec<BigComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = 0.5 * rng.random::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.random::<f64>();
            BigComplex::from_f64(prec, r * t.cos(), r * t.sin())
        })
        .collect()
}

fn point_label(q: &BigComplex) -> String {
    q.to_decimal(20)
}

fn residual(a: &BigComplex, b: &BigComplex) -> Float {
    mag(&(a - b))
}

fn finish(mut report: Report, lhs: BigComplex, rhs: BigComplex, extra: Option<Float>, tol: f64) -> Report {
    let r = residual(&lhs, &rhs);
    let worst = match &extra {
        Some(m) if *m > r => m.clone(),
        _ => r.clone(),
    };
    report.lhs = Some(Value::Numeric(lhs));
    report.rhs = Some(Value::Numeric(rhs));
    report = report.param("residual", format!("{:.3e}", r.to_f64()));
    if let Some(m) = extra {
        report = report.param("residual_middle", format!("{:.3e}", m.to_f64()));
    }
    if worst < tol {
        report.status = Status::Pass;
        report
    } else {
        report.with_status(Status::Fail, format!("residual {:.3e} exceeds {tol:e}", worst.to_f64()))
    }
}

fn series(id: SeriesId, t: ArgTransform, q: &BigComplex, tol_lg: f64) -> Result<BigComplex, QError> {
    series_numeric(id, &t, q, tol_lg)
}

fn div(a: &BigComplex, b: &BigComplex) -> Result<BigComplex, QError> {
    (a / b).ok_or(QError::PoleEncountered { index: 0 })
}

/// Both sides of one of the four relations, plus the middle expression of
/// the first.
fn watson_sides(
    relation: u8,
    q: &BigComplex,
    tol_lg: f64,
) -> Result<(BigComplex, BigComplex, Option<BigComplex>), QError> {
    use SeriesId::*;
    let t = tol_lg - 6.0;
    let (id, neg, sq) = (ArgTransform::IDENTITY, ArgTransform::NEGATE, ArgTransform::SQUARE);
    let prec = q.prec();
    let int = |n: i64| Rational::from(n);
    let q2 = q * q;
    Ok(match relation {
        1 => {
            let f = series(F, id, q, t)?;
            let lhs = &series(Phi, neg, q, t)?.scale_rational(&int(2)) - &f;
            let mid = &f + &series(Psi, neg, q, t)?.scale_rational(&int(4));
            let ratio = div(&euler_sum(q, t)?, &euler_sum(&q2, t)?)?;
            (lhs, &theta(Theta4, q, t)? * &ratio, Some(mid))
        }
        2 => {
            let lhs = &series(Chi, id, q, t)?.scale_rational(&int(4)) - &series(F, id, q, t)?;
            let th = theta(Theta4, &q.powi(3).expect("power"), t)?;
            let rhs = div(&(&th * &th).scale_rational(&int(3)), &euler_sum(q, t)?)?;
            (lhs, rhs, None)
        }
        3 => {
            // ¾q^{−3/4}θ₂(q^{3/2})² = 3(Σ q^{3n(n+1)/2})²
            let lhs = &series(Rho, id, q, t)?.scale_rational(&int(2)) + &series(Omega, id, q, t)?;
            let s = quadratic_sum(q, 3, 3, false, t)?;
            let rhs = div(&(&s * &s).scale_rational(&int(3)), &euler_sum(&q2, t)?)?;
            (lhs, rhs, None)
        }
        4 => {
            let lhs = &series(Nu, neg, q, t)? - &(q * &series(Omega, sq, q, t)?);
            let prod = div(&euler_sum(&(&q2 * &q2), t)?, &euler_sum(&q2, t)?)?;
            let front = match q.pow_rational(&Rational::from((-1, 4))) {
                Some(p) => (&p * &theta(Theta2, q, t)?).scale_rational(&Rational::from((1, 2))),
                // the q^{1/4} of θ₂ cancels; its remaining series starts at 1
                None => BigComplex::one(prec),
            };
            (lhs, &front * &prod, None)
        }
        _ => panic!("relation must be 1, 2, 3 or 4"),
    })
}

fn watson_id(relation: u8) -> IdentityId {
    match relation {
        1 => IdentityId::Watson1,
        2 => IdentityId::Watson2,
        3 => IdentityId::Watson3,
        4 => IdentityId::Watson4,
        _ => panic!("relation must be 1, 2, 3 or 4"),
    }
}

/// One of the four mock theta relations at a point of the disk. The third
/// is checked with θ₂(q^{3/2})² written as 4q^{3/4}(Σ q^{3n(n+1)/2})², which
/// avoids choosing a branch of q^{3/2}.
pub fn verify_watson(relation: u8, q: &BigComplex, tol: f64) -> Result<Report, QError> {
    let report = Report::new(watson_id(relation), None).param("q", point_label(q));
    let (lhs, rhs, mid) = watson_sides(relation, q, tol.log2())?;
    let mut report = finish(report, lhs, rhs.clone(), mid.map(|m| residual(&m, &rhs)), tol);
    report.route = "certified disk summation".into();
    Ok(report)
}

/// The bracketed series of the two-parameter identity, multiplied through:
/// (±b⁻¹q²)·φ₁(0; b⁻²q⁴; q⁴; q²) against
/// (1 − b⁻²q⁴)·(Σ q^{n²+n}/(±b⁻¹q²;q²)_{n+1} − Σ q^{ℓ²+ℓ}/(b⁻²q⁴;q⁴)_∞).
pub fn verify_fine(b: &BigComplex, sign: Sign, q: &BigComplex, tol: f64) -> Result<Report, QError> {
    let mut report = Report::new(IdentityId::Fine84, None)
        .param("b", b.to_decimal(20))
        .param("sign", sign)
        .param("q", point_label(q));
    report.route = "certified disk summation".into();
    let t = tol.log2() - 8.0;
    let prec = q.prec().max(b.prec());
    let b_inv = b.inv().ok_or_else(|| QError::DegenerateParameters("b = 0".into()))?;
    let q2 = q * q;
    let q4 = &q2 * &q2;
    let beta = &(&b_inv * &b_inv) * &q4;
    let sb = &b_inv.scale_rational(&Rational::from(sign.value())) * &q2;

    let phi1 = phi_r_numeric(&[BigComplex::zero(prec)], std::slice::from_ref(&beta), &q2, &q4, t)?;
    let lhs = &sb * &phi1;

    let r2 = q2.abs_f64() * (1.0 + 1e-12);
    let sb_abs = sb.abs_f64();
    let one = BigComplex::one(prec);
    let d0 = &one - &sb;
    if crate::qseries::vanishes(&d0) {
        return Err(QError::PoleEncountered { index: 0 });
    }
    let first = (&one / &d0).expect("nonzero");
    let mut q2j = one.clone();
    let series_t = sum_by_ratios(
        first,
        |_| {
            q2j = &q2j * &q2;
            let d = &one - &(&sb * &q2j);
            if crate::qseries::vanishes(&d) {
                return Err(QError::PoleEncountered { index: 0 });
            }
            Ok((&q2j / &d).expect("nonzero"))
        },
        |j| {
            let x = r2.powi(j as i32);
            if sb_abs * x < 1.0 {
                x / (1.0 - sb_abs * x)
            } else {
                f64::INFINITY
            }
        },
        t,
    )?;
    let s = quadratic_sum(q, 2, 2, false, t)?;
    let p = pochhammer_inf(&beta, &q4, t)?;
    let theta_part = div(&s, &p)?;
    let rhs = &(&one - &beta) * &(&series_t - &theta_part);
    Ok(finish(report, lhs, rhs, None, tol))
}

/// One bracket value f(q) − (−1)^{K/2}(q;q²)_∞θ₄(0;q) at q = ρζ, to `prec`
/// bits absolute. Both terms grow without bound toward the root, so they
/// are computed to whatever relative accuracy the cancellation requires.
fn bracket_at(root: &ReducedRoot, rho: f64, prec: u32) -> Result<BigComplex, QError> {
    let tol_lg = -(prec as f64);
    let point = |p: u32| radial_point(p, rho, root);
    let f = escalate(prec, |p| {
        series_numeric(SeriesId::F, &ArgTransform::IDENTITY, &point(p), tol_lg)
    })?;
    let mut size = lg(&mag(&f)).max(0.0);
    loop {
        let bits = (size - tol_lg + 16.0).ceil() as u32;
        let e1 = relative(bits, bits, |p, t| euler_sum(&point(p), t))?;
        let e2 = relative(bits, bits, |p, t| {
            euler_sum(&point(p).powi(2).expect("power"), t)
        })?;
        let th = relative(bits, bits, |p, t| theta(SeriesId::Theta4, &point(p), t))?;
        let g = &div(&e1, &e2)? * &th;
        let g_size = lg(&mag(&g));
        if g_size > size + 8.0 {
            size = g_size;
            continue;
        }
        let g = if (root.k() / 2).is_multiple_of(2) { g } else { -&g };
        return Ok((&f - &g).with_prec(prec));
    }
}

fn check_radial_root(root: &ReducedRoot, radii: &[f64]) -> Result<(), VerifyError> {
    if !root.k().is_multiple_of(2) {
        return Err(VerifyError::Precondition(format!(
            "the root order must be even, got {}",
            root.k()
        )));
    }
    for (i, &r) in radii.iter().enumerate() {
        if !(r < 1.0 - crate::qseries::DISK_MARGIN) {
            return Err(QError::OutsideDisk {
                margin: crate::qseries::DISK_MARGIN,
            }
            .into());
        }
        if !(r > 0.0) || (i > 0 && r <= radii[i - 1]) {
            return Err(VerifyError::Precondition("radii must increase within (0, 1)".into()));
        }
    }
    Ok(())
}

/// The bracket f(q) − (−1)^{K/2}(q;q²)_∞θ₄(0;q) along q = ρζ for a root ζ of
/// even order K.
pub fn radial_probe(root: &ReducedRoot, radii: &[f64], prec: u32) -> Result<Vec<BigComplex>, VerifyError> {
    check_radial_root(root, radii)?;
    radii
        .iter()
        .map(|&rho| bracket_at(root, rho, prec).map_err(VerifyError::from))
        .collect()
}

/// f(q) alone along the same path, for contrast.
pub fn radial_mock(root: &ReducedRoot, radii: &[f64], prec: u32) -> Result<Vec<BigComplex>, VerifyError> {
    check_radial_root(root, radii)?;
    radii
        .iter()
        .map(|&rho| {
            escalate(prec, |p| {
                series_numeric(
                    SeriesId::F,
                    &ArgTransform::IDENTITY,
                    &radial_point(p, rho, root),
                    -(prec as f64),
                )
            })
            .map(|v| v.with_prec(prec))
            .map_err(VerifyError::from)
        })
        .collect()
}

/// Boundedness verdict for a radial sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialCheck {
    pub moduli: Vec<f64>,
    pub max_modulus: f64,
    /// The last three moduli each at least double the one before.
    pub blowup: bool,
    pub bounded: bool,
}

impl RadialCheck {
    pub fn new(values: &[BigComplex], cap: f64) -> Self {
        let moduli: Vec<f64> = values.iter().map(|v| mag(v).to_f64()).collect();
        let max_modulus = moduli.iter().cloned().fold(0.0, f64::max);
        let n = moduli.len();
        let blowup = n >= 3 && moduli[n - 2] > 2.0 * moduli[n - 3] && moduli[n - 1] > 2.0 * moduli[n - 2];
        Self {
            bounded: max_modulus < cap && !blowup,
            moduli,
            max_modulus,
            blowup,
        }
    }
}

/// The radial bracket at one root as a report.
pub fn radial_report(root: &ReducedRoot, radii: &[f64], prec: u32) -> Report {
    let radii_text: Vec<String> = radii.iter().map(|r| r.to_string()).collect();
    let mut report = Report::new(IdentityId::RadialF, Some(root))
        .param("radii", radii_text.join(","))
        .param("prec", prec);
    report.route = "adaptive-precision disk summation".into();
    let values = match radial_probe(root, radii, prec) {
        Ok(v) => v,
        Err(VerifyError::Precondition(m)) => return report.with_status(Status::OutOfClass, m),
        Err(e) => return report.with_status(Status::Fail, e.to_string()),
    };
    let check = RadialCheck::new(&values, RADIAL_CAP);
    let moduli: Vec<String> = check.moduli.iter().map(|m| format!("{m:.6e}")).collect();
    report = report
        .param("moduli", moduli.join(","))
        .param("cap", RADIAL_CAP);
    report.lhs = values.last().cloned().map(Value::Numeric);
    if check.bounded {
        report.status = Status::Pass;
        report
    } else if check.blowup {
        report.with_status(Status::Fail, "moduli grow monotonically over the last three radii")
    } else {
        report.with_status(Status::Fail, format!("modulus {:.3e} exceeds the cap", check.max_modulus))
    }
}

/// The nine mock = companion identities inside the disk: mock(q) equals the
/// companion series plus rational multiples of the products u, v, w, x.
pub const COMPANION_IDENTITIES: [(SeriesId, SeriesId, &[(i64, i64, SeriesId)]); 9] = {
    use SeriesId::*;
    [
        (F, FA, &[(1, 1, UProd)]),
        (F, FrakFA, &[(-1, 1, UProd)]),
        (Omega, OmegaA, &[(-1, 1, VProd)]),
        (Psi, PsiA, &[]),
        (Phi, PhiA, &[]),
        (Nu, NuA, &[]),
        (Chi, ChiA, &[(1, 4, UProd), (1, 1, WProd)]),
        (Chi, XA, &[(-1, 4, UProd), (1, 1, WProd)]),
        (Rho, RhoA, &[(1, 2, VProd), (1, 1, XProd)]),
    ]
};

/// |mock(q) − companion side| for entry `i` of [`COMPANION_IDENTITIES`].
pub fn companion_residual(i: usize, q: &BigComplex, tol: f64) -> Result<f64, QError> {
    let (mock, companion, products) = COMPANION_IDENTITIES[i];
    let t = tol.log2() - 6.0;
    let id = ArgTransform::IDENTITY;
    let lhs = series(mock, id, q, t)?;
    let mut rhs = series(companion, id, q, t)?;
    for &(n, d, p) in products {
        rhs = &rhs + &series(p, id, q, t)?.scale_rational(&Rational::from((n, d)));
    }
    Ok(residual(&lhs, &rhs).to_f64())
}

/// |(−q;q)_∞ − 1/(q;q²)_∞|.
pub fn euler_residual(q: &BigComplex, tol: f64) -> Result<f64, QError> {
    let t = tol / 8.0;
    let a = eval_pochhammer_product(&[PochPiece::new(-1, 1, 1, 1)], q, t)?;
    let b = eval_pochhammer_product(&[PochPiece::new(1, 1, 2, -1)], q, t)?;
    Ok(residual(&a, &b).to_f64())
}

/// Residuals of θ₂(0;q) = 2q^{1/4}Π(1−q^{4n})/(1−q^{4n−2}) and
/// θ₄(0;q) = Π(1−qⁿ)²/(1−q^{2n}), series against product.
pub fn jacobi_residuals(q: &BigComplex, tol: f64) -> Result<[f64; 2], QError> {
    let t = tol / 8.0;
    let tl = t.log2();
    let th2 = theta(SeriesId::Theta2, q, tl)?;
    let p2 = eval_pochhammer_product(&[PochPiece::new(1, 4, 4, 1), PochPiece::new(1, 2, 4, -1)], q, t)?;
    let front = q
        .pow_rational(&Rational::from((1, 4)))
        .unwrap_or_else(|| BigComplex::zero(q.prec()))
        .scale_rational(&Rational::from(2));
    let th4 = theta(SeriesId::Theta4, q, tl)?;
    let p4 = eval_pochhammer_product(&[PochPiece::new(1, 1, 1, 2), PochPiece::new(1, 2, 2, -1)], q, t)?;
    Ok([residual(&th2, &(&front * &p2)).to_f64(), residual(&th4, &p4).to_f64()])
}

/// |product − its eta-quotient form| for u, v, w or x.
pub fn eta_rewrite_residual(id: SeriesId, q: &BigComplex, tol: f64) -> Result<f64, VerifyError> {
    let (c, shift, f) = product_as_eta(id)
        .ok_or_else(|| VerifyError::Precondition(format!("{id} has no eta-quotient form")))?;
    let direct = eval_product_numeric(id, q, tol / 8.0)?;
    let via_eta = f
        .eval_numeric(q, &shift, tol / 8.0)
        .map_err(|e| VerifyError::Precondition(e.to_string()))?
        .scale_rational(&c);
    Ok(residual(&direct, &via_eta).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(NUMERIC_PREC, re, im)
    }

    #[test]
    fn watson_at_sample_points() {
        for (rel, q) in [(4, c(0.2, 0.0)), (1, c(0.0, 0.0)), (3, c(0.1, 0.0)), (2, c(-0.3, 0.2))] {
            let r = verify_watson(rel, &q, NUMERIC_TOL).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
    }

    #[test]
    fn fine_examples() {
        for sign in [Sign::Plus, Sign::Minus] {
            let r = verify_fine(&c(2.0, 0.0), sign, &c(0.15, 0.0), NUMERIC_TOL).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
            let r = verify_fine(&c(2.0, 0.0), sign, &c(0.0, 0.0), NUMERIC_TOL).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        // b = q⁴ makes b⁻²q⁸ = 1
        let q = c(0.3, 0.1);
        let b = q.powi(4).unwrap();
        assert!(matches!(
            verify_fine(&b, Sign::Plus, &q, NUMERIC_TOL),
            Err(QError::PoleEncountered { .. })
        ));
    }

    #[test]
    fn samples_are_reproducible_and_inside() {
        let a = sample_points(20, SAMPLE_SEED, 64);
        assert_eq!(a, sample_points(20, SAMPLE_SEED, 64));
        assert!(a.iter().all(|q| q.abs_f64() <= 0.5));
    }

    #[test]
    fn residual_helpers() {
        let q = c(0.31, -0.22);
        for i in 0..9 {
            assert!(companion_residual(i, &q, NUMERIC_TOL).unwrap() < NUMERIC_TOL, "{i}");
        }
        assert!(euler_residual(&q, NUMERIC_TOL).unwrap() < NUMERIC_TOL);
        assert!(jacobi_residuals(&q, NUMERIC_TOL).unwrap().iter().all(|r| *r < NUMERIC_TOL));
        for id in [SeriesId::UProd, SeriesId::VProd, SeriesId::WProd, SeriesId::XProd] {
            assert!(eta_rewrite_residual(id, &q, NUMERIC_TOL).unwrap() < NUMERIC_TOL, "{id}");
        }
    }
}
