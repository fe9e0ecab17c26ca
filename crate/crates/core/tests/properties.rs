use proptest::prelude::*;
use rug::Rational;

use qmock::cyclotomic::{reduce_fraction, CycNum, ReducedRoot};
use qmock::eta::{Cusp, EtaQuotient};
use qmock::numeric::BigComplex;
use qmock::qseries::{eval_series_numeric, ArgTransform, SeriesId};
use qmock::verify::{run_suite, verify_antiquantum, verify_lovejoy_245, IdentityId, Status, SuiteConfig, Value};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Small elements of Q(ζ_n): Σ c_j ζ_n^j with few non-zero rational c_j.
fn cyc() -> impl Strategy<Value = CycNum> {
    (1u32..=12).prop_flat_map(|n| {
        prop::collection::vec((0..n as i64, -5i64..=5, 1i64..=4), 1..4).prop_map(move |terms| {
            terms.into_iter().fold(CycNum::zero(n), |acc, (j, a, b)| {
                &acc + &CycNum::zeta(j, n).scale(&Rational::from((a, b)))
            })
        })
    })
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    let scale = 1.0 + a.0.hypot(a.1).max(b.0.hypot(b.1));
    (a.0 - b.0).hypot(a.1 - b.1) < 1e-9 * scale
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert_eq!(&a * &inv, CycNum::one(1));
        }
    }

    #[test]
    fn embedding_is_a_ring_map(a in cyc(), b in cyc()) {
        prop_assert!(close((&a * &b).embed_f64(), cmul(a.embed_f64(), b.embed_f64())));
        let s = (&a + &b).embed_f64();
        let (x, y) = (a.embed_f64(), b.embed_f64());
        prop_assert!(close(s, (x.0 + y.0, x.1 + y.1)));
    }

    #[test]
    fn text_round_trip(a in cyc()) {
        let back: CycNum = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn galois_is_multiplicative(a in cyc(), b in cyc(), j in 1i64..60) {
        let (ca, cb) = (a.conductor() as u64, b.conductor() as u64);
        let n = ca / gcd(ca, cb) * cb;
        prop_assume!(gcd(j as u64, n) == 1);
        let lift = |x: &CycNum| x.coerce(n as u32).unwrap();
        let (a, b) = (lift(&a), lift(&b));
        prop_assert_eq!((&a * &b).galois(j), &a.galois(j) * &b.galois(j));
    }

    #[test]
    fn reduced_roots(h in -200i64..200, k in 1u64..200) {
        let r = reduce_fraction(h, k);
        prop_assert!(r.h() < r.k());
        prop_assert_eq!(gcd(r.h(), r.k()), 1);
        // same point on the circle: h/k − h'/k' is an integer
        let diff = Rational::from((h, k)) - Rational::from((r.h(), r.k()));
        prop_assert!(diff.is_integer());
    }

    #[test]
    fn eta_orders_add(
        r1 in prop::collection::vec(-2i64..=2, 6),
        r2 in prop::collection::vec(-2i64..=2, 6),
        d_index in 0usize..6,
    ) {
        let divisors = [1u64, 2, 3, 4, 6, 12];
        let build = |r: &[i64]| EtaQuotient::new(12, divisors.iter().zip(r).map(|(&d, &e)| (d, 24 * e)));
        let (Ok(f), Ok(g)) = (build(&r1), build(&r2)) else { return Ok(()) };
        let Ok(fg) = f.mul(&g) else { return Ok(()) };
        let cusp = Cusp::new(1, divisors[d_index]).unwrap();
        prop_assert_eq!(
            fg.cusp_order(&cusp).unwrap(),
            f.cusp_order(&cusp).unwrap() + g.cusp_order(&cusp).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lovejoy_left_side_and_status(
        b in (-4i64..=4, 1i64..=3),
        z in (-4i64..=4, 1i64..=3),
        h in 0i64..40,
        k in 1u64..=10,
    ) {
        prop_assume!(b.0 != 0 && z.0 != 0);
        let root = ReducedRoot::new(h, k).unwrap();
        let b = CycNum::from_rational(&Rational::from(b), 1);
        let z = CycNum::from_rational(&Rational::from(z), 1);
        let r = verify_lovejoy_245(&b, &z, &root);
        prop_assert!(matches!(r.status, Status::Pass | Status::DegenerateParams), "{:?}", r);
        if r.status == Status::Pass {
            // Σ_{n<k} (b;q)_n zⁿ, accumulated directly
            let q = CycNum::from_root(&root);
            let (mut sum, mut poch, mut zn, mut qn) =
                (CycNum::zero(1), CycNum::one(1), CycNum::one(1), CycNum::one(1));
            for _ in 0..root.k() {
                sum = &sum + &(&poch * &zn);
                poch = &poch * &(&CycNum::one(1) - &(&b * &qn));
                zn = &zn * &z;
                qn = &qn * &q;
            }
            prop_assert_eq!(r.lhs, Some(Value::Exact(sum)));
        }
    }

    #[test]
    fn nu_line_holds_for_every_conjugate(m in 1u64..=6) {
        let k = 4 * m;
        for root in ReducedRoot::all_of_order(k) {
            prop_assert!(verify_antiquantum(IdentityId::NuLine, &root).passed());
        }
    }

    #[test]
    fn f_in_the_disk_matches_direct_summation(r in 0.0f64..0.7, t in 0.0f64..std::f64::consts::TAU) {
        let q = (r * t.cos(), r * t.sin());
        // f(q) = Σ q^{n²} / (−q;q)_n²
        let (mut sum, mut qn, mut den, mut qsq) = ((1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0));
        for n in 1..80 {
            qn = cmul(qn, q);
            den = cmul(den, (1.0 + qn.0, qn.1));
            // q^{n²} = q^{(n−1)²}·q^{2n−1}
            for _ in 0..(2 * n - 1) {
                qsq = cmul(qsq, q);
            }
            let d2 = cmul(den, den);
            let term = cdiv(qsq, d2);
            sum = (sum.0 + term.0, sum.1 + term.1);
        }
        let v = eval_series_numeric(SeriesId::F, &ArgTransform::IDENTITY, &BigComplex::from_f64(128, q.0, q.1), 1e-30)
            .unwrap();
        prop_assert!(close((v.re().to_f64(), v.im().to_f64()), sum));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn suite_order_ignores_worker_count(k_max in 1u64..=12, jobs in 2usize..=4) {
        let ids = [IdentityId::PhiLine, IdentityId::ChiLineX, IdentityId::OmegaChain];
        let run = |jobs| run_suite(&SuiteConfig { k_max, jobs: Some(jobs), ..SuiteConfig::with_identities(&ids) });
        prop_assert_eq!(run(1), run(jobs));
    }
}
