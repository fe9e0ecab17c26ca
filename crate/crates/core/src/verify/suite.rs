use std::time::Instant;

use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::cyclotomic::{CycNum, ReducedRoot};
use crate::numeric::BigComplex;
use crate::qseries::QError;

use super::exact::{verify_antiquantum, verify_fm_prop21, verify_lovejoy_245, verify_omega_chain, verify_thm_bid, Sign};
use super::numeric::{radial_report, sample_points, verify_fine, verify_watson, NUMERIC_PREC, NUMERIC_TOL, SAMPLE_SEED};
use super::{IdentityId, Report, Status};

/// One parameter set of the hypergeometric identity.
#[derive(Clone, Debug, PartialEq)]
pub struct FmCase {
    pub a: Vec<CycNum>,
    pub b: Vec<CycNum>,
    pub t: CycNum,
}

/// What a suite run covers.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub identities: Vec<IdentityId>,
    pub k_max: u64,
    /// Per-family ceilings on k, applied on top of `k_max`.
    pub thm_bid_k_max: u64,
    pub lovejoy_k_max: u64,
    pub fm_k_max: u64,
    pub b_grid: Vec<CycNum>,
    pub lovejoy_grid: Vec<CycNum>,
    pub fm_cases: Vec<FmCase>,
    /// Also run root orders outside each identity's class.
    pub exploratory: bool,
    pub samples: usize,
    pub seed: u64,
    pub prec: u32,
    pub tol: f64,
    pub fine_b: Vec<i64>,
    pub radial_orders: Vec<u64>,
    pub radii: Vec<f64>,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    pub timings: bool,
}

fn rat(n: i64, d: i64) -> CycNum {
    CycNum::from_rational(&Rational::from((n, d)), 1)
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let zeta3 = CycNum::zeta(1, 3);
        let zeta8 = CycNum::zeta(1, 8);
        let mut fm_cases = Vec::new();
        let a1 = [rat(0, 1), rat(2, 1), rat(-1, 2), zeta3.clone()];
        let b1 = [rat(1, 2), rat(-2, 1), rat(3, 1), zeta8.clone()];
        for a in &a1 {
            for b in &b1 {
                for t in [rat(1, 3), rat(-1, 2), rat(2, 1)] {
                    fm_cases.push(FmCase {
                        a: vec![a.clone()],
                        b: vec![b.clone()],
                        t,
                    });
                }
            }
        }
        let a2 = [[rat(0, 1), rat(2, 1)], [rat(-1, 2), zeta3.clone()]];
        let b2 = [[rat(1, 2), rat(3, 1)], [rat(-2, 1), zeta8.clone()]];
        for a in &a2 {
            for b in &b2 {
                for t in [rat(1, 3), rat(-1, 2)] {
                    fm_cases.push(FmCase {
                        a: a.to_vec(),
                        b: b.to_vec(),
                        t,
                    });
                }
            }
        }
        Self {
            identities: IdentityId::ALL.to_vec(),
            k_max: 48,
            thm_bid_k_max: 24,
            lovejoy_k_max: 30,
            fm_k_max: 20,
            b_grid: vec![rat(2, 1), rat(3, 1), rat(-2, 1), rat(1, 2), zeta3.clone(), zeta8.clone()],
            lovejoy_grid: vec![
                rat(2, 1),
                rat(-2, 1),
                rat(3, 1),
                rat(-3, 1),
                rat(1, 2),
                rat(-1, 2),
                zeta3,
                zeta8,
            ],
            fm_cases,
            exploratory: false,
            samples: 20,
            seed: SAMPLE_SEED,
            prec: NUMERIC_PREC,
            tol: NUMERIC_TOL,
            fine_b: vec![2, 3],
            radial_orders: vec![2, 4, 6],
            radii: vec![0.9, 0.99, 0.999, 0.9999],
            jobs: None,
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn with_identities(ids: &[IdentityId]) -> Self {
        let mut ids = ids.to_vec();
        ids.sort();
        ids.dedup();
        Self {
            identities: ids,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
enum Task {
    Line(IdentityId, ReducedRoot),
    Chain(ReducedRoot),
    Bid(Sign, usize, ReducedRoot),
    Lovejoy(usize, usize, ReducedRoot),
    Fm(usize, ReducedRoot),
    Watson(u8, usize),
    Fine(usize, Sign, usize),
    Radial(ReducedRoot),
}

fn roots_upto(k_max: u64) -> impl Iterator<Item = ReducedRoot> {
    (1..=k_max).flat_map(ReducedRoot::all_of_order)
}

fn tasks(cfg: &SuiteConfig) -> Vec<Task> {
    use IdentityId::*;
    let mut out = Vec::new();
    for &id in &cfg.identities {
        match id {
            _ if id.line().is_some() => {
                // the documented divergence of ψ(−q) at k ≡ 2 (mod 4) is always shown
                let wanted =
                    |k: u64| id.claims(k) || cfg.exploratory || (id == PsiLine && k % 4 == 2);
                out.extend(
                    roots_upto(cfg.k_max)
                        .filter(|r| wanted(r.k()))
                        .map(|r| Task::Line(id, r)),
                );
            }
            OmegaChain => out.extend(
                roots_upto(cfg.k_max)
                    .filter(|r| id.claims(r.k()) || cfg.exploratory)
                    .map(Task::Chain),
            ),
            ThmBidPlus | ThmBidMinus => {
                let sign = if id == ThmBidPlus { Sign::Plus } else { Sign::Minus };
                for r in roots_upto(cfg.k_max.min(cfg.thm_bid_k_max))
                    .filter(|r| id.claims(r.k()) || cfg.exploratory)
                {
                    out.extend((0..cfg.b_grid.len()).map(|i| Task::Bid(sign, i, r)));
                }
            }
            Lovejoy245 => {
                let n = cfg.lovejoy_grid.len();
                for r in roots_upto(cfg.k_max.min(cfg.lovejoy_k_max)) {
                    for i in 0..n {
                        out.extend((0..n).map(|j| Task::Lovejoy(i, j, r)));
                    }
                }
            }
            FmProp21 => {
                for r in roots_upto(cfg.k_max.min(cfg.fm_k_max)) {
                    out.extend((0..cfg.fm_cases.len()).map(|i| Task::Fm(i, r)));
                }
            }
            Watson1 | Watson2 | Watson3 | Watson4 if cfg.k_max > 0 => {
                let rel = match id {
                    Watson1 => 1,
                    Watson2 => 2,
                    Watson3 => 3,
                    _ => 4,
                };
                out.extend((0..cfg.samples).map(|s| Task::Watson(rel, s)));
            }
            Fine84 if cfg.k_max > 0 => {
                for b in 0..cfg.fine_b.len() {
                    for sign in [Sign::Plus, Sign::Minus] {
                        out.extend((0..cfg.samples).map(|s| Task::Fine(b, sign, s)));
                    }
                }
            }
            RadialF => {
                for &order in cfg.radial_orders.iter().filter(|&&k| k <= cfg.k_max) {
                    out.extend(ReducedRoot::all_of_order(order).into_iter().map(Task::Radial));
                }
            }
            _ => {}
        }
    }
    out
}

fn numeric_failure(report: Report, e: QError) -> Report {
    match e {
        QError::PoleEncountered { .. } | QError::DegenerateParameters(_) => {
            report.with_status(Status::DegenerateParams, e.to_string())
        }
        _ => report.with_status(Status::Fail, e.to_string()),
    }
}

fn run_task(task: &Task, cfg: &SuiteConfig, samples: &[BigComplex]) -> Report {
    match task {
        Task::Line(id, r) => verify_antiquantum(*id, r),
        Task::Chain(r) => verify_omega_chain(r),
        Task::Bid(sign, i, r) => verify_thm_bid(&cfg.b_grid[*i], *sign, r),
        Task::Lovejoy(i, j, r) => verify_lovejoy_245(&cfg.lovejoy_grid[*i], &cfg.lovejoy_grid[*j], r),
        Task::Fm(i, r) => {
            let c = &cfg.fm_cases[*i];
            verify_fm_prop21(&c.a, &c.b, &c.t, r)
        }
        Task::Watson(rel, s) => {
            let q = &samples[*s];
            verify_watson(*rel, q, cfg.tol).unwrap_or_else(|e| {
                let id = IdentityId::ALL[IdentityId::Watson1 as usize + *rel as usize - 1];
                numeric_failure(Report::new(id, None).param("q", q.to_decimal(20)), e)
            })
        }
        Task::Fine(b, sign, s) => {
            let q = &samples[*s];
            let bv = BigComplex::from_rational(cfg.prec, &Rational::from(cfg.fine_b[*b]));
            verify_fine(&bv, *sign, q, cfg.tol).unwrap_or_else(|e| {
                let r = Report::new(IdentityId::Fine84, None)
                    .param("b", cfg.fine_b[*b])
                    .param("sign", sign)
                    .param("q", q.to_decimal(20));
                numeric_failure(r, e)
            })
        }
        Task::Radial(r) => radial_report(r, &cfg.radii, cfg.prec),
    }
}

/// Runs every selected verification. Reports come back in a fixed order
/// (identity, then k, h and parameters) whatever the degree of parallelism.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<Report> {
    let work = tasks(cfg);
    let needs_samples = work
        .iter()
        .any(|t| matches!(t, Task::Watson(..) | Task::Fine(..)));
    let samples = if needs_samples {
        sample_points(cfg.samples, cfg.seed, cfg.prec)
    } else {
        Vec::new()
    };
    let run = || -> Vec<Report> {
        work.par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut r = run_task(t, cfg, &samples);
                if cfg.timings {
                    r.millis = Some(start.elapsed().as_millis() as u64);
                }
                r
            })
            .collect()
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

/// Status counts over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub out_of_class: usize,
    pub divergent_input: usize,
    pub degenerate_params: usize,
}

pub fn summarize(reports: &[Report]) -> Summary {
    let mut s = Summary {
        total: reports.len(),
        ..Summary::default()
    };
    for r in reports {
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::OutOfClass => s.out_of_class += 1,
            Status::DivergentInput => s.divergent_input += 1,
            Status::DegenerateParams => s.degenerate_params += 1,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_suite_to_sixteen() {
        let cfg = SuiteConfig {
            k_max: 16,
            ..SuiteConfig::with_identities(&[IdentityId::NuLine])
        };
        let reports = run_suite(&cfg);
        let ks: Vec<u64> = reports.iter().map(|r| r.k.unwrap()).collect();
        assert_eq!(reports.len(), 2 + 4 + 4 + 8);
        assert!(ks.windows(2).all(|w| w[0] <= w[1]));
        assert!(reports.iter().all(|r| r.passed()));
    }

    #[test]
    fn empty_when_k_max_is_zero() {
        let cfg = SuiteConfig {
            k_max: 0,
            ..SuiteConfig::default()
        };
        assert!(run_suite(&cfg).is_empty());
    }

    #[test]
    fn rho_only_at_multiples_of_twelve() {
        let cfg = SuiteConfig {
            k_max: 24,
            ..SuiteConfig::with_identities(&[IdentityId::RhoLine])
        };
        let reports = run_suite(&cfg);
        assert!(reports.iter().all(|r| matches!(r.k, Some(12) | Some(24))));
        assert_eq!(reports.len(), 4 + 8);
    }

    #[test]
    fn psi_to_two() {
        let cfg = SuiteConfig {
            k_max: 2,
            ..SuiteConfig::with_identities(&[IdentityId::PsiLine])
        };
        let statuses: Vec<Status> = run_suite(&cfg).iter().map(|r| r.status).collect();
        assert_eq!(statuses, vec![Status::Pass, Status::DivergentInput]);
    }
}
