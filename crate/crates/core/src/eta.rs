//! Eta-quotients Π η(δτ)^{r_δ}: the two mod-24 admissibility conditions,
//! exact orders of vanishing at cusps, pullback of cusps under τ ↦ τ/m, the
//! vanishing statements for the quotients behind u, v, w, x, and a radial
//! probe of the theta-times-product expression that vanishes at roots of
//! order divisible by 4.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::ReducedRoot;
use crate::numeric::BigComplex;
use crate::qseries::{euler_sum, quadratic_sum, relative, QError, SeriesId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EtaError {
    #[error("invalid eta-quotient: {0}")]
    InvalidQuotient(String),
    #[error("invalid cusp: {0}")]
    InvalidCusp(String),
    #[error("not admissible: sum of delta*r = 0 mod 24 is {first}, sum of (N/delta)*r = 0 mod 24 is {second}")]
    NotAdmissible { first: bool, second: bool },
    #[error("cusp denominator {d} does not divide the level {level}")]
    CuspLevelMismatch { d: u64, level: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Series(#[from] QError),
}

fn gcd(a: u64, b: u64) -> u64 {
    Integer::from(a).gcd(&Integer::from(b)).to_u64().expect("fits")
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// F(τ) = Π_{δ | N} η(δτ)^{r_δ} at level N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
}

impl EtaQuotient {
    /// Builds a quotient; repeated divisors have their exponents added and
    /// zero exponents are dropped.
    pub fn new(
        level: u64,
        exponents: impl IntoIterator<Item = (u64, i64)>,
    ) -> Result<Self, EtaError> {
        if level == 0 {
            return Err(EtaError::InvalidQuotient("level must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (delta, r) in exponents {
            if delta == 0 || !level.is_multiple_of(delta) {
                return Err(EtaError::InvalidQuotient(format!(
                    "{delta} does not divide the level {level}"
                )));
            }
            *map.entry(delta).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        if map.is_empty() {
            return Err(EtaError::InvalidQuotient("all exponents are zero".into()));
        }
        Ok(Self {
            level,
            exponents: map,
        })
    }

    /// Parses `"δ:r,δ:r,…"`, e.g. `"12:3,6:-2"`.
    pub fn parse(text: &str, level: u64) -> Result<Self, EtaError> {
        let bad = |msg: String| EtaError::InvalidQuotient(msg);
        let mut pairs = Vec::new();
        for item in text.split(',') {
            let (d, r) = item
                .split_once(':')
                .ok_or_else(|| bad(format!("expected delta:r, found '{}'", item.trim())))?;
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad divisor '{}'", d.trim())))?;
            let r: i64 = r
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad exponent '{}'", r.trim())))?;
            pairs.push((d, r));
        }
        Self::new(level, pairs)
    }

    /// The least level at which these exponents make sense.
    pub fn minimal_level(exponents: &[(u64, i64)]) -> u64 {
        exponents.iter().fold(1, |acc, &(d, _)| lcm(acc, d.max(1)))
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn with_level(&self, level: u64) -> Result<Self, EtaError> {
        Self::new(level, self.exponents.iter().map(|(&d, &r)| (d, r)))
    }

    /// G(τ) = F(mτ).
    pub fn rescale(&self, m: u64) -> Self {
        Self {
            level: self.level * m,
            exponents: self.exponents.iter().map(|(&d, &r)| (d * m, r)).collect(),
        }
    }

    /// Product of two quotients at the same level.
    pub fn mul(&self, other: &Self) -> Result<Self, EtaError> {
        if self.level != other.level {
            return Err(EtaError::InvalidQuotient(format!(
                "levels differ ({} and {})",
                self.level, other.level
            )));
        }
        let all = self.exponents.iter().chain(other.exponents.iter());
        Self::new(self.level, all.map(|(&d, &r)| (d, r)))
    }

    /// Σ δ r_δ; the quotient's q-expansion starts at q^{Σδr/24}.
    pub fn weight_sum(&self) -> i64 {
        self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum()
    }

    /// Truth of Σ δ r_δ ≡ 0 and Σ (N/δ) r_δ ≡ 0 (mod 24), separately.
    pub fn check_conditions(&self) -> (bool, bool) {
        let first = self.weight_sum().rem_euclid(24) == 0;
        let second = self
            .exponents
            .iter()
            .map(|(&d, &r)| Integer::from(self.level / d) * r)
            .fold(Integer::new(), |acc, x| acc + x)
            .mod_u(24)
            == 0;
        (first, second)
    }

    /// Exact order of vanishing at the cusp c/d:
    /// (N/24) Σ_δ gcd(d,δ)² r_δ / (gcd(d, N/d)·d·δ).
    pub fn cusp_order(&self, cusp: &Cusp) -> Result<Rational, EtaError> {
        let (first, second) = self.check_conditions();
        if !(first && second) {
            return Err(EtaError::NotAdmissible { first, second });
        }
        let (n, d) = (self.level, cusp.d);
        if n % d != 0 {
            return Err(EtaError::CuspLevelMismatch { d, level: n });
        }
        let g = gcd(d, n / d);
        let mut sum = Rational::new();
        for (&delta, &r) in &self.exponents {
            let gd = gcd(d, delta);
            let num = Integer::from(gd) * gd * r;
            let den = Integer::from(g) * d * delta;
            sum += Rational::from((num, den));
        }
        Ok(sum * Rational::from((n, 24)))
    }

    /// q^{shift + Σδr/24} Π_δ (q^δ; q^δ)_∞^{r_δ}, i.e. q^{shift}·F(τ) for
    /// q = e^{2πiτ}, with the principal branch for the combined power of q.
    pub fn eval_numeric(
        &self,
        q: &BigComplex,
        shift: &Rational,
        tol: f64,
    ) -> Result<BigComplex, EtaError> {
        let total: i64 = self.exponents.values().map(|r| r.abs()).sum();
        let tol_lg = tol.log2() - 8.0 - (total as f64).log2();
        let mut acc = BigComplex::one(q.prec());
        for (&delta, &r) in &self.exponents {
            let x = q.powi(delta as i64).expect("positive power");
            let e = euler_sum(&x, tol_lg)?;
            acc = &acc * &e.powi(r).ok_or(QError::PoleEncountered { index: delta })?;
        }
        let exp = Rational::from((self.weight_sum(), 24)) + shift;
        if exp == 0 {
            return Ok(acc);
        }
        let pre = q
            .pow_rational(&exp)
            .ok_or(QError::PoleEncountered { index: 0 })?;
        Ok(&pre * &acc)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exponents
            .iter()
            .rev()
            .map(|(d, r)| format!("{d}:{r}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The eta-quotient forms of the products u, v, w, x: the product equals
/// constant · q^{shift} · F(τ).
pub fn product_as_eta(id: SeriesId) -> Option<(Rational, Rational, EtaQuotient)> {
    let (c, shift, ex): (Rational, Rational, &[(u64, i64)]) = match id {
        SeriesId::UProd => (Rational::from(1), Rational::from((1, 24)), &[(1, 3), (2, -2)]),
        SeriesId::VProd => (Rational::from(1), Rational::from((-2, 3)), &[(2, 3), (1, -2)]),
        SeriesId::WProd => (
            Rational::from((3, 4)),
            Rational::from((1, 24)),
            &[(3, 4), (6, -2), (1, -1)],
        ),
        SeriesId::XProd => (
            Rational::from((3, 2)),
            Rational::from((-2, 3)),
            &[(6, 4), (3, -2), (2, -1)],
        ),
        _ => return None,
    };
    let level = EtaQuotient::minimal_level(ex);
    let f = EtaQuotient::new(level, ex.iter().copied()).expect("valid table entry");
    Some((c, shift, f))
}

/// A cusp c/d with gcd(c, d) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cusp {
    c: i64,
    d: u64,
}

impl Cusp {
    pub fn new(c: i64, d: u64) -> Result<Self, EtaError> {
        if d == 0 {
            return Err(EtaError::InvalidCusp("denominator must be positive".into()));
        }
        if gcd(c.unsigned_abs(), d) != 1 {
            return Err(EtaError::InvalidCusp(format!("{c}/{d} is not reduced")));
        }
        Ok(Self { c, d })
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn d(&self) -> u64 {
        self.d
    }
}

impl std::str::FromStr for Cusp {
    type Err = EtaError;
    fn from_str(s: &str) -> Result<Self, EtaError> {
        let bad = || EtaError::InvalidCusp(format!("expected c/d, found '{s}'"));
        let (c, d) = s.split_once('/').ok_or_else(bad)?;
        let c: i64 = c.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        Self::new(c, d)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.c, self.d)
    }
}

/// The reduced form of h/(m·k): k' = mk/gcd(h, mk), h' = h/gcd(h, mk).
pub fn cusp_pullback(m: u64, cusp: &Cusp) -> Cusp {
    let mk = m * cusp.d;
    let g = gcd(cusp.c.unsigned_abs(), mk);
    Cusp {
        c: cusp.c / g as i64,
        d: mk / g,
    }
}

/// The four vanishing statements for the quotients behind u, v, w, x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VanishingPart {
    /// η³(τ)/η²(2τ) at odd k.
    I,
    /// η³(2τ)/η²(τ) at even k.
    II,
    /// η⁴(3τ)/(η²(6τ)η(τ)) at k ≡ 3 (mod 6).
    III,
    /// η⁴(6τ)/(η²(3τ)η(2τ)) at k ≡ 0 (mod 6).
    IV,
}

impl VanishingPart {
    pub const ALL: [VanishingPart; 4] = [Self::I, Self::II, Self::III, Self::IV];

    fn exponents(self) -> &'static [(u64, i64)] {
        match self {
            Self::I => &[(1, 3), (2, -2)],
            Self::II => &[(2, 3), (1, -2)],
            Self::III => &[(3, 4), (6, -2), (1, -1)],
            Self::IV => &[(6, 4), (3, -2), (2, -1)],
        }
    }

    pub fn quotient(self) -> EtaQuotient {
        let ex = self.exponents();
        EtaQuotient::new(EtaQuotient::minimal_level(ex), ex.iter().copied())
            .expect("valid table entry")
    }

    /// Whether the statement covers cusps with denominator k.
    pub fn claims(self, k: u64) -> bool {
        match self {
            Self::I => k % 2 == 1,
            Self::II => k.is_multiple_of(2),
            Self::III => k % 6 == 3,
            Self::IV => k.is_multiple_of(6),
        }
    }

    /// Least m with Σ (mδ) r_δ ≡ 0 (mod 24), so that F(mτ) is admissible.
    pub fn scale(self) -> u64 {
        let s = self.quotient().weight_sum().unsigned_abs();
        24 / gcd(24, s)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
            Self::IV => "iv",
        }
    }
}

impl std::str::FromStr for VanishingPart {
    type Err = EtaError;
    fn from_str(s: &str) -> Result<Self, EtaError> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| EtaError::Precondition(format!("unknown part '{s}' (expected i, ii, iii or iv)")))
    }
}

/// The order of the rescaled quotient G(τ) = F(mτ) at one pulled-back cusp.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspCheck {
    /// Representative cusp h/k of F.
    pub cusp: Cusp,
    /// The corresponding cusp h'/k' of G.
    pub pulled: Cusp,
    pub level: u64,
    #[serde(serialize_with = "ser_rational")]
    pub order: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingEntry {
    pub k: u64,
    /// Whether k lies in the statement's residue class; orders outside it
    /// are reported without any claim.
    pub claimed: bool,
    pub checks: Vec<CuspCheck>,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingReport {
    pub part: VanishingPart,
    pub scale: u64,
    pub d_max: u64,
    pub entries: Vec<VanishingEntry>,
    /// Claimed denominators with a non-positive order.
    pub counterexamples: Vec<u64>,
}

impl VanishingReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn vanishing_entry(part: VanishingPart, g_base: &EtaQuotient, m: u64, k: u64) -> Result<VanishingEntry, EtaError> {
    let keys = g_base
        .exponents()
        .keys()
        .fold(1, |acc, &d| lcm(acc, d));
    // gcd(h, mk) runs over the divisors of m prime to k; h = g realizes each
    let mut checks = Vec::new();
    for g in (1..=m).filter(|g| m.is_multiple_of(*g) && gcd(*g, k) == 1) {
        let cusp = Cusp::new(g as i64, k)?;
        let pulled = cusp_pullback(m, &cusp);
        let level = 24 * keys * pulled.d;
        let order = g_base.with_level(level)?.cusp_order(&pulled)?;
        checks.push(CuspCheck {
            cusp,
            pulled,
            level,
            order,
        });
    }
    let positive = checks.iter().all(|c| c.order > 0);
    Ok(VanishingEntry {
        k,
        claimed: part.claims(k),
        checks,
        positive,
    })
}

/// Checks the vanishing statement `part` for every cusp denominator
/// k ≤ d_max by rescaling F to the admissible G(τ) = F(mτ), pulling each
/// cusp h/k back to h/(mk), and evaluating G's order there at level
/// 24·lcm(δ)·k'.
pub fn verify_vanishing_lemma(part: VanishingPart, d_max: u64) -> Result<VanishingReport, EtaError> {
    let m = part.scale();
    let g_base = part.quotient().rescale(m);
    let entries: Vec<VanishingEntry> = (1..=d_max)
        .into_par_iter()
        .map(|k| vanishing_entry(part, &g_base, m, k))
        .collect::<Result<_, _>>()?;
    let counterexamples = entries
        .iter()
        .filter(|e| e.claimed && !e.positive)
        .map(|e| e.k)
        .collect();
    Ok(VanishingReport {
        part,
        scale: m,
        d_max,
        entries,
        counterexamples,
    })
}

/// ρ·ζ_k^h at working precision `prec`.
pub(crate) fn radial_point(prec: u32, rho: f64, root: &ReducedRoot) -> BigComplex {
    BigComplex::polar_root(prec, &Float::with_val(prec, rho), root.h() as i64, root.k())
}

fn check_radii(radii: &[f64]) -> Result<(), EtaError> {
    for (i, &r) in radii.iter().enumerate() {
        if !(r < 1.0 - crate::qseries::DISK_MARGIN) {
            return Err(QError::OutsideDisk {
                margin: crate::qseries::DISK_MARGIN,
            }
            .into());
        }
        if !(r > 0.0) || (i > 0 && r <= radii[i - 1]) {
            return Err(EtaError::Precondition(
                "radii must increase within (0, 1)".into(),
            ));
        }
    }
    Ok(())
}

/// (q^δ; q^δ)_∞ at q = ρζ to `bits` bits of relative accuracy.
fn euler_relative(rho: f64, root: &ReducedRoot, delta: i64, bits: u32) -> Result<BigComplex, QError> {
    relative(bits, bits, |p, t| {
        let q = radial_point(p, rho, root);
        euler_sum(&q.powi(delta).expect("positive power"), t)
    })
}

fn probe_precondition(root: &ReducedRoot, radii: &[f64]) -> Result<(), EtaError> {
    if !root.k().is_multiple_of(4) {
        return Err(EtaError::Precondition(format!(
            "the root order must be divisible by 4, got {}",
            root.k()
        )));
    }
    check_radii(radii)
}

/// (Σ_{ℓ≥0} q^{ℓ²+ℓ}) · Π_{m≥0} 1/(1 − q^{4m+2}) at q = ρ·ζ_k^h, for each
/// radius, to `prec` bits of relative accuracy (the values become tiny near
/// the circle, so the working precision is raised as needed). The product is
/// taken as (q⁴;q⁴)_∞/(q²;q²)_∞.
pub fn theta_product_probe(root: &ReducedRoot, radii: &[f64], prec: u32) -> Result<Vec<BigComplex>, EtaError> {
    probe_precondition(root, radii)?;
    radii
        .iter()
        .map(|&rho| {
            let s = relative(prec, prec, |p, t| {
                quadratic_sum(&radial_point(p, rho, root), 2, 2, false, t)
            })?;
            let e4 = euler_relative(rho, root, 4, prec + 8)?;
            let e2 = euler_relative(rho, root, 2, prec + 8)?;
            let v = (&(&s * &e4) / &e2).ok_or(QError::PoleEncountered { index: 0 })?;
            Ok(v.with_prec(prec))
        })
        .collect()
}

/// The same expression through its eta-quotient form
/// q^{−1/3} η³(4τ)/η²(2τ) = (q⁴;q⁴)³_∞/(q²;q²)²_∞.
pub fn theta_product_eta_form(root: &ReducedRoot, radii: &[f64], prec: u32) -> Result<Vec<BigComplex>, EtaError> {
    probe_precondition(root, radii)?;
    radii
        .iter()
        .map(|&rho| {
            let e4 = euler_relative(rho, root, 4, prec + 8)?;
            let e2 = euler_relative(rho, root, 2, prec + 8)?;
            let num = e4.powi(3).expect("positive power");
            let den = e2.powi(2).expect("positive power");
            let v = (&num / &den).ok_or(QError::PoleEncountered { index: 0 })?;
            Ok(v.with_prec(prec))
        })
        .collect()
}
