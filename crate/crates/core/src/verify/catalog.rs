use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Serialize, Serializer};

use super::VerifyError;
use crate::qseries::{ArgTransform, SeriesId};

/// Every identity the engine can check. [`IdentityId::OmegaChain`] is an
/// internal cross-check and is not listed in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    PsiLine,
    PhiLine,
    NuLine,
    OmegaLine,
    RhoLine,
    FLineA,
    FLineFrak,
    ChiLineA,
    ChiLineX,
    ThmBidPlus,
    ThmBidMinus,
    Lovejoy245,
    FmProp21,
    Watson1,
    Watson2,
    Watson3,
    Watson4,
    Fine84,
    RadialF,
    OmegaChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Exact,
    Numeric,
}

/// A catalog row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub id: IdentityId,
    pub kind: IdentityKind,
    /// The residue class of root orders (or the domain) the identity claims.
    pub class: &'static str,
    pub statement: &'static str,
}

const ENTRIES: [(IdentityId, &str, IdentityKind, &str, &str); 20] = {
    use IdentityId::*;
    use IdentityKind::*;
    [
        (PsiLine, "psi_line", Exact, "k ≡ 1 (mod 2)", "ψ(−q) = ⅓·(ψ̃_a)_[k](−q)"),
        (PhiLine, "phi_line", Exact, "k ≡ 1 (mod 2)", "φ(−q) = ⅔ + ⅓·(φ̃_a)_[k](−q)"),
        (NuLine, "nu_line", Exact, "k ≡ 0 (mod 4)", "ν(−q) = −⅓·(ν̃_a)_[k](−q)"),
        (OmegaLine, "omega_line", Exact, "k ≡ 0 (mod 4)", "ω(q²) = −⅓·(ω̃_a)_[k](q²)"),
        (RhoLine, "rho_line", Exact, "k ≡ 0 (mod 12)", "ρ(q²) = −⅓·(ρ̃_a)_[k](q²)"),
        (FLineA, "f_line_a", Exact, "k ≡ 1 (mod 2)", "f(q) = ⅓·(f̃_a)_[k](q)"),
        (FLineFrak, "f_line_frak", Exact, "k ≡ 1 (mod 2)", "f(q) = 4/3 + ⅓·(𝔣̃_a)_[k](q)"),
        (ChiLineA, "chi_line_a", Exact, "k ≡ 3 (mod 6)", "χ(q) = ⅓·(χ̃_a)_[k](q)"),
        (ChiLineX, "chi_line_X", Exact, "k ≡ 3 (mod 6)", "χ(q) = ⅓ + ⅓·(X̃_a)_[k](q)"),
        (
            ThmBidPlus,
            "thm_bid_plus",
            Exact,
            "k ≡ 0 (mod 4)",
            "Σ_{n<k}(b;q²)_n(−b⁻¹q²)ⁿ = p_{h,k}(b,q)(−1)^h(+b)(1−b^{−k/2}−(−1)^h)·[Σ q^{n²+n}/(+b⁻¹q²;q²)_{n+1} − Σ q^{ℓ²+ℓ}·Π(1−b⁻²q^{4m+4})⁻¹]",
        ),
        (
            ThmBidMinus,
            "thm_bid_minus",
            Exact,
            "k ≡ 0 (mod 4)",
            "Σ_{n<k}(b;q²)_n(−b⁻¹q²)ⁿ = p_{h,k}(b,q)(−1)^h(−b)(1−b^{−k/2}−(−1)^h)·[Σ q^{n²+n}/(−b⁻¹q²;q²)_{n+1} − Σ q^{ℓ²+ℓ}·Π(1−b⁻²q^{4m+4})⁻¹]",
        ),
        (
            Lovejoy245,
            "lovejoy_245",
            Exact,
            "all k",
            "Σ_{n<k}(b;q)_n zⁿ = b^{k−1}·Σ_{n<k}(b;q)_n(q/z;q)_n(z/b)ⁿq^{−n²−n}",
        ),
        (
            FmProp21,
            "fm_prop21",
            Exact,
            "all k",
            "φ_r(a;b;q;t) = c_{r,k}(a,b,t)·(φ_r)_[k](b;a;q⁻¹;t⁻¹)",
        ),
        (
            Watson1,
            "watson_1",
            Numeric,
            "|q| < 1",
            "2φ(−q) − f(q) = f(q) + 4ψ(−q) = θ₄(0;q)·Π(1+qⁿ)⁻¹",
        ),
        (
            Watson2,
            "watson_2",
            Numeric,
            "|q| < 1",
            "4χ(q) − f(q) = 3θ₄(0;q³)²·Π(1−qⁿ)⁻¹",
        ),
        (
            Watson3,
            "watson_3",
            Numeric,
            "|q| < 1",
            "2ρ(q) + ω(q) = ¾q^{−3/4}θ₂(0;q^{3/2})²·Π(1−q^{2n})⁻¹",
        ),
        (
            Watson4,
            "watson_4",
            Numeric,
            "|q| < 1",
            "ν(−q) − qω(q²) = ½q^{−1/4}θ₂(0;q)·Π(1+q^{2n})",
        ),
        (
            Fine84,
            "fine_84",
            Numeric,
            "|q| < 1",
            "(±b⁻¹q²)·φ₁(0; b⁻²q⁴; q⁴; q²) = (1−b⁻²q⁴)·[Σ q^{n²+n}/(±b⁻¹q²;q²)_{n+1} − Σ q^{ℓ²+ℓ}·Π(1−b⁻²q^{4m+4})⁻¹]",
        ),
        (
            RadialF,
            "radial_f",
            Numeric,
            "even root order K",
            "f(q) − (−1)^{K/2}(q;q²)_∞θ₄(0;q) = O(1) as q → ζ radially",
        ),
        (
            OmegaChain,
            "omega_chain",
            Exact,
            "k ≡ 0 (mod 4)",
            "ω(q²) = q⁻¹ν(−q)",
        ),
    ]
};

impl IdentityId {
    pub const ALL: [IdentityId; 20] = {
        let mut out = [IdentityId::PsiLine; 20];
        let mut i = 0;
        while i < 20 {
            out[i] = ENTRIES[i].0;
            i += 1;
        }
        out
    };

    fn row(self) -> &'static (IdentityId, &'static str, IdentityKind, &'static str, &'static str) {
        ENTRIES
            .iter()
            .find(|e| e.0 == self)
            .expect("every id has a row")
    }

    pub fn name(self) -> &'static str {
        self.row().1
    }

    pub fn kind(self) -> IdentityKind {
        self.row().2
    }

    pub fn in_catalog(self) -> bool {
        self != IdentityId::OmegaChain
    }

    /// The antiquantum line data for the nine mock theta lines.
    pub fn line(self) -> Option<AntiquantumLine> {
        use IdentityId::*;
        use SeriesId as S;
        let third = |n: i64| Rational::from((n, 3));
        let (mock, t, companion, constant, mult) = match self {
            PsiLine => (S::Psi, ArgTransform::NEGATE, S::PsiA, third(0), third(1)),
            PhiLine => (S::Phi, ArgTransform::NEGATE, S::PhiA, third(2), third(1)),
            NuLine => (S::Nu, ArgTransform::NEGATE, S::NuA, third(0), third(-1)),
            OmegaLine => (S::Omega, ArgTransform::SQUARE, S::OmegaA, third(0), third(-1)),
            RhoLine => (S::Rho, ArgTransform::SQUARE, S::RhoA, third(0), third(-1)),
            FLineA => (S::F, ArgTransform::IDENTITY, S::FA, third(0), third(1)),
            FLineFrak => (S::F, ArgTransform::IDENTITY, S::FrakFA, third(4), third(1)),
            ChiLineA => (S::Chi, ArgTransform::IDENTITY, S::ChiA, third(0), third(1)),
            ChiLineX => (S::Chi, ArgTransform::IDENTITY, S::XA, third(1), third(1)),
            _ => return None,
        };
        Some(AntiquantumLine {
            mock,
            t,
            companion,
            constant,
            mult,
        })
    }

    /// Whether the identity claims root order k.
    pub fn claims(self, k: u64) -> bool {
        use IdentityId::*;
        match self {
            PsiLine | PhiLine | FLineA | FLineFrak => k % 2 == 1,
            NuLine | OmegaLine | ThmBidPlus | ThmBidMinus | OmegaChain => k.is_multiple_of(4),
            RhoLine => k.is_multiple_of(12),
            ChiLineA | ChiLineX => k % 6 == 3,
            RadialF => k.is_multiple_of(2),
            Lovejoy245 | FmProp21 | Watson1 | Watson2 | Watson3 | Watson4 | Fine84 => true,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        ENTRIES
            .iter()
            .find(|e| e.1 == s)
            .map(|e| e.0)
            .ok_or_else(|| VerifyError::Precondition(format!("unknown identity '{s}'")))
    }
}

/// One line of the mock theta table: mock(t(q)) = constant + mult·(companion)_[k](t(q)).
#[derive(Clone, Debug, PartialEq)]
pub struct AntiquantumLine {
    pub mock: SeriesId,
    pub t: ArgTransform,
    pub companion: SeriesId,
    pub constant: Rational,
    pub mult: Rational,
}

/// The catalogued identities, in order.
pub fn catalog() -> Vec<CatalogEntry> {
    ENTRIES
        .iter()
        .filter(|e| e.0.in_catalog())
        .map(|&(id, _, kind, class, statement)| CatalogEntry {
            id,
            kind,
            class,
            statement,
        })
        .collect()
}

/// Expands a command-line identity name: a full id, or a short family name
/// such as `nu`, `f`, `chi`, `thm_bid` or `watson`.
pub fn resolve_alias(name: &str) -> Result<Vec<IdentityId>, VerifyError> {
    use IdentityId::*;
    let ids: &[IdentityId] = match name {
        "psi" => &[PsiLine],
        "phi" => &[PhiLine],
        "nu" => &[NuLine],
        "omega" => &[OmegaLine],
        "rho" => &[RhoLine],
        "f" => &[FLineA, FLineFrak],
        "chi" => &[ChiLineA, ChiLineX],
        "thm_bid" => &[ThmBidPlus, ThmBidMinus],
        "lovejoy" => &[Lovejoy245],
        "fm" => &[FmProp21],
        "watson" => &[Watson1, Watson2, Watson3, Watson4],
        "fine" => &[Fine84],
        "radial" => &[RadialF],
        _ => return name.parse::<IdentityId>().map(|id| vec![id]),
    };
    Ok(ids.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_nineteen_entries() {
        let c = catalog();
        assert_eq!(c.len(), 19);
        assert!(c.iter().all(|e| e.id != IdentityId::OmegaChain));
    }

    #[test]
    fn names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert_eq!(resolve_alias("chi").unwrap().len(), 2);
        assert_eq!(resolve_alias("watson").unwrap().len(), 4);
        assert!(resolve_alias("bogus").is_err());
    }

    #[test]
    fn nine_lines() {
        assert_eq!(IdentityId::ALL.iter().filter(|i| i.line().is_some()).count(), 9);
    }
}
