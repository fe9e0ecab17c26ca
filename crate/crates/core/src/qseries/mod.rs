//! q-series objects: q-Pochhammer symbols, the seven third order mock theta
//! functions, their companion series, φ_r hypergeometric series, Jacobi
//! thetas and the eta-type products u, v, w, x.
//!
//! Every series with a term generator is evaluated three ways from the same
//! generator: exact truncation at a root of unity, exact period resummation
//! at a root of unity, and certified numeric summation inside the disk.

mod cyclic;
mod disk;
mod exact;
mod generator;
mod phir;
mod resum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{CycError, CycNum, ReducedRoot};

pub use disk::{
    euler_function, eval_pochhammer_product, eval_product_numeric, eval_series_numeric,
    PochPiece, DISK_MARGIN, MAX_PREC,
};
pub(crate) use disk::{
    escalate, euler_sum, lg, mag, pochhammer_inf, quadratic_sum, relative, series_numeric,
    sum_by_ratios, theta, vanishes,
};
pub use exact::{
    eval_companion_infinite_check, eval_mock_at_root, in_convergence_table, qpochhammer,
    truncated_series, DivergenceEvidence,
};
pub use generator::{generator, Generator, Lp};
pub use phir::{eval_phi_r, eval_phi_r_numeric, phi_r_coefficients, PhiMode, PhiRCoefficients};
pub(crate) use phir::phi_r_numeric;
pub use resum::{modulus_below, Resummed};

/// Identifier of every series object known to the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesId {
    F,
    Omega,
    Psi,
    Phi,
    Nu,
    Chi,
    Rho,
    FA,
    FrakFA,
    OmegaA,
    PsiA,
    PhiA,
    NuA,
    ChiA,
    XA,
    RhoA,
    UProd,
    VProd,
    WProd,
    XProd,
    Theta2,
    Theta4,
    QPochhammerInf,
}

const SERIES_NAMES: [(SeriesId, &str); 23] = [
    (SeriesId::F, "f"),
    (SeriesId::Omega, "omega"),
    (SeriesId::Psi, "psi"),
    (SeriesId::Phi, "phi"),
    (SeriesId::Nu, "nu"),
    (SeriesId::Chi, "chi"),
    (SeriesId::Rho, "rho"),
    (SeriesId::FA, "f_a"),
    (SeriesId::FrakFA, "frak_f_a"),
    (SeriesId::OmegaA, "omega_a"),
    (SeriesId::PsiA, "psi_a"),
    (SeriesId::PhiA, "phi_a"),
    (SeriesId::NuA, "nu_a"),
    (SeriesId::ChiA, "chi_a"),
    (SeriesId::XA, "X_a"),
    (SeriesId::RhoA, "rho_a"),
    (SeriesId::UProd, "u_prod"),
    (SeriesId::VProd, "v_prod"),
    (SeriesId::WProd, "w_prod"),
    (SeriesId::XProd, "x_prod"),
    (SeriesId::Theta2, "theta2"),
    (SeriesId::Theta4, "theta4"),
    (SeriesId::QPochhammerInf, "q_pochhammer_inf"),
];

impl SeriesId {
    pub fn all() -> impl Iterator<Item = SeriesId> {
        SERIES_NAMES.iter().map(|&(id, _)| id)
    }

    pub fn name(self) -> &'static str {
        SERIES_NAMES
            .iter()
            .find(|(id, _)| *id == self)
            .map(|&(_, n)| n)
            .expect("every id is named")
    }

    /// One of the seven mock theta functions.
    pub fn is_mock(self) -> bool {
        use SeriesId::*;
        matches!(self, F | Omega | Psi | Phi | Nu | Chi | Rho)
    }

    /// One of the nine companion series.
    pub fn is_companion(self) -> bool {
        use SeriesId::*;
        matches!(
            self,
            FA | FrakFA | OmegaA | PsiA | PhiA | NuA | ChiA | XA | RhoA
        )
    }
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesId {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self, QError> {
        SERIES_NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|&(id, _)| id)
            .ok_or_else(|| QError::UnsupportedSeries(format!("unknown series '{s}'")))
    }
}

/// How the series argument is obtained from q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// q
    Identity,
    /// −q
    Negate,
    /// q²
    Square,
}

/// Argument transform plus an optional prefactor q^e applied to the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArgTransform {
    pub kind: TransformKind,
    pub prefactor: i64,
}

impl ArgTransform {
    pub const IDENTITY: Self = Self::new(TransformKind::Identity);
    pub const NEGATE: Self = Self::new(TransformKind::Negate);
    pub const SQUARE: Self = Self::new(TransformKind::Square);

    pub const fn new(kind: TransformKind) -> Self {
        Self { kind, prefactor: 0 }
    }

    pub const fn with_prefactor(self, e: i64) -> Self {
        Self {
            kind: self.kind,
            prefactor: e,
        }
    }

    /// The exact series argument for q = ζ_k^h.
    pub fn apply_root(&self, q: &ReducedRoot) -> ReducedRoot {
        match self.kind {
            TransformKind::Identity => *q,
            TransformKind::Negate => q.negate(),
            TransformKind::Square => q.pow(2),
        }
    }
}

impl fmt::Display for ArgTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.kind {
            TransformKind::Identity => "id",
            TransformKind::Negate => "neg",
            TransformKind::Square => "sq",
        };
        f.write_str(s)?;
        if self.prefactor != 0 {
            write!(f, "*q^{}", self.prefactor)?;
        }
        Ok(())
    }
}

impl FromStr for ArgTransform {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self, QError> {
        match s {
            "id" => Ok(Self::IDENTITY),
            "neg" => Ok(Self::NEGATE),
            "sq" => Ok(Self::SQUARE),
            _ => Err(QError::UnsupportedSeries(format!(
                "unknown transform '{s}' (expected id, neg or sq)"
            ))),
        }
    }
}

/// An exact evaluation together with the route that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: CycNum,
    pub route: String,
    pub period: u64,
    pub terms_summed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("unsupported: {0}")]
    UnsupportedSeries(String),
    #[error("pole: denominator factor {index} vanishes")]
    PoleEncountered { index: u64 },
    #[error("series does not converge: {0}")]
    NotConvergent(String),
    #[error("{series}({transform}) at a root of order {k} is outside the convergence table and fails the convergence audit")]
    DivergentClass {
        series: SeriesId,
        transform: ArgTransform,
        k: u64,
    },
    #[error("|q| must be below 1 - {margin:e}")]
    OutsideDisk { margin: f64 },
    #[error("tolerance {tol:e} cannot be certified at {prec} bits (about {needed} bits needed)")]
    TolUnreachable { tol: f64, prec: u32, needed: u32 },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error(transparent)]
    Field(#[from] CycError),
}
