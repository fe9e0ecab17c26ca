//! The identity catalog and the verification engine.
//!
//! Exact identities are decided by equality in a cyclotomic field; numeric
//! ones by a residual below a tolerance at certified precision. Every
//! outcome, including the ones where an identity does not apply, is a
//! [`Report`] with a machine-readable [`Status`].

mod catalog;
mod exact;
mod numeric;
mod suite;

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{CycNum, ReducedRoot};
use crate::numeric::BigComplex;
use crate::qseries::QError;

pub use catalog::{catalog, resolve_alias, AntiquantumLine, CatalogEntry, IdentityId, IdentityKind};
pub use exact::{
    thm_bid_stages, verify_antiquantum, verify_fm_prop21, verify_lovejoy_245, verify_omega_chain,
    verify_thm_bid, BidStages, PhkFactor, Sign,
};
pub use numeric::{
    companion_residual, eta_rewrite_residual, euler_residual, jacobi_residuals, radial_mock,
    radial_probe, radial_report, sample_points, verify_fine, verify_watson, RadialCheck,
    COMPANION_IDENTITIES, NUMERIC_PREC, NUMERIC_TOL, RADIAL_CAP, SAMPLE_SEED,
};
pub use suite::{run_suite, summarize, FmCase, SuiteConfig, Summary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Series(#[from] QError),
}

/// Outcome of one verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The root or parameters lie outside the identity's stated class.
    OutOfClass,
    /// The series that should converge does not (or hits a pole).
    DivergentInput,
    /// A denominator or normalizing factor of the identity vanishes.
    DegenerateParams,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::OutOfClass => "out_of_class",
            Status::DivergentInput => "divergent_input",
            Status::DegenerateParams => "degenerate_params",
        }
    }
}

/// Significant digits used when numeric values are written out.
pub const REPORT_DIGITS: usize = 50;

/// One side of an identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(CycNum),
    Numeric(BigComplex),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Exact(v) => v.to_string(),
            Value::Numeric(z) => z.to_decimal(REPORT_DIGITS),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        match self {
            Value::Exact(v) => m.serialize_entry("exact", &v.to_string())?,
            Value::Numeric(z) => m.serialize_entry("numeric", &z.to_decimal(REPORT_DIGITS))?,
        }
        m.end()
    }
}

/// A self-contained verification record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub identity: IdentityId,
    pub h: Option<u64>,
    pub k: Option<u64>,
    pub params: BTreeMap<String, String>,
    pub lhs: Option<Value>,
    pub rhs: Option<Value>,
    pub status: Status,
    pub route: String,
    pub conductor: Option<u32>,
    /// Why the status is not `pass`, when there is something to say.
    pub detail: Option<String>,
    /// Wall time, recorded only on request so that report bodies stay
    /// reproducible.
    pub millis: Option<u64>,
}

impl Report {
    pub(crate) fn new(identity: IdentityId, root: Option<&ReducedRoot>) -> Self {
        Self {
            identity,
            h: root.map(|r| r.h()),
            k: root.map(|r| r.k()),
            params: BTreeMap::new(),
            lhs: None,
            rhs: None,
            status: Status::Fail,
            route: String::new(),
            conductor: None,
            detail: None,
            millis: None,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn with_status(mut self, status: Status, detail: impl Into<String>) -> Self {
        self.status = status;
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
