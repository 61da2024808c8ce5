//! Candidate KPI registry, hypothesis-test plans, and condensation of the
//! candidate list into the statistically validated one.
//!
//! A plan names pairs of KPIs and the test to run on them. Each test yields
//! a [`TestVerdict`]; H0 ("the first factor has no significant effect on the
//! second") is rejected only when `p < alpha`. [`condense`] then keeps the
//! outcome KPI plus every KPI involved in at least one rejected H0.

mod condense;
mod plan;
mod run;

use thiserror::Error;

use crate::dataset::DatasetError;

pub use condense::{condense, correlation_sign_report, CondensedKpiList, DropReason, DroppedKpi, Relationship};
pub use plan::{CandidateKpi, HypothesisTest, KpiCategory, Method, Plan, Registry, DEFAULT_ALPHA};
pub use run::{run_plan, run_test, Decision, TestDetail, TestVerdict, VerdictOutcome};

#[derive(Debug, Error)]
pub enum KpiError {
    #[error("test plan is empty")]
    EmptyPlan,
    #[error("duplicate test id '{0}'")]
    DuplicateTestId(String),
    #[error("unknown KPI '{0}'")]
    UnknownKpi(String),
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("invalid test '{test_id}': {reason}")]
    InvalidTest { test_id: String, reason: String },
    #[error("test '{test_id}' failed: {source}")]
    TestFailed {
        test_id: String,
        #[source]
        source: DatasetError,
    },
    #[error("invalid plan document: {0}")]
    PlanDocument(#[from] serde_json::Error),
}
