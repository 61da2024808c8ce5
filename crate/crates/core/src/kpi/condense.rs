use serde::{Deserialize, Serialize};

use super::plan::{CandidateKpi, Registry};
use super::run::{Decision, TestVerdict};
use super::KpiError;
use crate::stats::CorrelationResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    #[serde(rename = "no significant test")]
    NoSignificantTest,
    #[serde(rename = "untested")]
    Untested,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DropReason::NoSignificantTest => "no significant test",
            DropReason::Untested => "untested",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedKpi {
    pub kpi: CandidateKpi,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedKpiList {
    pub retained: Vec<CandidateKpi>,
    pub dropped: Vec<DroppedKpi>,
    pub source_verdicts: Vec<TestVerdict>,
}

impl CondensedKpiList {
    pub fn retained_names(&self) -> Vec<&str> {
        self.retained.iter().map(|k| k.name.as_str()).collect()
    }
}

/// Keeps the outcome KPI and every KPI with at least one rejected H0.
///
/// Error verdicts count as no evidence either way: a KPI whose verdicts are
/// all errors is "untested", one with completed but non-significant tests
/// has "no significant test". Registry order is preserved.
pub fn condense(registry: &Registry, verdicts: &[TestVerdict]) -> Result<CondensedKpiList, KpiError> {
    for v in verdicts {
        registry.get(&v.factor_a)?;
        registry.get(&v.factor_b)?;
    }

    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for kpi in registry.kpis() {
        let decisions: Vec<Decision> =
            verdicts.iter().filter(|v| v.involves(&kpi.name)).filter_map(TestVerdict::decision).collect();
        if kpi.is_outcome || decisions.contains(&Decision::RejectH0) {
            retained.push(kpi.clone());
        } else {
            let reason = if decisions.is_empty() { DropReason::Untested } else { DropReason::NoSignificantTest };
            dropped.push(DroppedKpi { kpi: kpi.clone(), reason });
        }
    }
    Ok(CondensedKpiList { retained, dropped, source_verdicts: verdicts.to_vec() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relationship {
    /// Significant positive correlation.
    Direct,
    /// Significant negative correlation.
    Inverse,
    /// Not significant at `alpha`, whatever the sign of r.
    None,
}

pub fn correlation_sign_report(result: &CorrelationResult, alpha: f64) -> Relationship {
    if result.p_two_tailed >= alpha {
        Relationship::None
    } else if result.r > 0.0 {
        Relationship::Direct
    } else if result.r < 0.0 {
        Relationship::Inverse
    } else {
        Relationship::None
    }
}
