use serde::{Deserialize, Serialize};

use super::plan::{validate_tests, HypothesisTest, Method, Registry};
use super::KpiError;
use crate::dataset::{contingency_table, group_by_factor, pairwise_complete, Dataset, DatasetError};
use crate::stats::{chi_square_independence, one_way_anova, pearson, AnovaTable, ChiSquareResult, CorrelationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    FailToReject,
}

impl Decision {
    /// Strict: `p == alpha` does not reject.
    pub fn from_p(p_value: f64, alpha: f64) -> Self {
        if p_value < alpha {
            Decision::RejectH0
        } else {
            Decision::FailToReject
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestDetail {
    Anova(AnovaTable),
    Correlation(CorrelationResult),
    ChiSquare(ChiSquareResult),
}

impl TestDetail {
    /// F for ANOVA, r for correlation, chi-square otherwise.
    pub fn statistic(&self) -> f64 {
        match self {
            TestDetail::Anova(t) => t.f_stat,
            TestDetail::Correlation(c) => c.r,
            TestDetail::ChiSquare(c) => c.statistic,
        }
    }

    pub fn p_value(&self) -> f64 {
        match self {
            TestDetail::Anova(t) => t.p_value,
            TestDetail::Correlation(c) => c.p_two_tailed,
            TestDetail::ChiSquare(c) => c.p_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictOutcome {
    Completed {
        statistic: f64,
        p_value: f64,
        decision: Decision,
        detail: TestDetail,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub test_id: String,
    pub method: Method,
    pub factor_a: String,
    pub factor_b: String,
    pub alpha: f64,
    #[serde(flatten)]
    pub outcome: VerdictOutcome,
}

impl TestVerdict {
    /// Verdict for a finished test; the decision follows from `p < alpha`.
    pub fn completed(test: &HypothesisTest, detail: TestDetail) -> Self {
        let p_value = detail.p_value();
        Self {
            test_id: test.id.clone(),
            method: test.method,
            factor_a: test.factor_a.clone(),
            factor_b: test.factor_b.clone(),
            alpha: test.alpha,
            outcome: VerdictOutcome::Completed {
                statistic: detail.statistic(),
                p_value,
                decision: Decision::from_p(p_value, test.alpha),
                detail,
            },
        }
    }

    pub fn failed(test: &HypothesisTest, message: impl Into<String>) -> Self {
        Self {
            test_id: test.id.clone(),
            method: test.method,
            factor_a: test.factor_a.clone(),
            factor_b: test.factor_b.clone(),
            alpha: test.alpha,
            outcome: VerdictOutcome::Error { message: message.into() },
        }
    }

    pub fn decision(&self) -> Option<Decision> {
        match &self.outcome {
            VerdictOutcome::Completed { decision, .. } => Some(*decision),
            VerdictOutcome::Error { .. } => None,
        }
    }

    pub fn p_value(&self) -> Option<f64> {
        match &self.outcome {
            VerdictOutcome::Completed { p_value, .. } => Some(*p_value),
            VerdictOutcome::Error { .. } => None,
        }
    }

    pub fn detail(&self) -> Option<&TestDetail> {
        match &self.outcome {
            VerdictOutcome::Completed { detail, .. } => Some(detail),
            VerdictOutcome::Error { .. } => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.outcome, VerdictOutcome::Error { .. })
    }

    pub fn involves(&self, kpi: &str) -> bool {
        self.factor_a == kpi || self.factor_b == kpi
    }
}

/// Runs one test on the columns bound to its two KPIs.
pub fn run_test(test: &HypothesisTest, ds: &Dataset, registry: &Registry) -> Result<TestVerdict, KpiError> {
    let col_a = registry.get(&test.factor_a)?.column.as_str();
    let col_b = registry.get(&test.factor_b)?.column.as_str();
    let annotate = |source: DatasetError| KpiError::TestFailed { test_id: test.id.clone(), source };

    let detail = match test.method {
        Method::Anova => {
            let sample = group_by_factor(ds, col_b, col_a).map_err(annotate)?;
            TestDetail::Anova(one_way_anova(&sample).map_err(|e| annotate(e.into()))?)
        }
        Method::Correlation => {
            let (x, y) = pairwise_complete(ds, col_a, col_b).map_err(annotate)?;
            TestDetail::Correlation(pearson(&x, &y).map_err(|e| annotate(e.into()))?)
        }
        Method::ChiSquare => {
            let table = contingency_table(ds, col_a, col_b).map_err(annotate)?;
            TestDetail::ChiSquare(chi_square_independence(&table.counts).map_err(|e| annotate(e.into()))?)
        }
    };
    Ok(TestVerdict::completed(test, detail))
}

/// Runs every test in order. A test that fails to compute becomes an error
/// verdict; the remaining tests still run.
pub fn run_plan(tests: &[HypothesisTest], ds: &Dataset, registry: &Registry) -> Result<Vec<TestVerdict>, KpiError> {
    validate_tests(tests, registry)?;
    Ok(tests
        .iter()
        .map(|t| run_test(t, ds, registry).unwrap_or_else(|e| TestVerdict::failed(t, e.to_string())))
        .collect())
}
