//! Bundled inputs: a synthetic 50-student academic dataset, the default test
//! plan over its KPI columns, and a reference verdict set.
//!
//! The dataset is synthetic. Its columns were tuned so that the six
//! headline tests of the default plan land near the published summary
//! statistics of the student-progression study these KPIs come from
//! (for instance CGPA by Regularity: SS 17.19 / 20.50, F ≈ 12.85). Tests
//! marked "supplementary" in the plan have no published counterpart.

use crate::dataset::{load_csv, Dataset};
use crate::kpi::{HypothesisTest, Plan, TestDetail, TestVerdict};
use crate::stats::{chi_square_sf, AnovaTable, ChiSquareResult, CorrelationResult};

/// CSV text of the synthetic academic dataset (50 rows).
pub const ACADEMIC_CSV: &str = include_str!("../data/academic_synthetic.csv");

/// JSON text of the default plan.
pub const DEFAULT_PLAN_JSON: &str = include_str!("../data/default_plan.json");

pub fn academic_dataset() -> Dataset {
    load_csv(ACADEMIC_CSV.as_bytes(), "academic-synthetic").expect("bundled CSV is valid")
}

pub fn default_plan() -> Plan {
    Plan::from_json(DEFAULT_PLAN_JSON).expect("bundled plan is valid")
}

/// Names of the KPIs the reference verdicts condense to, in registry order.
pub const CONDENSED_KPI_NAMES: [&str; 7] = [
    "No. of Backlogs",
    "Extra curriculum activities",
    "Regularity",
    "CGPA",
    "Projects",
    "Research Work",
    "All Rounder Score",
];

/// Summary statistics behind [`reference_verdicts`], keyed by test id.
enum Reference {
    /// (SS between, df between, SS within, df within)
    Anova(f64, u32, f64, u32),
    /// (r, number of pairs)
    Correlation(f64, usize),
    /// (statistic, df)
    ChiSquare(f64, u32),
}

const REFERENCE: [(&str, Reference); 13] = [
    // published tables
    ("anova-regularity-by-activities", Reference::Anova(10.085, 2, 12.195, 47)),
    ("anova-cgpa-by-regularity", Reference::Anova(17.189, 3, 20.494, 46)),
    ("anova-cgpa-by-semesters", Reference::Anova(0.220, 2, 37.463, 47)),
    ("correlation-activities-regularity", Reference::Correlation(-0.550, 50)),
    ("correlation-regularity-cgpa", Reference::Correlation(0.639, 50)),
    ("correlation-semesters-cgpa", Reference::Correlation(0.075, 50)),
    // synthetic; mirror the bundled dataset to three decimals
    ("correlation-backlogs-cgpa", Reference::Correlation(-0.726, 50)),
    ("correlation-projects-cgpa", Reference::Correlation(0.741, 50)),
    ("anova-cgpa-by-research", Reference::Anova(17.392, 2, 20.293, 47)),
    ("correlation-allrounder-activities", Reference::Correlation(0.780, 50)),
    ("anova-cgpa-by-state", Reference::Anova(0.788, 3, 36.896, 46)),
    ("chi-square-state-activities", Reference::ChiSquare(5.717, 6)),
    ("correlation-subjects-cgpa", Reference::Correlation(0.128, 50)),
];

/// Verdicts for every test of [`default_plan`], computed from summary
/// statistics rather than raw data.
///
/// The six headline tests use published sums of squares and correlation
/// coefficients; the seven supplementary ones (every test touching State,
/// the number of subjects, and the remaining Table I style KPIs) are
/// synthetic, since no published statistics exist for them.
pub fn reference_verdicts() -> Vec<TestVerdict> {
    let plan = default_plan();
    REFERENCE
        .iter()
        .map(|(id, reference)| {
            let test: &HypothesisTest =
                plan.tests.iter().find(|t| t.id == *id).expect("reference id exists in the default plan");
            let detail = match *reference {
                Reference::Anova(ssb, dfb, ssw, dfw) => TestDetail::Anova(
                    AnovaTable::from_sums_of_squares(ssb, dfb, ssw, dfw).expect("valid reference table"),
                ),
                Reference::Correlation(r, n) => {
                    TestDetail::Correlation(CorrelationResult::from_r(r, n).expect("valid reference r"))
                }
                Reference::ChiSquare(statistic, df) => TestDetail::ChiSquare(ChiSquareResult {
                    statistic,
                    df,
                    p_value: chi_square_sf(statistic, df).expect("valid reference chi-square"),
                }),
            };
            TestVerdict::completed(test, detail)
        })
        .collect()
}
