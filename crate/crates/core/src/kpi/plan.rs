use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KpiError;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpiCategory {
    Quantitative,
    Qualitative,
    Leading,
    Actionable,
    Outcome,
}

impl fmt::Display for KpiCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KpiCategory::Quantitative => "Quantitative",
            KpiCategory::Qualitative => "Qualitative",
            KpiCategory::Leading => "Leading",
            KpiCategory::Actionable => "Actionable",
            KpiCategory::Outcome => "Outcome",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateKpi {
    pub name: String,
    pub categories: Vec<KpiCategory>,
    /// Dataset column holding this KPI.
    pub column: String,
    #[serde(default)]
    pub is_outcome: bool,
}

impl CandidateKpi {
    pub fn new(name: impl Into<String>, categories: &[KpiCategory], column: impl Into<String>) -> Self {
        Self { name: name.into(), categories: categories.to_vec(), column: column.into(), is_outcome: false }
    }

    pub fn outcome(mut self) -> Self {
        self.is_outcome = true;
        self
    }

    /// e.g. "Qualitative and Quantitative KPI".
    pub fn category_label(&self) -> String {
        let names: Vec<String> = self.categories.iter().map(ToString::to_string).collect();
        format!("{} KPI", names.join(" and "))
    }
}

/// Ordered candidate KPIs with unique names and exactly one outcome KPI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CandidateKpi>", into = "Vec<CandidateKpi>")]
pub struct Registry {
    kpis: Vec<CandidateKpi>,
}

impl Registry {
    pub fn new(kpis: Vec<CandidateKpi>) -> Result<Self, KpiError> {
        let mut names = HashSet::new();
        for k in &kpis {
            if k.name.is_empty() {
                return Err(KpiError::InvalidRegistry("KPI name must not be empty".into()));
            }
            if !names.insert(k.name.as_str()) {
                return Err(KpiError::InvalidRegistry(format!("duplicate KPI name '{}'", k.name)));
            }
            if k.categories.is_empty() {
                return Err(KpiError::InvalidRegistry(format!("KPI '{}' has no category", k.name)));
            }
        }
        let outcomes = kpis.iter().filter(|k| k.is_outcome).count();
        if outcomes != 1 {
            return Err(KpiError::InvalidRegistry(format!(
                "exactly one outcome KPI is required, found {outcomes}"
            )));
        }
        Ok(Self { kpis })
    }

    pub fn kpis(&self) -> &[CandidateKpi] {
        &self.kpis
    }

    pub fn get(&self, name: &str) -> Result<&CandidateKpi, KpiError> {
        self.kpis.iter().find(|k| k.name == name).ok_or_else(|| KpiError::UnknownKpi(name.to_owned()))
    }

    pub fn outcome(&self) -> &CandidateKpi {
        self.kpis.iter().find(|k| k.is_outcome).expect("registry invariant: one outcome KPI")
    }
}

impl TryFrom<Vec<CandidateKpi>> for Registry {
    type Error = KpiError;

    fn try_from(kpis: Vec<CandidateKpi>) -> Result<Self, Self::Error> {
        Self::new(kpis)
    }
}

impl From<Registry> for Vec<CandidateKpi> {
    fn from(r: Registry) -> Self {
        r.kpis
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Anova,
    Correlation,
    ChiSquare,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Anova => "anova",
            Method::Correlation => "correlation",
            Method::ChiSquare => "chi_square",
        })
    }
}

/// One H0/H1 pair over two KPIs.
///
/// For ANOVA, `factor_a` is the grouping factor and `factor_b` the
/// dependent variable. Chi-square puts `factor_a` on the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisTest {
    pub id: String,
    pub method: Method,
    pub factor_a: String,
    pub factor_b: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub h0: String,
    #[serde(default)]
    pub h1: String,
    /// Free-form remark carried through to reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl HypothesisTest {
    /// Test at the default significance level with generated hypotheses.
    pub fn new(id: impl Into<String>, method: Method, factor_a: impl Into<String>, factor_b: impl Into<String>) -> Self {
        let mut t = Self {
            id: id.into(),
            method,
            factor_a: factor_a.into(),
            factor_b: factor_b.into(),
            alpha: DEFAULT_ALPHA,
            h0: String::new(),
            h1: String::new(),
            note: None,
        };
        t.fill_hypotheses();
        t
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    fn fill_hypotheses(&mut self) {
        if self.h0.is_empty() {
            self.h0 = format!("{} has no significant effect on {}.", self.factor_a, self.factor_b);
        }
        if self.h1.is_empty() {
            self.h1 = format!("{} has a significant effect on {}.", self.factor_a, self.factor_b);
        }
    }

    fn check(&self, registry: &Registry) -> Result<(), KpiError> {
        let invalid = |reason: String| KpiError::InvalidTest { test_id: self.id.clone(), reason };
        if self.id.is_empty() {
            return Err(invalid("test id must not be empty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.factor_a == self.factor_b {
            return Err(invalid("factor_a and factor_b must differ".into()));
        }
        registry.get(&self.factor_a)?;
        registry.get(&self.factor_b)?;
        Ok(())
    }
}

/// A registry plus the tests to run against it.
///
/// JSON layout:
///
/// ```json
/// {
///   "registry": [
///     {"name": "CGPA", "categories": ["outcome"], "column": "CGPA", "is_outcome": true}
///   ],
///   "tests": [
///     {"id": "anova-cgpa-by-regularity", "method": "anova",
///      "factor_a": "Regularity", "factor_b": "CGPA", "alpha": 0.05,
///      "h0": "…", "h1": "…"}
///   ]
/// }
/// ```
///
/// `alpha` defaults to 0.05; empty `h0`/`h1` are generated from the factor
/// names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub registry: Registry,
    pub tests: Vec<HypothesisTest>,
}

impl Plan {
    pub fn new(registry: Registry, mut tests: Vec<HypothesisTest>) -> Result<Self, KpiError> {
        tests.iter_mut().for_each(HypothesisTest::fill_hypotheses);
        let plan = Self { registry, tests };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_json(json: &str) -> Result<Self, KpiError> {
        let raw: Plan = serde_json::from_str(json)?;
        Self::new(raw.registry, raw.tests)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<(), KpiError> {
        validate_tests(&self.tests, &self.registry)
    }
}

pub(super) fn validate_tests(tests: &[HypothesisTest], registry: &Registry) -> Result<(), KpiError> {
    if tests.is_empty() {
        return Err(KpiError::EmptyPlan);
    }
    let mut ids = HashSet::new();
    for t in tests {
        if !ids.insert(t.id.as_str()) {
            return Err(KpiError::DuplicateTestId(t.id.clone()));
        }
        t.check(registry)?;
    }
    Ok(())
}
