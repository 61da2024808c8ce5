use serde::{Deserialize, Serialize};

use super::distribution::f_sf;
use super::StatsError;

/// One level of a grouping factor together with its dependent values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub label: String,
    pub values: Vec<f64>,
}

/// Dependent values partitioned by the levels of a grouping factor.
///
/// Holds at least two non-empty groups with more observations than groups,
/// so the within-groups degrees of freedom are always positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedSample {
    groups: Vec<Group>,
}

impl GroupedSample {
    pub fn new(groups: Vec<Group>) -> Result<Self, StatsError> {
        if groups.len() < 2 {
            return Err(StatsError::InvalidGrouping(format!(
                "need at least 2 groups, got {}",
                groups.len()
            )));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.values.is_empty() {
                return Err(StatsError::InvalidGrouping(format!("group '{}' is empty", g.label)));
            }
            if g.values.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::InvalidGrouping(format!(
                    "group '{}' contains a non-finite value",
                    g.label
                )));
            }
            if groups[..i].iter().any(|other| other.label == g.label) {
                return Err(StatsError::InvalidGrouping(format!("duplicate group label '{}'", g.label)));
            }
        }
        let n: usize = groups.iter().map(|g| g.values.len()).sum();
        if n <= groups.len() {
            return Err(StatsError::InvalidGrouping(format!(
                "total count {n} must exceed the number of groups {}",
                groups.len()
            )));
        }
        Ok(Self { groups })
    }

    /// Convenience constructor from `(label, values)` pairs.
    pub fn from_pairs<L, I>(pairs: I) -> Result<Self, StatsError>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, Vec<f64>)>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(label, values)| Group { label: label.into(), values })
                .collect(),
        )
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn total_count(&self) -> usize {
        self.groups.iter().map(|g| g.values.len()).sum()
    }
}

/// Sums of squares, degrees of freedom, mean squares, F and its right-tail
/// p-value for a one-way layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub ss_between: f64,
    pub ss_within: f64,
    pub ss_total: f64,
    pub df_between: u32,
    pub df_within: u32,
    pub df_total: u32,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f_stat: f64,
    pub p_value: f64,
}

impl AnovaTable {
    /// Completes a table from its two sums of squares.
    ///
    /// Useful for checking published tables where only the decomposition is
    /// known. `ss_total` is taken as the sum of the parts.
    pub fn from_sums_of_squares(
        ss_between: f64,
        df_between: u32,
        ss_within: f64,
        df_within: u32,
    ) -> Result<Self, StatsError> {
        Self::assemble(ss_between, ss_within, ss_between + ss_within, df_between, df_within)
    }

    fn assemble(
        ss_between: f64,
        ss_within: f64,
        ss_total: f64,
        df_between: u32,
        df_within: u32,
    ) -> Result<Self, StatsError> {
        if df_between == 0 || df_within == 0 {
            return Err(StatsError::Domain(format!(
                "ANOVA degrees of freedom must be positive, got ({df_between}, {df_within})"
            )));
        }
        if !(ss_between >= 0.0) || !(ss_within >= 0.0) || !ss_between.is_finite() || !ss_within.is_finite() {
            return Err(StatsError::Domain(format!(
                "sums of squares must be finite and non-negative, got ({ss_between}, {ss_within})"
            )));
        }
        let ms_between = ss_between / f64::from(df_between);
        let ms_within = ss_within / f64::from(df_within);
        let (f_stat, p_value) = if ss_within == 0.0 {
            if ss_between > 0.0 {
                return Err(StatsError::DegenerateAnova);
            }
            (0.0, 1.0)
        } else {
            let f = ms_between / ms_within;
            (f, f_sf(f, df_between, df_within)?)
        };
        Ok(Self {
            ss_between,
            ss_within,
            ss_total,
            df_between,
            df_within,
            df_total: df_between + df_within,
            ms_between,
            ms_within,
            f_stat,
            p_value,
        })
    }
}

/// One-way analysis of variance with a right-tailed F test.
///
/// All-identical input yields `F = 0, p = 1`. Zero within-group spread with
/// distinct group means has an infinite F and is rejected as degenerate.
pub fn one_way_anova(sample: &GroupedSample) -> Result<AnovaTable, StatsError> {
    let groups = sample.groups();
    let n = sample.total_count();
    let k = groups.len();

    let grand_mean = groups.iter().flat_map(|g| g.values.iter()).sum::<f64>() / n as f64;

    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let mean = g.values.iter().sum::<f64>() / g.values.len() as f64;
        ss_between += g.values.len() as f64 * (mean - grand_mean).powi(2);
        ss_within += g.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    }
    let ss_total: f64 = groups
        .iter()
        .flat_map(|g| g.values.iter())
        .map(|v| (v - grand_mean).powi(2))
        .sum();

    // Exact checks; rounding in the means must not manufacture spread.
    let constant_groups = groups.iter().all(|g| g.values.iter().all(|&v| v == g.values[0]));
    if constant_groups {
        ss_within = 0.0;
        let first = groups[0].values[0];
        if groups.iter().all(|g| g.values[0] == first) {
            ss_between = 0.0;
        }
    }

    AnovaTable::assemble(ss_between, ss_within, ss_total, (k - 1) as u32, (n - k) as u32)
}
