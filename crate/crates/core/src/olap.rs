//! Flat OLAP cube over a dataset: equality slicing, conjunctive dicing,
//! roll-up by dimension removal, and per-level aggregation of measures.
//!
//! A cube never mutates. Slicing returns a new cube that shares the source
//! dataset and the per-row dimension codes with its parent and owns only
//! its fact list.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ColumnKind, Dataset, FactorLevels};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OlapError {
    #[error("a cube needs at least one dimension")]
    NoDimensions,
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("column '{name}' cannot be a {role}: {reason}")]
    KindMismatch { name: String, role: &'static str, reason: String },
    #[error("column '{0}' is listed both as a dimension and as a measure")]
    Overlap(String),
    #[error("column '{0}' is listed twice")]
    Duplicate(String),
    #[error("unknown dimension '{0}'")]
    UnknownDimension(String),
    #[error("dimension '{dimension}' has no level '{level}'")]
    UnknownLevel { dimension: String, level: String },
    #[error("unknown measure '{0}'")]
    UnknownMeasure(String),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
}

#[derive(Debug, Clone)]
pub struct Dimension {
    name: String,
    levels: Vec<String>,
    /// Level index per source row; `None` for a missing cell.
    codes: Arc<[Option<usize>]>,
}

impl Dimension {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Distinct non-missing values in first-appearance order.
    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    fn level_index(&self, level: &str) -> Result<usize, OlapError> {
        self.levels.iter().position(|l| l == level).ok_or_else(|| OlapError::UnknownLevel {
            dimension: self.name.clone(),
            level: level.to_owned(),
        })
    }
}

/// Equality filters, at most one per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpec {
    filters: Vec<(String, String)>,
}

impl SliceSpec {
    pub fn new<D, L, I>(filters: I) -> Result<Self, OlapError>
    where
        D: Into<String>,
        L: Into<String>,
        I: IntoIterator<Item = (D, L)>,
    {
        let filters: Vec<(String, String)> = filters.into_iter().map(|(d, l)| (d.into(), l.into())).collect();
        if filters.is_empty() {
            return Err(OlapError::InvalidSlice("at least one filter is required".into()));
        }
        let mut seen = HashSet::new();
        for (d, _) in &filters {
            if !seen.insert(d.as_str()) {
                return Err(OlapError::InvalidSlice(format!("dimension '{d}' is filtered twice")));
            }
        }
        Ok(Self { filters })
    }

    pub fn single(dimension: impl Into<String>, level: impl Into<String>) -> Self {
        Self { filters: vec![(dimension.into(), level.into())] }
    }

    pub fn filters(&self) -> &[(String, String)] {
        &self.filters
    }
}

#[derive(Debug, Clone)]
pub struct Cube {
    source: Arc<Dataset>,
    dimensions: Vec<Dimension>,
    measures: Vec<String>,
    facts: Vec<usize>,
}

/// Builds a cube with one fact per dataset row.
///
/// Dimensions must be categorical, or numeric with few enough distinct
/// values to act as levels; measures must be numeric.
pub fn build_cube(
    ds: impl Into<Arc<Dataset>>,
    dimensions: &[impl AsRef<str>],
    measures: &[impl AsRef<str>],
) -> Result<Cube, OlapError> {
    let ds: Arc<Dataset> = ds.into();
    if dimensions.is_empty() {
        return Err(OlapError::NoDimensions);
    }
    let mut seen = HashSet::new();
    for name in dimensions.iter().map(AsRef::as_ref).chain(measures.iter().map(AsRef::as_ref)) {
        if !seen.insert(name) {
            let is_dim = dimensions.iter().any(|d| d.as_ref() == name);
            let is_measure = measures.iter().any(|m| m.as_ref() == name);
            return Err(if is_dim && is_measure {
                OlapError::Overlap(name.to_owned())
            } else {
                OlapError::Duplicate(name.to_owned())
            });
        }
    }

    let mut dims = Vec::with_capacity(dimensions.len());
    for name in dimensions.iter().map(AsRef::as_ref) {
        let column = ds.column(name).map_err(|_| OlapError::UnknownColumn(name.to_owned()))?;
        let levels = FactorLevels::of(column).map_err(|e| OlapError::KindMismatch {
            name: name.to_owned(),
            role: "dimension",
            reason: e.to_string(),
        })?;
        dims.push(Dimension { name: name.to_owned(), levels: levels.labels, codes: levels.codes.into() });
    }
    for name in measures.iter().map(AsRef::as_ref) {
        let column = ds.column(name).map_err(|_| OlapError::UnknownColumn(name.to_owned()))?;
        if column.kind() != ColumnKind::Numeric {
            return Err(OlapError::KindMismatch {
                name: name.to_owned(),
                role: "measure",
                reason: "measures must be numeric".into(),
            });
        }
    }

    let facts = (0..ds.row_count()).collect();
    Ok(Cube {
        source: ds,
        dimensions: dims,
        measures: measures.iter().map(|m| m.as_ref().to_owned()).collect(),
        facts,
    })
}

impl Cube {
    pub fn source(&self) -> &Arc<Dataset> {
        &self.source
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn measures(&self) -> &[String] {
        &self.measures
    }

    /// Source row indices of the facts in this cube, ascending.
    pub fn facts(&self) -> &[usize] {
        &self.facts
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn dimension(&self, name: &str) -> Result<&Dimension, OlapError> {
        self.dimensions
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| OlapError::UnknownDimension(name.to_owned()))
    }

    /// Sub-cube for a single `dimension = level` filter.
    pub fn slice(&self, spec: &SliceSpec) -> Result<Cube, OlapError> {
        if spec.filters.len() != 1 {
            return Err(OlapError::InvalidSlice(format!(
                "slice takes exactly one filter, got {}; use dice",
                spec.filters.len()
            )));
        }
        self.dice(spec)
    }

    /// Sub-cube keeping facts that match every filter. Facts with a missing
    /// cell in a filtered dimension never match.
    pub fn dice(&self, spec: &SliceSpec) -> Result<Cube, OlapError> {
        let mut resolved = Vec::with_capacity(spec.filters.len());
        for (dim, level) in &spec.filters {
            let d = self.dimension(dim)?;
            resolved.push((&d.codes, d.level_index(level)?));
        }
        let facts = self
            .facts
            .iter()
            .copied()
            .filter(|&row| resolved.iter().all(|(codes, want)| codes[row] == Some(*want)))
            .collect();
        Ok(Cube { facts, ..self.clone() })
    }

    /// Removes a dimension. Facts are untouched, so later aggregates
    /// simply lose that axis.
    pub fn roll_up(&self, dimension: &str) -> Result<Cube, OlapError> {
        self.dimension(dimension)?;
        let mut cube = self.clone();
        cube.dimensions.retain(|d| d.name != dimension);
        Ok(cube)
    }

    /// Count, sum, mean, min and max of `measure`, optionally per level of
    /// `group_by`. Missing measure cells are skipped. An empty cube yields
    /// no rows; a group whose facts lack the measure reports count 0 and no
    /// sum/mean/min/max.
    pub fn aggregate(&self, measure: &str, group_by: Option<&str>) -> Result<AggregateResult, OlapError> {
        if !self.measures.iter().any(|m| m == measure) {
            return Err(OlapError::UnknownMeasure(measure.to_owned()));
        }
        let values = self
            .source
            .column(measure)
            .and_then(|c| c.as_numeric())
            .map_err(|_| OlapError::UnknownMeasure(measure.to_owned()))?;

        let mut rows = Vec::new();
        if !self.facts.is_empty() {
            match group_by {
                None => rows.push(AggregateRow::over(None, measure, self.facts.iter().map(|&r| values[r]))),
                Some(dim) => {
                    let d = self.dimension(dim)?;
                    for (i, label) in d.levels.iter().enumerate() {
                        let cells = self.facts.iter().filter(|&&r| d.codes[r] == Some(i)).map(|&r| values[r]);
                        rows.push(AggregateRow::over(Some(label.clone()), measure, cells));
                    }
                }
            }
        }
        Ok(AggregateResult { group_by: group_by.map(str::to_owned), rows })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    /// Level label, or `None` for an ungrouped aggregate.
    pub group: Option<String>,
    pub measure: String,
    pub count: usize,
    pub sum: Option<f64>,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl AggregateRow {
    fn over(group: Option<String>, measure: &str, cells: impl Iterator<Item = Option<f64>>) -> Self {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in cells.flatten() {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        let present = count > 0;
        Self {
            group,
            measure: measure.to_owned(),
            count,
            sum: present.then_some(sum),
            mean: present.then(|| sum / count as f64),
            min: present.then_some(min),
            max: present.then_some(max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub group_by: Option<String>,
    pub rows: Vec<AggregateRow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_csv;

    fn dataset() -> Arc<Dataset> {
        Arc::new(
            load_csv(
                b"Course,State,CGPA,Backlogs,Sem\n\
                  M.Tech,Punjab,8,0,4\n\
                  B.Tech,Delhi,9,1,8\n\
                  M.Tech,Delhi,7,,4\n\
                  MCA,,6.5,2,6\n\
                  B.Tech,Punjab,,3,8\n",
                "olap",
            )
            .unwrap(),
        )
    }

    fn cube() -> Cube {
        build_cube(dataset(), &["Course", "State"], &["CGPA", "Backlogs"]).unwrap()
    }

    #[test]
    fn build_orders_levels_by_first_appearance() {
        let c = cube();
        assert_eq!(c.fact_count(), 5);
        assert_eq!(c.dimension("Course").unwrap().levels(), ["M.Tech", "B.Tech", "MCA"]);
        assert_eq!(c.dimension("State").unwrap().levels(), ["Punjab", "Delhi"]);
    }

    #[test]
    fn build_errors() {
        let none: [&str; 0] = [];
        assert_eq!(build_cube(dataset(), &none, &["CGPA"]).unwrap_err(), OlapError::NoDimensions);
        assert!(matches!(build_cube(dataset(), &["CGPA"], &["CGPA"]), Err(OlapError::Overlap(_))));
        assert!(matches!(build_cube(dataset(), &["Course", "Course"], &["CGPA"]), Err(OlapError::Duplicate(_))));
        assert!(matches!(build_cube(dataset(), &["Nope"], &["CGPA"]), Err(OlapError::UnknownColumn(_))));
        assert!(matches!(build_cube(dataset(), &["Course"], &["State"]), Err(OlapError::KindMismatch { .. })));
        // leveled numeric columns are valid dimensions
        assert!(build_cube(dataset(), &["Sem"], &["CGPA"]).is_ok());
    }

    #[test]
    fn slice_selects_matching_facts() {
        let c = cube();
        let m = c.slice(&SliceSpec::single("Course", "M.Tech")).unwrap();
        assert_eq!(m.facts(), [0, 2]);
        assert_eq!(m.dimensions().len(), 2);
        // parent untouched
        assert_eq!(c.fact_count(), 5);
    }

    #[test]
    fn slice_identity_and_empty() {
        let ds = Arc::new(load_csv(b"Course,CGPA\nM.Tech,8\nM.Tech,9\n", "t").unwrap());
        let c = build_cube(ds, &["Course"], &["CGPA"]).unwrap();
        let same = c.slice(&SliceSpec::single("Course", "M.Tech")).unwrap();
        assert_eq!(same.facts(), c.facts());

        let c = cube();
        let empty = c.dice(&SliceSpec::new([("Course", "MCA"), ("State", "Delhi")]).unwrap()).unwrap();
        assert_eq!(empty.fact_count(), 0);
        assert!(empty.aggregate("CGPA", None).unwrap().rows.is_empty());
        assert!(empty.aggregate("CGPA", Some("Course")).unwrap().rows.is_empty());
    }

    #[test]
    fn slice_errors() {
        let c = cube();
        assert!(matches!(c.slice(&SliceSpec::single("Nope", "x")), Err(OlapError::UnknownDimension(_))));
        assert!(matches!(c.slice(&SliceSpec::single("Course", "PhD")), Err(OlapError::UnknownLevel { .. })));
        let two = SliceSpec::new([("Course", "MCA"), ("State", "Delhi")]).unwrap();
        assert!(matches!(c.slice(&two), Err(OlapError::InvalidSlice(_))));
        let none: [(&str, &str); 0] = [];
        assert!(SliceSpec::new(none).is_err());
        assert!(SliceSpec::new([("Course", "MCA"), ("Course", "M.Tech")]).is_err());
    }

    #[test]
    fn missing_dimension_cell_is_excluded_from_slices_only() {
        let c = cube();
        let punjab = c.slice(&SliceSpec::single("State", "Punjab")).unwrap();
        let delhi = c.slice(&SliceSpec::single("State", "Delhi")).unwrap();
        assert_eq!(punjab.fact_count() + delhi.fact_count(), 4);
        let all = c.aggregate("Backlogs", None).unwrap();
        assert_eq!(all.rows[0].count, 4);
        assert_eq!(all.rows[0].sum, Some(6.0));
    }

    #[test]
    fn dice_is_commutative_and_matches_chained_slices() {
        let c = cube();
        let ab = c.dice(&SliceSpec::new([("Course", "M.Tech"), ("State", "Delhi")]).unwrap()).unwrap();
        let ba = c.dice(&SliceSpec::new([("State", "Delhi"), ("Course", "M.Tech")]).unwrap()).unwrap();
        let chained = c
            .slice(&SliceSpec::single("State", "Delhi"))
            .unwrap()
            .slice(&SliceSpec::single("Course", "M.Tech"))
            .unwrap();
        assert_eq!(ab.facts(), [2]);
        assert_eq!(ab.facts(), ba.facts());
        assert_eq!(ab.facts(), chained.facts());
        let single = c.dice(&SliceSpec::single("Course", "MCA")).unwrap();
        assert_eq!(single.facts(), c.slice(&SliceSpec::single("Course", "MCA")).unwrap().facts());
    }

    #[test]
    fn ungrouped_aggregate() {
        let ds = Arc::new(load_csv(b"Course,CGPA\nA,8\nB,9\nA,7\n", "t").unwrap());
        let c = build_cube(ds, &["Course"], &["CGPA"]).unwrap();
        let r = c.aggregate("CGPA", None).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = &r.rows[0];
        assert_eq!((row.count, row.sum, row.mean, row.min, row.max), (3, Some(24.0), Some(8.0), Some(7.0), Some(9.0)));
        assert_eq!(row.group, None);
    }

    #[test]
    fn grouped_aggregate_reports_empty_groups() {
        let c = cube().slice(&SliceSpec::single("State", "Punjab")).unwrap();
        let r = c.aggregate("CGPA", Some("Course")).unwrap();
        let labels: Vec<_> = r.rows.iter().map(|row| row.group.as_deref().unwrap()).collect();
        assert_eq!(labels, ["M.Tech", "B.Tech", "MCA"]);
        assert_eq!(r.rows[0].count, 1);
        // B.Tech Punjab row has a missing CGPA
        assert_eq!((r.rows[1].count, r.rows[1].mean), (0, None));
        assert_eq!((r.rows[2].count, r.rows[2].sum), (0, None));
    }

    #[test]
    fn aggregate_errors() {
        let c = cube();
        assert!(matches!(c.aggregate("Sem", None), Err(OlapError::UnknownMeasure(_))));
        assert!(matches!(c.aggregate("CGPA", Some("Sem")), Err(OlapError::UnknownDimension(_))));
    }

    #[test]
    fn roll_up_removes_dimension_only() {
        let c = cube();
        let r = c.roll_up("State").unwrap();
        assert_eq!(r.dimensions().len(), 1);
        assert_eq!(r.facts(), c.facts());
        assert_eq!(r.aggregate("CGPA", None).unwrap(), c.aggregate("CGPA", None).unwrap());
        assert!(matches!(r.aggregate("CGPA", Some("State")), Err(OlapError::UnknownDimension(_))));
        let bare = r.roll_up("Course").unwrap();
        assert!(bare.dimensions().is_empty());
        assert!(matches!(c.roll_up("Nope"), Err(OlapError::UnknownDimension(_))));
    }
}
