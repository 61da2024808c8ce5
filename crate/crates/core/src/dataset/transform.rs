use std::collections::HashMap;

use super::{number_key, Column, ColumnData, Dataset, DatasetError};
use crate::stats::{Group, GroupedSample};

/// Numeric columns with more distinct values than this are treated as
/// continuous and refused as grouping factors.
pub const MAX_NUMERIC_LEVELS: usize = 12;

/// Per-row level assignment of a factor column.
///
/// Levels are listed in order of first appearance; `codes[row]` indexes
/// into `labels` or is `None` for a missing cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorLevels {
    pub labels: Vec<String>,
    pub codes: Vec<Option<usize>>,
}

impl FactorLevels {
    /// Levels of a categorical column, or of a numeric column with at most
    /// [`MAX_NUMERIC_LEVELS`] distinct values (labelled by their shortest
    /// decimal form, e.g. `4` or `8.5`).
    pub fn of(column: &Column) -> Result<Self, DatasetError> {
        match column.data() {
            ColumnData::Categorical(cells) => {
                let mut index: HashMap<&str, usize> = HashMap::new();
                let mut labels = Vec::new();
                let codes = cells
                    .iter()
                    .map(|c| {
                        c.as_deref().map(|s| {
                            *index.entry(s).or_insert_with(|| {
                                labels.push(s.to_owned());
                                labels.len() - 1
                            })
                        })
                    })
                    .collect();
                Ok(Self { labels, codes })
            }
            ColumnData::Numeric(cells) => {
                let distinct = column.schema().distinct_count;
                if distinct > MAX_NUMERIC_LEVELS {
                    return Err(DatasetError::TooManyLevels {
                        column: column.name().to_owned(),
                        count: distinct,
                        max: MAX_NUMERIC_LEVELS,
                    });
                }
                let mut index: HashMap<u64, usize> = HashMap::new();
                let mut labels = Vec::new();
                let codes = cells
                    .iter()
                    .map(|c| {
                        c.map(|x| {
                            *index.entry(number_key(x)).or_insert_with(|| {
                                labels.push(format_level(x));
                                labels.len() - 1
                            })
                        })
                    })
                    .collect();
                Ok(Self { labels, codes })
            }
        }
    }
}

fn format_level(x: f64) -> String {
    if x == 0.0 {
        "0".to_owned()
    } else {
        x.to_string()
    }
}

/// Partitions `dependent` by the levels of `factor`.
///
/// Rows missing either value are dropped for this pair only. Groups appear
/// in first-appearance order among the surviving rows.
pub fn group_by_factor(ds: &Dataset, dependent: &str, factor: &str) -> Result<GroupedSample, DatasetError> {
    let values = ds.column(dependent)?.as_numeric()?;
    let levels = FactorLevels::of(ds.column(factor)?)?;

    let mut order: Vec<usize> = Vec::new();
    let mut buckets: HashMap<usize, Vec<f64>> = HashMap::new();
    for (value, code) in values.iter().zip(&levels.codes) {
        if let (Some(v), Some(code)) = (value, code) {
            buckets
                .entry(*code)
                .or_insert_with(|| {
                    order.push(*code);
                    Vec::new()
                })
                .push(*v);
        }
    }

    let groups = order
        .into_iter()
        .map(|code| Group {
            label: levels.labels[code].clone(),
            values: buckets.remove(&code).unwrap_or_default(),
        })
        .collect();
    Ok(GroupedSample::new(groups)?)
}

/// Aligned vectors over the rows where both numeric columns are present.
pub fn pairwise_complete(ds: &Dataset, a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>), DatasetError> {
    let xs = ds.column(a)?.as_numeric()?;
    let ys = ds.column(b)?.as_numeric()?;
    Ok(xs
        .iter()
        .zip(ys)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip())
}

/// Cross-tabulated counts of two factor columns over pairwise-complete rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub counts: Vec<Vec<f64>>,
}

/// Builds the `a x b` contingency table. Levels that only occur on rows
/// missing the other variable are left out.
pub fn contingency_table(ds: &Dataset, a: &str, b: &str) -> Result<ContingencyTable, DatasetError> {
    let rows = FactorLevels::of(ds.column(a)?)?;
    let cols = FactorLevels::of(ds.column(b)?)?;
    let mut counts = vec![vec![0.0; cols.labels.len()]; rows.labels.len()];
    for (r, c) in rows.codes.iter().zip(&cols.codes) {
        if let (Some(r), Some(c)) = (r, c) {
            counts[*r][*c] += 1.0;
        }
    }

    let keep_rows: Vec<usize> = (0..rows.labels.len()).filter(|&i| counts[i].iter().any(|&n| n > 0.0)).collect();
    let keep_cols: Vec<usize> =
        (0..cols.labels.len()).filter(|&j| counts.iter().any(|row| row[j] > 0.0)).collect();
    Ok(ContingencyTable {
        row_labels: keep_rows.iter().map(|&i| rows.labels[i].clone()).collect(),
        column_labels: keep_cols.iter().map(|&j| cols.labels[j].clone()).collect(),
        counts: keep_rows.iter().map(|&i| keep_cols.iter().map(|&j| counts[i][j]).collect()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::load_csv;
    use super::*;

    fn fixture() -> Dataset {
        load_csv(
            b"Reg,CGPA,Sem,State\n\
              1,6.0,4,Punjab\n\
              2,7.0,6,Delhi\n\
              1,6.5,,Punjab\n\
              3,8.0,8,Delhi\n\
              2,,6,Haryana\n\
              3,8.5,4,Punjab\n\
              2,7.5,8,Delhi\n",
            "t",
        )
        .unwrap()
    }

    #[test]
    fn groups_follow_first_appearance_and_drop_missing() {
        let g = group_by_factor(&fixture(), "CGPA", "Reg").unwrap();
        let labels: Vec<_> = g.groups().iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, ["1", "2", "3"]);
        assert_eq!(g.total_count(), 6);
        assert_eq!(g.groups()[1].values, vec![7.0, 7.5]);
    }

    #[test]
    fn categorical_factor() {
        let g = group_by_factor(&fixture(), "CGPA", "State").unwrap();
        let labels: Vec<_> = g.groups().iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, ["Punjab", "Delhi"]);
    }

    #[test]
    fn single_level_factor_is_rejected() {
        let ds = load_csv(b"y,f\n1,a\n2,a\n3,a\n", "t").unwrap();
        assert!(matches!(group_by_factor(&ds, "y", "f"), Err(DatasetError::Sample(_))));
    }

    #[test]
    fn continuous_numeric_factor_is_rejected() {
        let mut csv = String::from("y,f\n");
        for i in 0..13 {
            csv.push_str(&format!("{i},{}\n", i as f64 / 10.0));
        }
        let ds = load_csv(csv.as_bytes(), "t").unwrap();
        assert!(matches!(
            group_by_factor(&ds, "y", "f"),
            Err(DatasetError::TooManyLevels { count: 13, max: 12, .. })
        ));
    }

    #[test]
    fn categorical_dependent_is_rejected() {
        assert!(matches!(group_by_factor(&fixture(), "State", "Reg"), Err(DatasetError::NotNumeric(_))));
    }

    #[test]
    fn pairwise_deletion_per_pair() {
        let ds = fixture();
        let (a, b) = pairwise_complete(&ds, "Sem", "CGPA").unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a.len(), b.len());
        let (a, _) = pairwise_complete(&ds, "Reg", "Sem").unwrap();
        assert_eq!(a.len(), 6);
        assert!(pairwise_complete(&ds, "State", "CGPA").is_err());
    }

    #[test]
    fn one_extra_observation_in_one_column() {
        // 51 values in one column, 50 in the other: correlation runs on 50 pairs
        let mut csv = String::from("No_of_Sem,CGPA\n");
        for i in 0..51 {
            let cgpa = if i == 50 { String::new() } else { format!("{}", 6.0 + (i % 7) as f64 * 0.3) };
            csv.push_str(&format!("{},{cgpa}\n", 4 + 2 * (i % 3)));
        }
        let ds = load_csv(csv.as_bytes(), "t").unwrap();
        assert_eq!(ds.column("No_of_Sem").unwrap().len() - ds.column("No_of_Sem").unwrap().schema().missing_count, 51);
        assert_eq!(ds.column("CGPA").unwrap().schema().missing_count, 1);
        let (a, _) = pairwise_complete(&ds, "No_of_Sem", "CGPA").unwrap();
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn disjoint_missingness_leaves_nothing() {
        let ds = load_csv(b"a,b\n1,\n,2\n3,\n", "t").unwrap();
        let (a, b) = pairwise_complete(&ds, "a", "b").unwrap();
        assert!(a.is_empty() && b.is_empty());
        assert!(crate::stats::pearson(&a, &b).is_err());
    }

    #[test]
    fn contingency_counts() {
        let t = contingency_table(&fixture(), "State", "Reg").unwrap();
        assert_eq!(t.row_labels, ["Punjab", "Delhi", "Haryana"]);
        assert_eq!(t.column_labels, ["1", "2", "3"]);
        assert_eq!(t.counts, vec![vec![2.0, 0.0, 1.0], vec![0.0, 2.0, 1.0], vec![0.0, 1.0, 0.0]]);
    }
}
