//! Typed columnar datasets.
//!
//! A column is numeric iff every non-empty cell parses as a finite real
//! number; everything else is categorical. The empty cell is the only
//! missing-value marker, so `NA` or `-` are ordinary text.

mod csv_io;
mod transform;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::StatsError;

pub use csv_io::load_csv;
pub use transform::{
    contingency_table, group_by_factor, pairwise_complete, ContingencyTable, FactorLevels,
    MAX_NUMERIC_LEVELS,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("file is empty (a header row is required)")]
    EmptyFile,
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),
    #[error("column {0} has an empty name")]
    EmptyColumnName(usize),
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("column '{0}' is not numeric")]
    NotNumeric(String),
    #[error("column '{column}' has {count} distinct values; numeric factors allow at most {max}")]
    TooManyLevels { column: String, count: usize, max: usize },
    #[error("invalid dataset document: {0}")]
    InvalidDocument(String),
    #[error(transparent)]
    Sample(#[from] StatsError),
}

/// Opaque dataset identifier, safe to use as a file name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DatasetId(String);

impl DatasetId {
    pub fn generate() -> Self {
        Self(uuid::Uuid::new_v4().simple().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for DatasetId {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if crate::store::is_valid_id(&s) {
            Ok(Self(s))
        } else {
            Err(format!("invalid dataset id '{s}'"))
        }
    }
}

impl std::str::FromStr for DatasetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::try_from(s.to_owned())
    }
}

impl From<DatasetId> for String {
    fn from(id: DatasetId) -> Self {
        id.0
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub distinct_count: usize,
    pub missing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }
}

/// A borrowed view of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Number(f64),
    Text(&'a str),
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    schema: ColumnSchema,
    data: ColumnData,
}

impl Column {
    pub fn new(name: impl Into<String>, data: ColumnData) -> Self {
        let (distinct_count, missing_count) = match &data {
            ColumnData::Numeric(v) => {
                let distinct: HashSet<u64> = v.iter().flatten().map(|x| number_key(*x)).collect();
                (distinct.len(), v.iter().filter(|c| c.is_none()).count())
            }
            ColumnData::Categorical(v) => {
                let distinct: HashSet<&str> = v.iter().flatten().map(String::as_str).collect();
                (distinct.len(), v.iter().filter(|c| c.is_none()).count())
            }
        };
        let schema = ColumnSchema { name: name.into(), kind: data.kind(), distinct_count, missing_count };
        Self { schema, data }
    }

    pub fn name(&self) -> &str {
        &self.schema.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.schema.kind
    }

    pub fn schema(&self) -> &ColumnSchema {
        &self.schema
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn cell(&self, row: usize) -> Cell<'_> {
        match &self.data {
            ColumnData::Numeric(v) => v[row].map_or(Cell::Missing, Cell::Number),
            ColumnData::Categorical(v) => v[row].as_deref().map_or(Cell::Missing, Cell::Text),
        }
    }

    pub fn as_numeric(&self) -> Result<&[Option<f64>], DatasetError> {
        match &self.data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Categorical(_) => Err(DatasetError::NotNumeric(self.name().to_owned())),
        }
    }
}

/// Equality key for numeric cells; folds `-0.0` into `0.0`.
pub(crate) fn number_key(x: f64) -> u64 {
    if x == 0.0 {
        0.0_f64.to_bits()
    } else {
        x.to_bits()
    }
}

/// Immutable, named, columnar table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id: DatasetId,
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Dataset {
    /// Builds a dataset with a fresh id after checking column invariants.
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self, DatasetError> {
        Self::with_id(DatasetId::generate(), name, columns)
    }

    pub(crate) fn with_id(
        id: DatasetId,
        name: impl Into<String>,
        columns: Vec<Column>,
    ) -> Result<Self, DatasetError> {
        let row_count = columns.first().map_or(0, Column::len);
        let mut seen = HashSet::new();
        for (i, c) in columns.iter().enumerate() {
            if c.name().is_empty() {
                return Err(DatasetError::EmptyColumnName(i));
            }
            if !seen.insert(c.name()) {
                return Err(DatasetError::DuplicateColumn(c.name().to_owned()));
            }
            if c.len() != row_count {
                return Err(DatasetError::InvalidDocument(format!(
                    "column '{}' has {} cells, expected {row_count}",
                    c.name(),
                    c.len()
                )));
            }
        }
        Ok(Self { id, name: name.into(), columns, row_count })
    }

    pub fn id(&self) -> &DatasetId {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn schema(&self) -> Vec<ColumnSchema> {
        self.columns.iter().map(|c| c.schema.clone()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&Column, DatasetError> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_owned()))
    }

    pub fn to_document(&self) -> DatasetDocument {
        DatasetDocument {
            format: DOCUMENT_FORMAT.to_owned(),
            id: self.id.clone(),
            name: self.name.clone(),
            row_count: self.row_count,
            schema: self.schema(),
            columns: self
                .columns
                .iter()
                .map(|c| ColumnDocument { name: c.name().to_owned(), data: c.data.clone() })
                .collect(),
        }
    }

    pub fn from_document(doc: DatasetDocument) -> Result<Self, DatasetError> {
        if doc.format != DOCUMENT_FORMAT {
            return Err(DatasetError::InvalidDocument(format!("unsupported format '{}'", doc.format)));
        }
        let columns: Vec<Column> = doc.columns.into_iter().map(|c| Column::new(c.name, c.data)).collect();
        let ds = Self::with_id(doc.id, doc.name, columns)?;
        if ds.row_count != doc.row_count {
            return Err(DatasetError::InvalidDocument(format!(
                "row_count {} does not match column length {}",
                doc.row_count, ds.row_count
            )));
        }
        if ds.schema() != doc.schema {
            return Err(DatasetError::InvalidDocument("schema block disagrees with column data".into()));
        }
        Ok(ds)
    }
}

pub const DOCUMENT_FORMAT: &str = "kpiforge-dataset/1";

/// On-disk and over-the-wire JSON layout of a dataset.
///
/// ```json
/// {
///   "format": "kpiforge-dataset/1",
///   "id": "…", "name": "…", "row_count": 50,
///   "schema": [{"name": "CGPA", "kind": "numeric", "distinct_count": 47, "missing_count": 0}],
///   "columns": [{"name": "CGPA", "kind": "numeric", "values": [7.73, null, …]}]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDocument {
    pub format: String,
    pub id: DatasetId,
    pub name: String,
    pub row_count: usize,
    pub schema: Vec<ColumnSchema>,
    pub columns: Vec<ColumnDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDocument {
    pub name: String,
    #[serde(flatten)]
    pub data: ColumnData,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dataset {
        load_csv(b"Course,CGPA,Regularity\nB.Tech,8.1,3\nM.Tech,,2\nB.Tech,7.5,3\n", "s").unwrap()
    }

    #[test]
    fn document_round_trip_is_lossless() {
        let ds = sample();
        let json = serde_json::to_string(&ds.to_document()).unwrap();
        let back = Dataset::from_document(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn document_rejects_inconsistent_schema() {
        let mut doc = sample().to_document();
        doc.schema[1].missing_count = 0;
        assert!(Dataset::from_document(doc).is_err());

        let mut doc = sample().to_document();
        doc.format = "other/2".into();
        assert!(Dataset::from_document(doc).is_err());

        let mut doc = sample().to_document();
        if let ColumnData::Numeric(v) = &mut doc.columns[1].data {
            v.pop();
        }
        assert!(Dataset::from_document(doc).is_err());
    }

    #[test]
    fn id_must_be_file_name_safe() {
        assert!("../etc/passwd".parse::<DatasetId>().is_err());
        assert!("".parse::<DatasetId>().is_err());
        assert!("abc-123_X".parse::<DatasetId>().is_ok());
    }

    #[test]
    fn column_lookup() {
        let ds = sample();
        assert_eq!(ds.column("CGPA").unwrap().kind(), ColumnKind::Numeric);
        assert!(matches!(ds.column("nope"), Err(DatasetError::UnknownColumn(_))));
        assert_eq!(ds.column("CGPA").unwrap().cell(1), Cell::Missing);
        assert_eq!(ds.column("Course").unwrap().cell(1), Cell::Text("M.Tech"));
    }
}
