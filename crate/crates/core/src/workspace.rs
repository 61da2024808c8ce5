//! Operations shared by the CLI and the HTTP service, on top of a [`Store`].
//!
//! Analysis runs and cube definitions are written once and never modified.
//! Built cubes are cached in memory and rebuilt from their stored
//! definition on first use after a restart.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{load_csv, ColumnSchema, Dataset, DatasetDocument, DatasetId};
use crate::kpi::{condense, run_plan, CondensedKpiList, KpiError, Plan, TestVerdict};
use crate::olap::{build_cube, AggregateResult, Cube, OlapError, SliceSpec};
use crate::store::{Collection, Store, StoreError};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{0}")]
    NotFound(String),
    /// The request itself is unreadable (malformed CSV or JSON).
    #[error("{0}")]
    BadRequest(String),
    /// Well-formed but semantically invalid (bad plan, unknown column, bad filter).
    #[error("{0}")]
    Unprocessable(String),
    #[error("{0}")]
    Internal(String),
}

impl From<StoreError> for WorkspaceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound { .. } => WorkspaceError::NotFound(e.to_string()),
            other => WorkspaceError::Internal(other.to_string()),
        }
    }
}

impl From<OlapError> for WorkspaceError {
    fn from(e: OlapError) -> Self {
        WorkspaceError::Unprocessable(e.to_string())
    }
}

impl From<KpiError> for WorkspaceError {
    fn from(e: KpiError) -> Self {
        WorkspaceError::Unprocessable(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRun {
    pub id: String,
    pub dataset_id: DatasetId,
    pub plan: Plan,
    pub verdicts: Vec<TestVerdict>,
    pub condensed: CondensedKpiList,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionLevels {
    pub name: String,
    pub levels: Vec<String>,
}

/// What `POST /cube` returns and what is persisted under `cubes/`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeInfo {
    pub cube_id: String,
    pub dataset_id: DatasetId,
    pub dimensions: Vec<DimensionLevels>,
    pub measures: Vec<String>,
    pub fact_count: usize,
}

impl CubeInfo {
    fn describe(cube_id: String, dataset_id: DatasetId, cube: &Cube) -> Self {
        Self {
            cube_id,
            dataset_id,
            dimensions: cube
                .dimensions()
                .iter()
                .map(|d| DimensionLevels { name: d.name().to_owned(), levels: d.levels().to_vec() })
                .collect(),
            measures: cube.measures().to_vec(),
            fact_count: cube.fact_count(),
        }
    }
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn parse_dataset_id(id: &str) -> Result<DatasetId, WorkspaceError> {
    id.parse().map_err(|_| WorkspaceError::NotFound(format!("unknown dataset '{id}'")))
}

/// Parses `dim:level,dim:level` (already URL-decoded). Splits on `,`, then
/// on the first `:`, and percent-decodes each side, so a literal comma or
/// colon in a name is written `%2C` / `%3A`. An empty string means no
/// filters.
pub fn parse_filters(raw: &str) -> Result<Vec<(String, String)>, WorkspaceError> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    let decode = |s: &str| {
        percent_decode_str(s)
            .decode_utf8()
            .map(|c| c.into_owned())
            .map_err(|_| WorkspaceError::Unprocessable(format!("filter '{raw}' is not valid UTF-8 once decoded")))
    };
    raw.split(',')
        .map(|pair| {
            let (dim, level) = pair
                .split_once(':')
                .ok_or_else(|| WorkspaceError::Unprocessable(format!("filter '{pair}' is not of the form dim:level")))?;
            let (dim, level) = (decode(dim)?, decode(level)?);
            if dim.is_empty() {
                return Err(WorkspaceError::Unprocessable(format!("filter '{pair}' has an empty dimension")));
            }
            Ok((dim, level))
        })
        .collect()
}

#[derive(Debug)]
pub struct Workspace {
    store: Store,
    cubes: RwLock<HashMap<String, Arc<Cube>>>,
}

impl Workspace {
    pub fn open(data_dir: impl Into<std::path::PathBuf>) -> Result<Self, WorkspaceError> {
        Ok(Self { store: Store::open(data_dir)?, cubes: RwLock::default() })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Parses CSV and stores it as a new dataset.
    pub fn ingest(&self, bytes: &[u8], name: &str) -> Result<Dataset, WorkspaceError> {
        let ds = load_csv(bytes, name).map_err(|e| WorkspaceError::BadRequest(e.to_string()))?;
        self.store.save_dataset(&ds)?;
        Ok(ds)
    }

    pub fn dataset(&self, id: &str) -> Result<Dataset, WorkspaceError> {
        Ok(self.store.load_dataset(&parse_dataset_id(id)?)?)
    }

    pub fn dataset_document(&self, id: &str) -> Result<DatasetDocument, WorkspaceError> {
        Ok(self.dataset(id)?.to_document())
    }

    pub fn schema(&self, id: &str) -> Result<Vec<ColumnSchema>, WorkspaceError> {
        Ok(self.dataset(id)?.schema())
    }

    /// Runs and condenses `plan` against a stored dataset, then persists the
    /// run. The plan is validated before the dataset is touched.
    pub fn analyze(&self, dataset_id: &str, plan: Plan) -> Result<AnalysisRun, WorkspaceError> {
        plan.validate()?;
        let ds = self.dataset(dataset_id)?;
        let verdicts = run_plan(&plan.tests, &ds, &plan.registry)?;
        let condensed = condense(&plan.registry, &verdicts)?;
        let run = AnalysisRun {
            id: new_id(),
            dataset_id: ds.id().clone(),
            plan,
            verdicts,
            condensed,
            created_at: Utc::now(),
        };
        self.store.put(Collection::Analyses, &run.id, &run)?;
        Ok(run)
    }

    /// Stored bytes of a run, served verbatim so repeated reads are identical.
    pub fn analysis_raw(&self, id: &str) -> Result<Vec<u8>, WorkspaceError> {
        Ok(self.store.get_raw(Collection::Analyses, id)?)
    }

    pub fn analysis(&self, id: &str) -> Result<AnalysisRun, WorkspaceError> {
        Ok(self.store.get(Collection::Analyses, id)?)
    }

    pub fn create_cube(
        &self,
        dataset_id: &str,
        dimensions: &[String],
        measures: &[String],
    ) -> Result<CubeInfo, WorkspaceError> {
        let ds = self.dataset(dataset_id)?;
        let id = ds.id().clone();
        let cube = build_cube(ds, dimensions, measures)?;
        let info = CubeInfo::describe(new_id(), id, &cube);
        self.store.put(Collection::Cubes, &info.cube_id, &info)?;
        self.cubes.write().expect("cube cache lock").insert(info.cube_id.clone(), Arc::new(cube));
        Ok(info)
    }

    pub fn cube_info(&self, cube_id: &str) -> Result<CubeInfo, WorkspaceError> {
        Ok(self.store.get(Collection::Cubes, cube_id)?)
    }

    pub fn cube(&self, cube_id: &str) -> Result<Arc<Cube>, WorkspaceError> {
        if let Some(c) = self.cubes.read().expect("cube cache lock").get(cube_id) {
            return Ok(Arc::clone(c));
        }
        let info = self.cube_info(cube_id)?;
        let ds = self.store.load_dataset(&info.dataset_id)?;
        let dims: Vec<&str> = info.dimensions.iter().map(|d| d.name.as_str()).collect();
        let cube = Arc::new(build_cube(ds, &dims, &info.measures).map_err(|e| {
            WorkspaceError::Internal(format!("stored cube '{cube_id}' no longer builds: {e}"))
        })?);
        let mut cache = self.cubes.write().expect("cube cache lock");
        Ok(Arc::clone(cache.entry(cube_id.to_owned()).or_insert(cube)))
    }

    /// Dice by `filters` (if any), then aggregate.
    pub fn aggregate(
        &self,
        cube_id: &str,
        measure: &str,
        group_by: Option<&str>,
        filters: Vec<(String, String)>,
    ) -> Result<AggregateResult, WorkspaceError> {
        let cube = self.cube(cube_id)?;
        if filters.is_empty() {
            return Ok(cube.aggregate(measure, group_by)?);
        }
        let diced = cube.dice(&SliceSpec::new(filters)?)?;
        Ok(diced.aggregate(measure, group_by)?)
    }
}
