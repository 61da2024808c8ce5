//! File-backed document store shared by the CLI and the HTTP service.
//!
//! Layout under the data directory:
//!
//! ```text
//! <data-dir>/datasets/<id>.json   dataset documents
//! <data-dir>/analyses/<id>.json   analysis runs
//! <data-dir>/cubes/<id>.json      cube definitions
//! ```
//!
//! Every write goes to a temporary file in the target directory and is
//! renamed into place, so readers see either the old document or the new
//! one, never a partial file.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, DatasetDocument, DatasetId};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown {kind} '{id}'")]
    NotFound { kind: &'static str, id: String },
    #[error("storage I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt document {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collection {
    Datasets,
    Analyses,
    Cubes,
}

impl Collection {
    fn dir_name(self) -> &'static str {
        match self {
            Collection::Datasets => "datasets",
            Collection::Analyses => "analyses",
            Collection::Cubes => "cubes",
        }
    }

    fn kind(self) -> &'static str {
        match self {
            Collection::Datasets => "dataset",
            Collection::Analyses => "analysis",
            Collection::Cubes => "cube",
        }
    }
}

/// Ids are used verbatim as file names: ASCII alphanumerics, `-` and `_`.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for c in [Collection::Datasets, Collection::Analyses, Collection::Cubes] {
            std::fs::create_dir_all(root.join(c.dir_name()))?;
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, collection: Collection, id: &str) -> Result<PathBuf, StoreError> {
        if !is_valid_id(id) {
            return Err(StoreError::NotFound { kind: collection.kind(), id: id.to_owned() });
        }
        Ok(self.root.join(collection.dir_name()).join(format!("{id}.json")))
    }

    /// Atomically writes `value` as pretty JSON under `id`.
    pub fn put<T: Serialize>(&self, collection: Collection, id: &str, value: &T) -> Result<(), StoreError> {
        let path = self.path(collection, id)?;
        let bytes = serde_json::to_vec_pretty(value).map_err(|e| StoreError::Corrupt {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let dir = path.parent().expect("document path has a parent");
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| StoreError::Io(e.error))?;
        Ok(())
    }

    /// Raw stored bytes, for byte-identical re-serving.
    pub fn get_raw(&self, collection: Collection, id: &str) -> Result<Vec<u8>, StoreError> {
        let path = self.path(collection, id)?;
        match std::fs::read(&path) {
            Ok(bytes) => Ok(bytes),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                Err(StoreError::NotFound { kind: collection.kind(), id: id.to_owned() })
            }
            Err(e) => Err(e.into()),
        }
    }

    pub fn get<T: DeserializeOwned>(&self, collection: Collection, id: &str) -> Result<T, StoreError> {
        let bytes = self.get_raw(collection, id)?;
        serde_json::from_slice(&bytes).map_err(|e| StoreError::Corrupt {
            path: self.root.join(collection.dir_name()).join(format!("{id}.json")),
            message: e.to_string(),
        })
    }

    pub fn contains(&self, collection: Collection, id: &str) -> bool {
        self.path(collection, id).map(|p| p.is_file()).unwrap_or(false)
    }

    /// Ids present in a collection, sorted.
    pub fn list(&self, collection: Collection) -> Result<Vec<String>, StoreError> {
        let mut ids = Vec::new();
        for entry in std::fs::read_dir(self.root.join(collection.dir_name()))? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(id) = name.strip_suffix(".json") {
                if is_valid_id(id) {
                    ids.push(id.to_owned());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn save_dataset(&self, ds: &Dataset) -> Result<DatasetId, StoreError> {
        self.put(Collection::Datasets, ds.id().as_str(), &ds.to_document())?;
        Ok(ds.id().clone())
    }

    pub fn load_dataset(&self, id: &DatasetId) -> Result<Dataset, StoreError> {
        let doc: DatasetDocument = self.get(Collection::Datasets, id.as_str())?;
        Dataset::from_document(doc).map_err(|e| StoreError::Corrupt {
            path: self.root.join("datasets").join(format!("{id}.json")),
            message: e.to_string(),
        })
    }
}
