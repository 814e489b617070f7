use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chartscribe_core::ingestion::{load_bundle, write_bundle, IngestError};
use chartscribe_core::model::{ChartBundle, ChartType};
use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;
use tracing::warn;

pub const MAX_PAGE_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("page and page_size must be positive and page_size at most {MAX_PAGE_SIZE}")]
    InvalidPage,
    #[error("cannot read store directory {0}")]
    Unreadable(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// One row of the chart gallery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartSummary {
    pub id: String,
    pub title: String,
    #[serde(rename = "type")]
    pub chart_type: ChartType,
    pub created_at: DateTime<Utc>,
    pub has_svg: bool,
}

impl ChartSummary {
    pub fn of(bundle: &ChartBundle) -> Self {
        ChartSummary {
            id: bundle.metadata.id.clone(),
            title: bundle.metadata.title.clone(),
            chart_type: bundle.metadata.chart_type,
            created_at: bundle.metadata.created_at,
            has_svg: bundle.has_svg(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartPage {
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub charts: Vec<ChartSummary>,
}

/// A bundle directory that could not be loaded during a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedBundle {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub charts: usize,
    pub skipped: Vec<SkippedBundle>,
}

/// Bundle directories under one root, indexed by chart id.
#[derive(Debug)]
pub struct ChartStore {
    root: PathBuf,
    index: BTreeMap<String, Arc<ChartBundle>>,
}

impl ChartStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ChartStore {
            root: root.into(),
            index: BTreeMap::new(),
        }
    }

    /// Creates the store and scans it once.
    pub fn open(root: impl Into<PathBuf>) -> Result<(Self, ScanReport), StoreError> {
        let mut store = Self::new(root);
        let report = store.scan()?;
        Ok((store, report))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Rebuilds the index from the bundle directories on disk. Directories
    /// are visited in name order; a repeated chart id keeps the first one.
    pub fn scan(&mut self) -> Result<ScanReport, StoreError> {
        let entries = fs::read_dir(&self.root)
            .map_err(|e| StoreError::Unreadable(format!("{}: {e}", self.root.display())))?;
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();

        let mut index = BTreeMap::new();
        let mut skipped = Vec::new();
        for dir in dirs {
            let path = dir.display().to_string();
            match load_bundle(&dir) {
                Ok(bundle) if index.contains_key(bundle.id()) => {
                    warn!(%path, id = bundle.id(), "duplicate chart id skipped");
                    skipped.push(SkippedBundle {
                        path,
                        error: format!("duplicate chart id {:?}", bundle.id()),
                    });
                }
                Ok(bundle) => {
                    index.insert(bundle.metadata.id.clone(), Arc::new(bundle));
                }
                Err(e) => {
                    warn!(%path, error = %e, "bundle skipped");
                    skipped.push(SkippedBundle {
                        path,
                        error: e.to_string(),
                    });
                }
            }
        }
        self.index = index;
        Ok(ScanReport {
            charts: self.index.len(),
            skipped,
        })
    }

    pub fn get(&self, id: &str) -> Option<Arc<ChartBundle>> {
        self.index.get(id).cloned()
    }

    /// Newest first; ties broken by id. Pages past the end are empty.
    pub fn list(
        &self,
        page: usize,
        page_size: usize,
        type_filter: Option<ChartType>,
    ) -> Result<ChartPage, StoreError> {
        if page == 0 || page_size == 0 || page_size > MAX_PAGE_SIZE {
            return Err(StoreError::InvalidPage);
        }
        let mut all: Vec<ChartSummary> = self
            .index
            .values()
            .filter(|b| type_filter.is_none_or(|t| b.metadata.chart_type == t))
            .map(|b| ChartSummary::of(b))
            .collect();
        all.sort_by(|a, b| b.created_at.cmp(&a.created_at).then_with(|| a.id.cmp(&b.id)));
        let total = all.len();
        let charts = all
            .into_iter()
            .skip((page - 1).saturating_mul(page_size))
            .take(page_size)
            .collect();
        Ok(ChartPage {
            page,
            page_size,
            total,
            charts,
        })
    }

    /// Persists `bundle` as `<root>/<id>/` and indexes it, replacing any
    /// chart with the same id.
    pub fn insert(&mut self, bundle: ChartBundle) -> Result<Arc<ChartBundle>, StoreError> {
        let dir = self.root.join(dir_name(bundle.id()));
        write_bundle(&bundle, &dir)?;
        let bundle = Arc::new(bundle);
        self.index.insert(bundle.metadata.id.clone(), Arc::clone(&bundle));
        Ok(bundle)
    }
}

/// Directory name for a chart id: anything outside `[A-Za-z0-9_-]` becomes `_`.
fn dir_name(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
