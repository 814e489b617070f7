//! Whole-bundle pipeline: catalog, full selection and rendered description.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::facts::{compute_all_facts, FactsBundle, TrendConfig};
use crate::features::{detect_features_with, FeatureCatalog};
use crate::ingestion::{load_bundle, IngestError};
use crate::model::ChartBundle;
use crate::par::{self, ExecMode};
use crate::textgen::{render_selection, select_all, Description, FormatConfig, Renderer, SelectionError, TemplateCatalog};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub trend: TrendConfig,
    pub format: FormatConfig,
    pub mode: ExecMode,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescribeError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Render(#[from] SelectionError),
}

#[derive(Debug, Clone, Serialize)]
pub struct VariableFactsReport {
    pub variable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facts: Option<FactsBundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A full description together with the facts behind it.
#[derive(Debug, Clone, Serialize)]
pub struct DescribeOutput {
    #[serde(flatten)]
    pub description: Description,
    pub facts: Vec<VariableFactsReport>,
    #[serde(skip)]
    pub catalog: FeatureCatalog,
}

pub fn catalog_for(bundle: &ChartBundle, config: &EngineConfig) -> FeatureCatalog {
    detect_features_with(bundle, config.trend, config.mode)
}

/// Description with every feature selected in catalog order.
pub fn describe_bundle(bundle: &ChartBundle, config: &EngineConfig) -> Result<DescribeOutput, DescribeError> {
    let catalog = catalog_for(bundle, config);
    let renderer = Renderer::new(TemplateCatalog::english(), config.format);
    let description = render_selection(&catalog, &select_all(&catalog), &renderer)?;
    let variables = bundle.table.dependent_numeric();
    let facts = compute_all_facts(bundle, config.trend, config.mode)
        .into_iter()
        .zip(variables)
        .map(|(r, v)| match r {
            Ok(f) => VariableFactsReport {
                variable: v.to_string(),
                facts: Some(f),
                error: None,
            },
            Err(e) => VariableFactsReport {
                variable: v.to_string(),
                facts: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(DescribeOutput {
        description,
        facts,
        catalog,
    })
}

pub fn describe_path(dir: &Path, config: &EngineConfig) -> Result<DescribeOutput, DescribeError> {
    let bundle = load_bundle(dir)?;
    describe_bundle(&bundle, config)
}

/// Describes each bundle directory independently; results follow input order.
pub fn describe_batch(
    dirs: &[PathBuf],
    config: &EngineConfig,
) -> Vec<Result<DescribeOutput, DescribeError>> {
    par::map(config.mode, dirs, |d| describe_path(d, config))
}
