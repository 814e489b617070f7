//! Reading chart bundles from disk or from a remote chart API.
//!
//! A bundle directory holds `metadata.json`, `data.csv` and optionally
//! `chart.svg`.

mod metadata;
mod remote;
mod svg;
mod table;

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

pub use crate::model::ChartBundle;
use crate::model::{validate_bundle, ModelError};
pub use metadata::{metadata_to_document, parse_metadata};
pub use remote::{
    fetch_chart, HttpResponse, RemoteConfig, Transport, TransportError, UreqTransport,
    API_TOKEN_ENV, DEFAULT_TIMEOUT,
};
pub use svg::{annotate_svg, extract_svg_colors, parse_css_color};
pub use table::{infer_kind, parse_data_table, serialize_data_table};

pub const METADATA_FILE: &str = "metadata.json";
pub const DATA_FILE: &str = "data.csv";
pub const SVG_FILE: &str = "chart.svg";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("malformed metadata document: {0}")]
    MalformedDocument(String),
    #[error("metadata is missing field {0:?}")]
    MissingField(&'static str),
    #[error("unknown chart type {0:?}")]
    UnknownChartType(String),
    #[error("invalid timestamp {0:?}")]
    InvalidTimestamp(String),
    #[error("data is empty")]
    EmptyInput,
    #[error("row {0} does not have one cell per column")]
    RaggedRow(usize),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("malformed svg markup: {0}")]
    MalformedMarkup(String),
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid bundle: {0}")]
    Invalid(ModelError),
    #[error("remote rejected credentials (status {0})")]
    AuthFailed(u16),
    #[error("remote chart not found")]
    NotFound,
    #[error("remote returned status {0}")]
    UpstreamError(u16),
    #[error("remote request timed out")]
    TimeoutExceeded,
    #[error("transport error: {0}")]
    Transport(String),
}

impl From<ModelError> for IngestError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownChartType(t) => IngestError::UnknownChartType(t),
            ModelError::RaggedRow(i) => IngestError::RaggedRow(i),
            ModelError::DuplicateColumn(c) => IngestError::DuplicateColumn(c),
            other => IngestError::Invalid(other),
        }
    }
}

/// Parses the three bundle parts and validates the result.
pub fn assemble_bundle(
    metadata_doc: &str,
    csv_text: &str,
    svg_text: Option<String>,
) -> Result<ChartBundle, IngestError> {
    let metadata = parse_metadata(metadata_doc)?;
    let table = parse_data_table(csv_text)?;
    let extracted_colors = match &svg_text {
        Some(svg) => extract_svg_colors(svg)?,
        None => Vec::new(),
    };
    let bundle = ChartBundle {
        metadata,
        table,
        svg_text,
        extracted_colors,
    };
    Ok(validate_bundle(bundle)?)
}

fn read_required(dir: &Path, name: &'static str) -> Result<String, IngestError> {
    fs::read_to_string(dir.join(name)).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => IngestError::FileNotFound(name.to_string()),
        _ => IngestError::Io(format!("{name}: {e}")),
    })
}

pub fn load_bundle(dir: impl AsRef<Path>) -> Result<ChartBundle, IngestError> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(IngestError::FileNotFound(dir.display().to_string()));
    }
    let metadata = read_required(dir, METADATA_FILE)?;
    let data = read_required(dir, DATA_FILE)?;
    let svg = match fs::read_to_string(dir.join(SVG_FILE)) {
        Ok(s) => Some(s),
        Err(e) if e.kind() == io::ErrorKind::NotFound => None,
        Err(e) => return Err(IngestError::Io(format!("{SVG_FILE}: {e}"))),
    };
    assemble_bundle(&metadata, &data, svg)
}

/// Writes `bundle` as a bundle directory that [`load_bundle`] reads back
/// into an equal bundle.
pub fn write_bundle(bundle: &ChartBundle, dir: impl AsRef<Path>) -> Result<(), IngestError> {
    let dir = dir.as_ref();
    let io_err = |e: io::Error| IngestError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    let doc = serde_json::to_string_pretty(&metadata_to_document(&bundle.metadata))
        .map_err(|e| IngestError::Io(e.to_string()))?;
    fs::write(dir.join(METADATA_FILE), doc + "\n").map_err(io_err)?;
    fs::write(dir.join(DATA_FILE), serialize_data_table(&bundle.table)).map_err(io_err)?;
    match &bundle.svg_text {
        Some(svg) => fs::write(dir.join(SVG_FILE), svg).map_err(io_err)?,
        None => match fs::remove_file(dir.join(SVG_FILE)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(io_err(e)),
            _ => {}
        },
    }
    Ok(())
}
