//! Shared domain types: chart metadata, tables, series, features, anchors,
//! description segments and the user's selection state.
//!
//! Everything here is immutable once built and carries no I/O.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::color::is_normalized_hex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("table has no columns or no rows")]
    EmptyTable,
    #[error("row {0} does not have one cell per column")]
    RaggedRow(usize),
    #[error("unknown chart type {0:?}")]
    UnknownChartType(String),
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("chart id is empty")]
    EmptyId,
    #[error("cell at row {row} of column {column:?} does not match the column kind")]
    CellKindMismatch { row: usize, column: String },
    #[error("color {0:?} is not in #RRGGBB form")]
    UnnormalizedColor(String),
    #[error("extracted colors present without svg text")]
    ColorsWithoutSvg,
}

/// The closed set of supported chart types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartType {
    Bar,
    SplitBar,
    StackedBar,
    GroupedBar,
    Column,
    GroupedColumn,
    StackedColumn,
    Line,
    Area,
    Pie,
}

impl ChartType {
    pub const ALL: [ChartType; 10] = [
        ChartType::Bar,
        ChartType::SplitBar,
        ChartType::StackedBar,
        ChartType::GroupedBar,
        ChartType::Column,
        ChartType::GroupedColumn,
        ChartType::StackedColumn,
        ChartType::Line,
        ChartType::Area,
        ChartType::Pie,
    ];

    /// Canonical type string used in metadata documents and query filters.
    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::Bar => "bar",
            ChartType::SplitBar => "split-bars",
            ChartType::StackedBar => "stacked-bars",
            ChartType::GroupedBar => "grouped-bars",
            ChartType::Column => "column",
            ChartType::GroupedColumn => "grouped-column",
            ChartType::StackedColumn => "stacked-column",
            ChartType::Line => "line",
            ChartType::Area => "area",
            ChartType::Pie => "pie",
        }
    }

    /// Grouped, stacked and split variants show several variables per category.
    pub fn is_multivariate(self) -> bool {
        matches!(
            self,
            ChartType::SplitBar
                | ChartType::StackedBar
                | ChartType::GroupedBar
                | ChartType::GroupedColumn
                | ChartType::StackedColumn
        )
    }

    /// Bar-family charts lay categories out vertically.
    pub fn is_horizontal(self) -> bool {
        matches!(
            self,
            ChartType::Bar | ChartType::SplitBar | ChartType::StackedBar | ChartType::GroupedBar
        )
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartType {
    type Err = ModelError;

    /// Accepts the canonical names plus Datawrapper's visualization ids.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = match s.trim().to_ascii_lowercase().as_str() {
            "bar" | "bars" | "d3-bars" => ChartType::Bar,
            "split-bars" | "split-bar" | "d3-bars-split" => ChartType::SplitBar,
            "stacked-bars" | "stacked-bar" | "d3-bars-stacked" => ChartType::StackedBar,
            "grouped-bars" | "grouped-bar" | "d3-bars-grouped" => ChartType::GroupedBar,
            "column" | "columns" | "column-chart" => ChartType::Column,
            "grouped-column" | "grouped-columns" | "grouped-column-chart" => {
                ChartType::GroupedColumn
            }
            "stacked-column" | "stacked-columns" | "stacked-column-chart" => {
                ChartType::StackedColumn
            }
            "line" | "lines" | "d3-lines" => ChartType::Line,
            "area" | "d3-area" => ChartType::Area,
            "pie" | "d3-pies" => ChartType::Pie,
            _ => return Err(ModelError::UnknownChartType(s.to_string())),
        };
        Ok(t)
    }
}

impl Serialize for ChartType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ChartType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRole {
    Independent,
    Dependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortOrder {
    #[serde(rename = "asc")]
    Ascending,
    #[serde(rename = "desc")]
    Descending,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisLabels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependent: Option<String>,
}

impl AxisLabels {
    pub fn get(&self, role: AxisRole) -> Option<&str> {
        match role {
            AxisRole::Independent => self.independent.as_deref(),
            AxisRole::Dependent => self.dependent.as_deref(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.independent.is_none() && self.dependent.is_none()
    }
}

/// Serializes to the canonical flat metadata document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartMetadata {
    pub id: String,
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtitle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub footnote: Option<String>,
    #[serde(rename = "type")]
    pub chart_type: ChartType,
    #[serde(skip_serializing_if = "AxisLabels::is_empty")]
    pub axis_labels: AxisLabels,
    #[serde(rename = "sorted", skip_serializing_if = "Option::is_none")]
    pub declared_sorted: Option<SortOrder>,
    pub created_at: DateTime<Utc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// A parsed temporal cell. Keeps the source text for labels and round-trips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timestamp {
    pub raw: String,
    pub instant: NaiveDateTime,
}

impl Timestamp {
    /// Fractional days elapsed since `origin`.
    pub fn days_since(&self, origin: &Timestamp) -> f64 {
        (self.instant - origin.instant).num_milliseconds() as f64 / 86_400_000.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Number(f64),
    Text(String),
    Temporal(Timestamp),
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Text form written back to CSV; missing cells become empty strings.
    pub fn to_csv_field(&self) -> String {
        match self {
            Cell::Missing => String::new(),
            Cell::Number(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Temporal(t) => t.raw.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Missing => serializer.serialize_none(),
            Cell::Number(v) => serializer.serialize_f64(*v),
            Cell::Text(s) => serializer.serialize_str(s),
            Cell::Temporal(t) => serializer.serialize_str(&t.raw),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataTable {
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// The first column carries the independent axis.
    pub fn independent(&self) -> Option<&ColumnSpec> {
        self.columns.first()
    }

    /// Numeric columns after the first, in table order.
    pub fn dependent_numeric(&self) -> Vec<&str> {
        self.columns
            .iter()
            .skip(1)
            .filter(|c| c.kind == ColumnKind::Numeric)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn cell(&self, row: usize, column: usize) -> Option<&Cell> {
        self.rows.get(row).and_then(|r| r.get(column))
    }
}

/// Metadata, data and optional SVG for one chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartBundle {
    pub metadata: ChartMetadata,
    pub table: DataTable,
    #[serde(skip)]
    pub svg_text: Option<String>,
    pub extracted_colors: Vec<String>,
}

impl ChartBundle {
    pub fn id(&self) -> &str {
        &self.metadata.id
    }

    pub fn has_svg(&self) -> bool {
        self.svg_text.is_some()
    }
}

/// Checks every bundle invariant, reporting the first violation.
pub fn validate_bundle(bundle: ChartBundle) -> Result<ChartBundle, ModelError> {
    if bundle.metadata.id.trim().is_empty() {
        return Err(ModelError::EmptyId);
    }
    let table = &bundle.table;
    if table.columns.is_empty() || table.rows.is_empty() {
        return Err(ModelError::EmptyTable);
    }
    let mut seen = HashSet::new();
    for col in &table.columns {
        if !seen.insert(col.name.as_str()) {
            return Err(ModelError::DuplicateColumn(col.name.clone()));
        }
    }
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != table.columns.len() {
            return Err(ModelError::RaggedRow(i));
        }
        for (cell, col) in row.iter().zip(&table.columns) {
            let ok = match (col.kind, cell) {
                (_, Cell::Missing) => true,
                (ColumnKind::Numeric, Cell::Number(v)) => v.is_finite(),
                (ColumnKind::Categorical, Cell::Text(_)) => true,
                (ColumnKind::Temporal, Cell::Temporal(_)) => true,
                _ => false,
            };
            if !ok {
                return Err(ModelError::CellKindMismatch {
                    row: i,
                    column: col.name.clone(),
                });
            }
        }
    }
    if bundle.svg_text.is_none() && !bundle.extracted_colors.is_empty() {
        return Err(ModelError::ColorsWithoutSvg);
    }
    if let Some(bad) = bundle.extracted_colors.iter().find(|c| !is_normalized_hex(c)) {
        return Err(ModelError::UnnormalizedColor(bad.clone()));
    }
    Ok(bundle)
}

/// One point of the independent axis.
#[derive(Debug, Clone, PartialEq)]
pub enum XValue {
    Category(String),
    Number(f64),
    Time(Timestamp),
}

impl XValue {
    pub fn label(&self) -> String {
        match self {
            XValue::Category(s) => s.clone(),
            XValue::Number(v) => v.to_string(),
            XValue::Time(t) => t.raw.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("x has {x} points but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("y contains a non-finite value")]
    NonFinite,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("column {0:?} is not a dependent numeric column")]
    NotDependentNumeric(String),
}

/// One dependent variable paired with the independent axis, missing points removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<XValue>,
    pub y: Vec<f64>,
    pub x_kind: ColumnKind,
    /// Source table row of each point.
    pub rows: Vec<usize>,
}

impl Series {
    pub fn new(
        label: impl Into<String>,
        x: Vec<XValue>,
        y: Vec<f64>,
        x_kind: ColumnKind,
    ) -> Result<Self, SeriesError> {
        let rows = (0..y.len()).collect();
        Self::with_rows(label, x, y, x_kind, rows)
    }

    fn with_rows(
        label: impl Into<String>,
        x: Vec<XValue>,
        y: Vec<f64>,
        x_kind: ColumnKind,
        rows: Vec<usize>,
    ) -> Result<Self, SeriesError> {
        if x.len() != y.len() {
            return Err(SeriesError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        if y.is_empty() {
            return Err(SeriesError::Empty);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite);
        }
        Ok(Series {
            label: label.into(),
            x,
            y,
            x_kind,
            rows,
        })
    }

    /// Categorical series labelled "1", "2", ... in point order.
    pub fn indexed(label: impl Into<String>, y: Vec<f64>) -> Result<Self, SeriesError> {
        let x = (1..=y.len()).map(|i| XValue::Category(i.to_string())).collect();
        Self::new(label, x, y, ColumnKind::Categorical)
    }

    pub fn numeric(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self, SeriesError> {
        let x = x.into_iter().map(XValue::Number).collect();
        Self::new(label, x, y, ColumnKind::Numeric)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Numeric positions along the independent axis: ordinal for categories,
    /// the value itself for numbers, days since the first point for dates.
    pub fn positions(&self) -> Vec<f64> {
        match self.x.first() {
            Some(XValue::Time(origin)) => {
                let origin = origin.clone();
                self.x
                    .iter()
                    .enumerate()
                    .map(|(i, x)| match x {
                        XValue::Time(t) => t.days_since(&origin),
                        _ => i as f64,
                    })
                    .collect()
            }
            _ => self
                .x
                .iter()
                .enumerate()
                .map(|(i, x)| match x {
                    XValue::Number(v) if self.x_kind == ColumnKind::Numeric => *v,
                    _ => i as f64,
                })
                .collect(),
        }
    }

    /// Builds the series for `variable`, dropping rows whose value (or whose
    /// numeric/temporal x) is missing. Returns the dropped row indices too.
    pub fn from_table(table: &DataTable, variable: &str) -> Result<(Self, Vec<usize>), SeriesError> {
        let y_idx = table
            .column_index(variable)
            .ok_or_else(|| SeriesError::UnknownVariable(variable.to_string()))?;
        if y_idx == 0 || table.columns[y_idx].kind != ColumnKind::Numeric {
            return Err(SeriesError::NotDependentNumeric(variable.to_string()));
        }
        let x_kind = table.columns[0].kind;
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut rows = Vec::new();
        let mut dropped = Vec::new();
        for (i, row) in table.rows.iter().enumerate() {
            let xv = match row.first() {
                Some(Cell::Number(v)) => Some(XValue::Number(*v)),
                Some(Cell::Temporal(t)) => Some(XValue::Time(t.clone())),
                Some(Cell::Text(s)) => Some(XValue::Category(s.clone())),
                Some(Cell::Missing) if x_kind == ColumnKind::Categorical => {
                    Some(XValue::Category(String::new()))
                }
                _ => None,
            };
            match (xv, row.get(y_idx).and_then(Cell::as_number)) {
                (Some(xv), Some(yv)) => {
                    x.push(xv);
                    y.push(yv);
                    rows.push(i);
                }
                _ => dropped.push(i),
            }
        }
        let series = Self::with_rows(variable, x, y, x_kind, rows)?;
        Ok((series, dropped))
    }
}

/// Checkbox group a feature belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureCategory {
    GeneralInfo,
    DataFact,
    Context,
}

impl FeatureCategory {
    pub const PINK: &'static str = "#FFC0CB";
    pub const GREEN: &'static str = "#008000";
    pub const LIGHT_GRAY: &'static str = "#D3D3D3";

    pub fn display_color(self) -> &'static str {
        match self {
            FeatureCategory::GeneralInfo => Self::PINK,
            FeatureCategory::DataFact => Self::GREEN,
            FeatureCategory::Context => Self::LIGHT_GRAY,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureCategory::GeneralInfo => "general_info",
            FeatureCategory::DataFact => "data_fact",
            FeatureCategory::Context => "context",
        }
    }
}

impl Serialize for FeatureCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FeatureCategory", 2)?;
        s.serialize_field("kind", self.as_str())?;
        s.serialize_field("display_color", self.display_color())?;
        s.end()
    }
}

/// A pointer from a piece of text to the chart element it talks about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum AnchorRef {
    DataPoint { row: usize, column: String },
    Column { column: String },
    Axis { role: AxisRole },
    TitleBlock,
    WholeChart,
}

impl AnchorRef {
    pub fn data_point(row: usize, column: impl Into<String>) -> Self {
        AnchorRef::DataPoint {
            row,
            column: column.into(),
        }
    }

    pub fn column(column: impl Into<String>) -> Self {
        AnchorRef::Column {
            column: column.into(),
        }
    }

    pub fn resolves(&self, table: &DataTable) -> bool {
        match self {
            AnchorRef::DataPoint { row, column } => {
                *row < table.rows.len() && table.column_index(column).is_some()
            }
            AnchorRef::Column { column } => table.column_index(column).is_some(),
            AnchorRef::Axis { .. } | AnchorRef::TitleBlock | AnchorRef::WholeChart => true,
        }
    }
}

/// One feature's rendered sentence(s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescriptionSegment {
    pub feature_id: String,
    pub text: String,
    pub anchors: Vec<AnchorRef>,
    pub order_index: usize,
    pub edited: bool,
}

/// What the author picked in the UI. Lives on the client; posted per render.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionState {
    #[serde(default)]
    pub selected_feature_ids: Vec<String>,
    #[serde(default)]
    pub variable_choices: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_text: Option<String>,
    #[serde(default)]
    pub manual_edits: BTreeMap<String, String>,
}
