//! Chart-type-driven feature detection.
//!
//! A [`FeatureCatalog`] lists everything a description can talk about, in a
//! fixed order: general information, then data facts, then the contextual
//! knowledge slot. Each feature carries the computed values its template
//! needs and anchors back into the chart data.

use serde::Serialize;
use thiserror::Error;
use tracing::warn;

use crate::color::{name_chart_colors, NamedColor};
use crate::facts::{
    self, Direction, Extrema, FactsError, Monotonic, Outlier, SlopeUnit, TrendConfig, TrendInterval,
};
use crate::model::{
    AnchorRef, AxisRole, Cell, ChartBundle, ChartType, ColumnKind, DataTable, FeatureCategory,
    Series, SortOrder,
};
use crate::par::{self, ExecMode};

/// Stable feature keys.
pub mod ids {
    pub const TYPE: &str = "general.type";
    pub const TITLE: &str = "general.title";
    pub const SUBTITLE: &str = "general.subtitle";
    pub const FOOTNOTE: &str = "general.footnote";
    pub const AXES: &str = "general.axes";
    pub const COLORS: &str = "general.colors";
    pub const SORTING: &str = "general.sorting";
    pub const MISSING: &str = "general.missing";
    pub const EXTREMA: &str = "fact.extrema";
    pub const MEAN: &str = "fact.mean";
    pub const STDDEV: &str = "fact.stddev";
    pub const MEDIAN: &str = "fact.median";
    pub const OUTLIERS: &str = "fact.outliers";
    pub const TREND: &str = "fact.trend";
    pub const CORRELATION: &str = "fact.correlation";
    pub const PIE: &str = "fact.pie";
    pub const COMPARISON: &str = "fact.comparison";
    pub const CONTEXT: &str = "context.note";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
}

/// A selectable checkbox item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feature {
    pub feature_id: String,
    pub category: FeatureCategory,
    pub label: String,
    pub requires_variable: bool,
    pub payload: FeaturePayload,
    pub anchors: Vec<AnchorRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureCatalog {
    pub chart_id: String,
    pub chart_type: ChartType,
    pub features: Vec<Feature>,
    /// Dependent variables offered in the variable dropdown; empty for
    /// univariate charts.
    pub variables: Vec<String>,
}

impl FeatureCatalog {
    pub fn get(&self, feature_id: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.feature_id == feature_id)
    }

    pub fn contains(&self, feature_id: &str) -> bool {
        self.get(feature_id).is_some()
    }

    pub fn is_multivariate(&self) -> bool {
        !self.variables.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeaturePayload {
    ChartType {
        chart_type: ChartType,
    },
    Text {
        text: String,
    },
    Notes {
        footnote: Option<String>,
        source: Option<String>,
    },
    Axes {
        independent: String,
        dependent: Option<String>,
        /// Categories run down the vertical axis (bar charts).
        horizontal_layout: bool,
    },
    Colors {
        colors: Vec<NamedColor>,
        associations: Vec<ColorAssociation>,
    },
    Sorting(SortingInfo),
    MissingData {
        dropped: Vec<DroppedPoints>,
    },
    Facts(VariableFacts),
    Comparison {
        comparisons: Vec<GroupComparison>,
    },
    Context,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorAssociation {
    pub variable: String,
    pub hex: String,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SortStatus {
    Ascending,
    Descending,
    Constant,
    Unsorted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SortingInfo {
    pub variable: String,
    pub detected: SortStatus,
    pub declared: Option<SortOrder>,
    /// Metadata claims an order the data does not have.
    pub mismatch: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedPoints {
    pub variable: String,
    pub rows: Vec<usize>,
}

/// Per-variable values of one fact, plus pairwise comparisons for
/// multivariate charts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableFacts {
    pub entries: Vec<VariableFact>,
    pub comparisons: Vec<GroupComparison>,
}

impl VariableFacts {
    pub fn entry(&self, variable: &str) -> Option<&Fact> {
        self.entries
            .iter()
            .find(|e| e.variable == variable)
            .map(|e| &e.fact)
    }

    /// The comparison of `a` against `b`, swapping sides when stored reversed.
    pub fn comparison(&self, a: &str, b: &str) -> Option<GroupComparison> {
        find_comparison(&self.comparisons, a, b)
    }
}

pub(crate) fn find_comparison(all: &[GroupComparison], a: &str, b: &str) -> Option<GroupComparison> {
    all.iter().find_map(|c| {
        if c.a == a && c.b == b {
            Some(c.clone())
        } else if c.a == b && c.b == a {
            Some(c.swapped())
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableFact {
    pub variable: String,
    pub fact: Fact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Fact {
    Extrema(Extrema),
    Mean { value: f64 },
    Stddev { value: f64 },
    Median { value: f64 },
    Outliers { outliers: Vec<Outlier> },
    Trend(TrendSummary),
    Correlation { x_name: String, r: Option<f64> },
    Pie(PieSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalView {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
    pub slope: f64,
    pub start_value: f64,
    pub end_value: f64,
    pub start_label: String,
    pub end_label: String,
    pub start_row: usize,
    pub end_row: usize,
}

impl IntervalView {
    fn new(iv: &TrendInterval, s: &Series) -> Self {
        IntervalView {
            start: iv.start,
            end: iv.end,
            direction: iv.direction,
            slope: iv.slope,
            start_value: s.y[iv.start],
            end_value: s.y[iv.end],
            start_label: s.x[iv.start].label(),
            end_label: s.x[iv.end].label(),
            start_row: s.rows[iv.start],
            end_row: s.rows[iv.end],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub monotonic: Option<Monotonic>,
    pub intervals: Vec<IntervalView>,
    /// Equals `intervals` unless there were more than the threshold.
    pub significant: Vec<IntervalView>,
    pub reduced: bool,
    pub slope_unit: SlopeUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slice {
    pub label: String,
    pub row: usize,
    pub value: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieSummary {
    pub slices: Vec<Slice>,
    pub largest: usize,
    pub smallest: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Larger {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowComparison {
    pub row: usize,
    pub label: String,
    /// `None` when both values are equal.
    pub larger: Option<Larger>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gap {
    pub row: usize,
    pub label: String,
    pub gap: f64,
}

/// Row-by-row comparison of two dependent variables. Rows missing either
/// value are skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupComparison {
    pub a: String,
    pub b: String,
    pub rows: Vec<RowComparison>,
    pub a_larger: usize,
    pub b_larger: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub max_gap: Option<Gap>,
}

impl GroupComparison {
    pub fn swapped(&self) -> Self {
        GroupComparison {
            a: self.b.clone(),
            b: self.a.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| RowComparison {
                    larger: r.larger.map(|l| match l {
                        Larger::A => Larger::B,
                        Larger::B => Larger::A,
                    }),
                    ..r.clone()
                })
                .collect(),
            a_larger: self.b_larger,
            b_larger: self.a_larger,
            mean_a: self.mean_b,
            mean_b: self.mean_a,
            max_gap: self.max_gap.clone(),
        }
    }
}

/// Dependent numeric columns in table order.
pub fn applicable_variables(bundle: &ChartBundle) -> Vec<String> {
    bundle
        .table
        .dependent_numeric()
        .into_iter()
        .map(str::to_string)
        .collect()
}

fn row_label(table: &DataTable, row: usize) -> String {
    match table.cell(row, 0) {
        Some(Cell::Text(s)) => s.clone(),
        Some(Cell::Number(v)) => v.to_string(),
        Some(Cell::Temporal(t)) => t.raw.clone(),
        _ => String::new(),
    }
}

pub fn compare_groups(bundle: &ChartBundle, var_a: &str, var_b: &str) -> Result<GroupComparison, FeatureError> {
    let vars = applicable_variables(bundle);
    let index = |v: &str| {
        if vars.iter().any(|x| x == v) {
            bundle
                .table
                .column_index(v)
                .ok_or_else(|| FeatureError::UnknownVariable(v.to_string()))
        } else {
            Err(FeatureError::UnknownVariable(v.to_string()))
        }
    };
    let (ia, ib) = (index(var_a)?, index(var_b)?);
    let table = &bundle.table;

    let mut rows = Vec::new();
    let (mut a_larger, mut b_larger) = (0, 0);
    let (mut sum_a, mut sum_b) = (0.0, 0.0);
    let mut max_gap: Option<Gap> = None;
    for (i, row) in table.rows.iter().enumerate() {
        let (Some(a), Some(b)) = (row[ia].as_number(), row[ib].as_number()) else {
            continue;
        };
        let larger = if a > b {
            a_larger += 1;
            Some(Larger::A)
        } else if b > a {
            b_larger += 1;
            Some(Larger::B)
        } else {
            None
        };
        sum_a += a;
        sum_b += b;
        let gap = (a - b).abs();
        if max_gap.as_ref().is_none_or(|g| gap > g.gap) {
            max_gap = Some(Gap {
                row: i,
                label: row_label(table, i),
                gap,
            });
        }
        rows.push(RowComparison {
            row: i,
            label: row_label(table, i),
            larger,
        });
    }
    let n = rows.len().max(1) as f64;
    Ok(GroupComparison {
        a: var_a.to_string(),
        b: var_b.to_string(),
        a_larger,
        b_larger,
        mean_a: sum_a / n,
        mean_b: sum_b / n,
        max_gap,
        rows,
    })
}

/// Everything computed for one dependent variable.
struct Analysis {
    variable: String,
    series: Series,
    dropped: Vec<usize>,
    extrema: Result<Extrema, FactsError>,
    mean: Result<f64, FactsError>,
    stddev: Result<f64, FactsError>,
    median: Result<f64, FactsError>,
    outliers: Result<Vec<Outlier>, FactsError>,
    trend: Option<Result<TrendSummary, FactsError>>,
    correlation: Option<Option<f64>>,
    pie: Option<Result<PieSummary, FactsError>>,
}

fn has_axis(kind: ColumnKind) -> bool {
    matches!(kind, ColumnKind::Numeric | ColumnKind::Temporal)
}

fn trend_summary(s: &Series, config: TrendConfig) -> Result<TrendSummary, FactsError> {
    let intervals = facts::segment_trend(s)?;
    let significant = facts::significant_intervals(&intervals, config);
    Ok(TrendSummary {
        monotonic: facts::is_monotonic(s)?,
        reduced: significant.len() != intervals.len(),
        intervals: intervals.iter().map(|iv| IntervalView::new(iv, s)).collect(),
        significant: significant.iter().map(|iv| IntervalView::new(iv, s)).collect(),
        slope_unit: SlopeUnit::for_kind(s.x_kind),
    })
}

fn pie_summary(s: &Series) -> Result<PieSummary, FactsError> {
    let shares = facts::pie_proportions(s)?;
    let slices: Vec<Slice> = shares
        .iter()
        .enumerate()
        .map(|(i, share)| Slice {
            label: s.x[i].label(),
            row: s.rows[i],
            value: s.y[i],
            share: *share,
        })
        .collect();
    let e = facts::extrema(s)?;
    let position = |row: usize| slices.iter().position(|sl| sl.row == row).unwrap_or(0);
    Ok(PieSummary {
        largest: position(e.max_row),
        smallest: position(e.min_row),
        slices,
    })
}

fn analyze(bundle: &ChartBundle, variable: &str, config: TrendConfig) -> Option<Analysis> {
    let (series, dropped) = match Series::from_table(&bundle.table, variable) {
        Ok(v) => v,
        Err(e) => {
            warn!(chart = bundle.id(), variable, error = %e, "variable skipped");
            return None;
        }
    };
    let trended = has_axis(series.x_kind) && series.len() >= 2;
    let trend = trended.then(|| trend_summary(&series, config));
    let correlation = trended.then(|| facts::correlation(&series.positions(), &series.y).ok());
    let pie = (bundle.metadata.chart_type == ChartType::Pie).then(|| pie_summary(&series));
    Some(Analysis {
        variable: variable.to_string(),
        extrema: facts::extrema(&series),
        mean: facts::mean(&series),
        stddev: facts::stddev(&series),
        median: facts::median(&series),
        outliers: facts::iqr_outliers(&series),
        trend,
        correlation,
        pie,
        series,
        dropped,
    })
}

fn detect_sorting(y: &[f64]) -> SortStatus {
    let up = y.windows(2).all(|w| w[1] >= w[0]);
    let down = y.windows(2).all(|w| w[1] <= w[0]);
    match (up, down) {
        (true, true) => SortStatus::Constant,
        (true, false) => SortStatus::Ascending,
        (false, true) => SortStatus::Descending,
        (false, false) => SortStatus::Unsorted,
    }
}

fn sort_mismatch(detected: SortStatus, declared: Option<SortOrder>) -> bool {
    match declared {
        None => false,
        Some(SortOrder::Ascending) => {
            !matches!(detected, SortStatus::Ascending | SortStatus::Constant)
        }
        Some(SortOrder::Descending) => {
            !matches!(detected, SortStatus::Descending | SortStatus::Constant)
        }
    }
}

fn push_unique(anchors: &mut Vec<AnchorRef>, a: AnchorRef) {
    if !anchors.contains(&a) {
        anchors.push(a);
    }
}

struct Builder {
    features: Vec<Feature>,
    multivariate: bool,
}

impl Builder {
    fn general(&mut self, id: &str, label: &str, payload: FeaturePayload, anchors: Vec<AnchorRef>) {
        self.features.push(Feature {
            feature_id: id.to_string(),
            category: FeatureCategory::GeneralInfo,
            label: label.to_string(),
            requires_variable: false,
            payload,
            anchors,
        });
    }

    fn fact(&mut self, id: &str, label: &str, payload: FeaturePayload, anchors: Vec<AnchorRef>) {
        self.features.push(Feature {
            feature_id: id.to_string(),
            category: FeatureCategory::DataFact,
            label: label.to_string(),
            requires_variable: self.multivariate,
            payload,
            anchors,
        });
    }

    /// One fact feature from per-variable results; failures are logged and
    /// skipped, and the feature is omitted when nothing succeeded.
    fn per_variable<T>(
        &mut self,
        id: &str,
        label: &str,
        analyses: &[Analysis],
        comparisons: &[GroupComparison],
        pick: impl Fn(&Analysis) -> Option<Result<T, FactsError>>,
        to_fact: impl Fn(&Analysis, T) -> (Fact, Vec<AnchorRef>),
    ) {
        let mut entries = Vec::new();
        let mut anchors = Vec::new();
        for a in analyses {
            match pick(a) {
                None => {}
                Some(Err(e)) => {
                    warn!(feature = id, variable = %a.variable, error = %e, "fact skipped");
                }
                Some(Ok(value)) => {
                    let (fact, found) = to_fact(a, value);
                    for anchor in found {
                        push_unique(&mut anchors, anchor);
                    }
                    entries.push(VariableFact {
                        variable: a.variable.clone(),
                        fact,
                    });
                }
            }
        }
        if entries.is_empty() {
            return;
        }
        let payload = FeaturePayload::Facts(VariableFacts {
            entries,
            comparisons: comparisons.to_vec(),
        });
        self.fact(id, label, payload, anchors);
    }
}

pub fn detect_features(bundle: &ChartBundle, config: TrendConfig) -> FeatureCatalog {
    detect_features_with(bundle, config, ExecMode::Sequential)
}

/// Builds the catalog; `mode` controls whether variables are analysed in
/// parallel. The result does not depend on `mode`.
pub fn detect_features_with(bundle: &ChartBundle, config: TrendConfig, mode: ExecMode) -> FeatureCatalog {
    let meta = &bundle.metadata;
    let table = &bundle.table;
    let chart_type = meta.chart_type;
    let variables = applicable_variables(bundle);
    let multivariate = chart_type.is_multivariate() || variables.len() > 1;
    let analyses: Vec<Analysis> = par::map(mode, &variables, |v| analyze(bundle, v, config))
        .into_iter()
        .flatten()
        .collect();
    let x_name = table.independent().map(|c| c.name.clone()).unwrap_or_default();
    let x_kind = table
        .independent()
        .map(|c| c.kind)
        .unwrap_or(ColumnKind::Categorical);

    let mut b = Builder {
        features: Vec::new(),
        multivariate,
    };

    b.general(
        ids::TYPE,
        "Chart type",
        FeaturePayload::ChartType { chart_type },
        vec![AnchorRef::WholeChart],
    );
    b.general(
        ids::TITLE,
        "Title",
        FeaturePayload::Text {
            text: meta.title.clone(),
        },
        vec![AnchorRef::TitleBlock],
    );
    if let Some(subtitle) = &meta.subtitle {
        b.general(
            ids::SUBTITLE,
            "Subtitle",
            FeaturePayload::Text {
                text: subtitle.clone(),
            },
            vec![AnchorRef::TitleBlock],
        );
    }
    if meta.footnote.is_some() || meta.source_note.is_some() {
        b.general(
            ids::FOOTNOTE,
            "Notes and source",
            FeaturePayload::Notes {
                footnote: meta.footnote.clone(),
                source: meta.source_note.clone(),
            },
            vec![AnchorRef::WholeChart],
        );
    }
    if chart_type != ChartType::Pie && !table.columns.is_empty() {
        let independent = meta
            .axis_labels
            .get(AxisRole::Independent)
            .map(str::to_string)
            .unwrap_or_else(|| x_name.clone());
        let dependent = meta
            .axis_labels
            .get(AxisRole::Dependent)
            .map(str::to_string)
            .or_else(|| (variables.len() == 1).then(|| variables[0].clone()));
        b.general(
            ids::AXES,
            "Axes",
            FeaturePayload::Axes {
                independent,
                dependent,
                horizontal_layout: chart_type.is_horizontal(),
            },
            vec![
                AnchorRef::Axis {
                    role: AxisRole::Independent,
                },
                AnchorRef::Axis {
                    role: AxisRole::Dependent,
                },
            ],
        );
    }
    if !bundle.extracted_colors.is_empty() {
        match name_chart_colors(&bundle.extracted_colors) {
            Ok(colors) => {
                let associations: Vec<ColorAssociation> =
                    if !variables.is_empty() && colors.len() == variables.len() {
                        variables
                            .iter()
                            .zip(&colors)
                            .map(|(v, c)| ColorAssociation {
                                variable: v.clone(),
                                hex: c.hex.clone(),
                                name: c.name.clone(),
                            })
                            .collect()
                    } else {
                        Vec::new()
                    };
                let anchors = if associations.is_empty() {
                    vec![AnchorRef::WholeChart]
                } else {
                    associations.iter().map(|a| AnchorRef::column(&a.variable)).collect()
                };
                b.general(
                    ids::COLORS,
                    "Color scheme",
                    FeaturePayload::Colors {
                        colors,
                        associations,
                    },
                    anchors,
                );
            }
            Err(e) => warn!(chart = bundle.id(), error = %e, "color naming failed"),
        }
    }
    if let Some(first) = analyses.first() {
        if x_kind == ColumnKind::Categorical || meta.declared_sorted.is_some() {
            let detected = detect_sorting(&first.series.y);
            b.general(
                ids::SORTING,
                "Sorting",
                FeaturePayload::Sorting(SortingInfo {
                    variable: first.variable.clone(),
                    detected,
                    declared: meta.declared_sorted,
                    mismatch: sort_mismatch(detected, meta.declared_sorted),
                }),
                vec![AnchorRef::column(&first.variable)],
            );
        }
    }
    let dropped: Vec<DroppedPoints> = analyses
        .iter()
        .filter(|a| !a.dropped.is_empty())
        .map(|a| DroppedPoints {
            variable: a.variable.clone(),
            rows: a.dropped.clone(),
        })
        .collect();
    if !dropped.is_empty() {
        let anchors = dropped
            .iter()
            .flat_map(|d| d.rows.iter().map(|r| AnchorRef::data_point(*r, &d.variable)))
            .collect();
        b.general(
            ids::MISSING,
            "Missing data",
            FeaturePayload::MissingData { dropped },
            anchors,
        );
    }

    let comparisons: Vec<GroupComparison> = if multivariate {
        let names: Vec<&str> = analyses.iter().map(|a| a.variable.as_str()).collect();
        let mut out = Vec::new();
        for (i, a) in names.iter().enumerate() {
            for bname in &names[i + 1..] {
                match compare_groups(bundle, a, bname) {
                    Ok(c) => out.push(c),
                    Err(e) => warn!(error = %e, "comparison skipped"),
                }
            }
        }
        out
    } else {
        Vec::new()
    };

    b.per_variable(
        ids::EXTREMA,
        "Extrema",
        &analyses,
        &comparisons,
        |a| Some(a.extrema.clone()),
        |a, e| {
            let anchors = vec![
                AnchorRef::data_point(e.max_row, &a.variable),
                AnchorRef::data_point(e.min_row, &a.variable),
            ];
            (Fact::Extrema(e), anchors)
        },
    );
    b.per_variable(
        ids::MEAN,
        "Mean",
        &analyses,
        &comparisons,
        |a| Some(a.mean.clone()),
        |a, value| (Fact::Mean { value }, vec![AnchorRef::column(&a.variable)]),
    );
    b.per_variable(
        ids::STDDEV,
        "Standard deviation",
        &analyses,
        &comparisons,
        |a| Some(a.stddev.clone()),
        |a, value| (Fact::Stddev { value }, vec![AnchorRef::column(&a.variable)]),
    );
    b.per_variable(
        ids::MEDIAN,
        "Median",
        &analyses,
        &comparisons,
        |a| Some(a.median.clone()),
        |a, value| (Fact::Median { value }, vec![AnchorRef::column(&a.variable)]),
    );
    b.per_variable(
        ids::OUTLIERS,
        "Outliers",
        &analyses,
        &comparisons,
        |a| Some(a.outliers.clone()),
        |a, outliers| {
            let anchors = if outliers.is_empty() {
                vec![AnchorRef::column(&a.variable)]
            } else {
                outliers
                    .iter()
                    .map(|o| AnchorRef::data_point(o.row, &a.variable))
                    .collect()
            };
            (Fact::Outliers { outliers }, anchors)
        },
    );
    b.per_variable(
        ids::TREND,
        "Trend",
        &analyses,
        &comparisons,
        |a| a.trend.clone(),
        |a, t| {
            let mut anchors = Vec::new();
            let shown = if t.monotonic.is_some() {
                &t.intervals
            } else {
                &t.significant
            };
            for iv in shown {
                push_unique(&mut anchors, AnchorRef::data_point(iv.start_row, &a.variable));
                push_unique(&mut anchors, AnchorRef::data_point(iv.end_row, &a.variable));
            }
            (Fact::Trend(t), anchors)
        },
    );
    b.per_variable(
        ids::CORRELATION,
        "Correlation",
        &analyses,
        &comparisons,
        |a| a.correlation.map(Ok),
        |a, r| {
            (
                Fact::Correlation {
                    x_name: x_name.clone(),
                    r,
                },
                vec![AnchorRef::column(&x_name), AnchorRef::column(&a.variable)],
            )
        },
    );
    b.per_variable(
        ids::PIE,
        "Pie shares",
        &analyses,
        &comparisons,
        |a| a.pie.clone(),
        |a, p| {
            let anchors = vec![
                AnchorRef::data_point(p.slices[p.largest].row, &a.variable),
                AnchorRef::data_point(p.slices[p.smallest].row, &a.variable),
            ];
            (Fact::Pie(p), anchors)
        },
    );
    if !comparisons.is_empty() {
        let mut anchors = Vec::new();
        for c in &comparisons {
            if let Some(g) = &c.max_gap {
                push_unique(&mut anchors, AnchorRef::data_point(g.row, &c.a));
                push_unique(&mut anchors, AnchorRef::data_point(g.row, &c.b));
            }
        }
        b.fact(
            ids::COMPARISON,
            "Group comparison",
            FeaturePayload::Comparison { comparisons },
            anchors,
        );
    }

    b.features.push(Feature {
        feature_id: ids::CONTEXT.to_string(),
        category: FeatureCategory::Context,
        label: "Context".to_string(),
        requires_variable: false,
        payload: FeaturePayload::Context,
        anchors: vec![],
    });

    FeatureCatalog {
        chart_id: meta.id.clone(),
        chart_type,
        features: b.features,
        variables: if multivariate { variables } else { Vec::new() },
    }
}
