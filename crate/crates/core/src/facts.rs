//! Descriptive statistics over a single series: extrema, central tendency,
//! spread, IQR outliers, monotonicity, trend segmentation with slopes,
//! Pearson correlation and pie shares.

use serde::Serialize;
use thiserror::Error;

use crate::model::{ChartBundle, ChartType, ColumnKind, Series, SeriesError};
use crate::par::{self, ExecMode};

/// Deltas at or below this magnitude count as flat.
pub const FLAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactsError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series needs at least two points")]
    TooShort,
    #[error("input has zero variance")]
    ConstantInput,
    #[error("x and y lengths differ")]
    LengthMismatch,
    #[error("negative value in proportions")]
    NegativeValue,
    #[error("values sum to zero")]
    ZeroTotal,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Interval-count threshold and top-k used to pick significant intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrendConfig {
    pub threshold: usize,
    pub top_k: usize,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            threshold: 4,
            top_k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrema {
    pub max_value: f64,
    pub max_label: String,
    pub max_row: usize,
    pub min_value: f64,
    pub min_label: String,
    pub min_row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonic {
    Increasing,
    Decreasing,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Rising,
    Falling,
    Constant,
}

impl Direction {
    fn of(delta: f64) -> Self {
        if delta.abs() <= FLAT_TOLERANCE {
            Direction::Constant
        } else if delta > 0.0 {
            Direction::Rising
        } else {
            Direction::Falling
        }
    }

    pub fn matches(self, monotonic: Monotonic) -> bool {
        matches!(
            (self, monotonic),
            (Direction::Rising, Monotonic::Increasing)
                | (Direction::Falling, Monotonic::Decreasing)
                | (Direction::Constant, Monotonic::Constant)
        )
    }
}

/// Positions `start..=end` are series indices, not table rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendInterval {
    pub start: usize,
    pub end: usize,
    pub direction: Direction,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outlier {
    pub row: usize,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    /// Tukey fences at 1.5 IQR.
    pub fn fences(&self) -> (f64, f64) {
        let spread = 1.5 * self.iqr();
        (self.q1 - spread, self.q3 + spread)
    }
}

/// Unit of slopes along the independent axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeUnit {
    PerStep,
    PerUnit,
    PerDay,
}

impl SlopeUnit {
    pub fn for_kind(kind: ColumnKind) -> Self {
        match kind {
            ColumnKind::Categorical => SlopeUnit::PerStep,
            ColumnKind::Numeric => SlopeUnit::PerUnit,
            ColumnKind::Temporal => SlopeUnit::PerDay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactsBundle {
    pub variable: String,
    pub extrema: Extrema,
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
    pub quartiles: Quartiles,
    pub outliers: Vec<Outlier>,
    pub monotonic: Option<Monotonic>,
    pub intervals: Vec<TrendInterval>,
    pub significant: Vec<TrendInterval>,
    pub slope_unit: SlopeUnit,
    pub correlation: Option<f64>,
    pub pie_shares: Option<Vec<f64>>,
    pub dropped_rows: Vec<usize>,
}

fn non_empty(s: &Series) -> Result<&[f64], FactsError> {
    if s.y.is_empty() {
        Err(FactsError::EmptySeries)
    } else {
        Ok(&s.y)
    }
}

/// Largest and smallest values; the first occurrence wins a tie.
pub fn extrema(s: &Series) -> Result<Extrema, FactsError> {
    let y = non_empty(s)?;
    let (mut hi, mut lo) = (0, 0);
    for (i, v) in y.iter().enumerate().skip(1) {
        if *v > y[hi] {
            hi = i;
        }
        if *v < y[lo] {
            lo = i;
        }
    }
    Ok(Extrema {
        max_value: y[hi],
        max_label: s.x[hi].label(),
        max_row: s.rows[hi],
        min_value: y[lo],
        min_label: s.x[lo].label(),
        min_row: s.rows[lo],
    })
}

fn mean_of(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

pub fn mean(s: &Series) -> Result<f64, FactsError> {
    non_empty(s).map(mean_of)
}

/// Population standard deviation (divides by n).
pub fn stddev(s: &Series) -> Result<f64, FactsError> {
    let y = non_empty(s)?;
    let m = mean_of(y);
    let ss: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((ss / y.len() as f64).sqrt())
}

fn sorted(y: &[f64]) -> Vec<f64> {
    let mut v = y.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Type-7 quantile: linear interpolation at zero-based position p·(n−1).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(s: &Series) -> Result<f64, FactsError> {
    let v = sorted(non_empty(s)?);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

pub fn quartiles(s: &Series) -> Result<Quartiles, FactsError> {
    let v = sorted(non_empty(s)?);
    Ok(Quartiles {
        q1: quantile_sorted(&v, 0.25),
        q2: quantile_sorted(&v, 0.5),
        q3: quantile_sorted(&v, 0.75),
    })
}

/// Points outside the 1.5·IQR fences, in row order.
pub fn iqr_outliers(s: &Series) -> Result<Vec<Outlier>, FactsError> {
    let (lo, hi) = quartiles(s)?.fences();
    Ok(s.y
        .iter()
        .enumerate()
        .filter(|(_, v)| **v < lo || **v > hi)
        .map(|(i, v)| Outlier {
            row: s.rows[i],
            label: s.x[i].label(),
            value: *v,
        })
        .collect())
}

/// Non-strict monotonicity; `None` when the series goes both up and down.
pub fn is_monotonic(s: &Series) -> Result<Option<Monotonic>, FactsError> {
    if s.len() < 2 {
        return Err(FactsError::TooShort);
    }
    let (mut up, mut down) = (false, false);
    for w in s.y.windows(2) {
        match Direction::of(w[1] - w[0]) {
            Direction::Rising => up = true,
            Direction::Falling => down = true,
            Direction::Constant => {}
        }
    }
    Ok(match (up, down) {
        (false, false) => Some(Monotonic::Constant),
        (true, false) => Some(Monotonic::Increasing),
        (false, true) => Some(Monotonic::Decreasing),
        (true, true) => None,
    })
}

/// Splits the series into maximal rising, falling and flat runs.
///
/// A flat run whose neighbouring runs all move the same way (or that sits at
/// either end next to a single run) is folded into that run, so a
/// non-strictly monotone series is always one interval. Intervals tile
/// `0..=n-1` and share endpoints.
pub fn segment_trend(s: &Series) -> Result<Vec<TrendInterval>, FactsError> {
    let n = s.len();
    if n < 2 {
        return Err(FactsError::TooShort);
    }
    // (direction, start, end) in point indices.
    let mut runs: Vec<(Direction, usize, usize)> = Vec::new();
    for i in 0..n - 1 {
        let d = Direction::of(s.y[i + 1] - s.y[i]);
        match runs.last_mut() {
            Some(last) if last.0 == d => last.2 = i + 1,
            _ => runs.push((d, i, i + 1)),
        }
    }

    let relabelled: Vec<Direction> = runs
        .iter()
        .enumerate()
        .map(|(i, &(d, _, _))| {
            if d != Direction::Constant {
                return d;
            }
            let prev = i.checked_sub(1).map(|j| runs[j].0);
            let next = runs.get(i + 1).map(|r| r.0);
            match (prev, next) {
                (Some(p), Some(q)) if p == q => p,
                (Some(p), None) => p,
                (None, Some(q)) => q,
                _ => d,
            }
        })
        .collect();

    let mut merged: Vec<(Direction, usize, usize)> = Vec::new();
    for (&(_, start, end), &d) in runs.iter().zip(&relabelled) {
        match merged.last_mut() {
            Some(last) if last.0 == d => last.2 = end,
            _ => merged.push((d, start, end)),
        }
    }

    let pos = s.positions();
    Ok(merged
        .into_iter()
        .map(|(direction, start, end)| {
            let dy = s.y[end] - s.y[start];
            let dx = pos[end] - pos[start];
            // Repeated x values fall back to per-step slopes.
            let slope = if dx != 0.0 {
                dy / dx
            } else {
                dy / (end - start) as f64
            };
            TrendInterval {
                start,
                end,
                direction,
                slope,
            }
        })
        .collect())
}

/// All intervals when there are at most `threshold` of them, otherwise the
/// `top_k` steepest (earlier start wins ties) back in start order.
pub fn significant_intervals(intervals: &[TrendInterval], config: TrendConfig) -> Vec<TrendInterval> {
    if intervals.len() <= config.threshold {
        return intervals.to_vec();
    }
    let mut ranked: Vec<&TrendInterval> = intervals.iter().collect();
    ranked.sort_by(|a, b| {
        b.slope
            .abs()
            .total_cmp(&a.slope.abs())
            .then(a.start.cmp(&b.start))
    });
    let mut top: Vec<TrendInterval> = ranked.into_iter().take(config.top_k).copied().collect();
    top.sort_by_key(|i| i.start);
    top
}

/// Pearson correlation coefficient.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64, FactsError> {
    if x.len() != y.len() {
        return Err(FactsError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(FactsError::TooShort);
    }
    let mx = mean_of(x);
    let my = mean_of(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(FactsError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Each value's share of the total, in row order.
pub fn pie_proportions(s: &Series) -> Result<Vec<f64>, FactsError> {
    let y = non_empty(s)?;
    if y.iter().any(|v| *v < 0.0) {
        return Err(FactsError::NegativeValue);
    }
    let total: f64 = y.iter().sum();
    if total <= 0.0 {
        return Err(FactsError::ZeroTotal);
    }
    Ok(y.iter().map(|v| v / total).collect())
}

fn has_axis(kind: ColumnKind) -> bool {
    matches!(kind, ColumnKind::Numeric | ColumnKind::Temporal)
}

/// Every applicable fact for one dependent variable of the bundle.
pub fn compute_facts(
    bundle: &ChartBundle,
    variable: &str,
    config: TrendConfig,
) -> Result<FactsBundle, FactsError> {
    let (series, dropped_rows) = Series::from_table(&bundle.table, variable).map_err(|e| match e {
        SeriesError::UnknownVariable(v) | SeriesError::NotDependentNumeric(v) => {
            FactsError::UnknownVariable(v)
        }
        SeriesError::Empty => FactsError::EmptySeries,
        other => FactsError::Series(other),
    })?;
    facts_for_series(&series, dropped_rows, bundle.metadata.chart_type, config)
}

pub fn facts_for_series(
    series: &Series,
    dropped_rows: Vec<usize>,
    chart_type: ChartType,
    config: TrendConfig,
) -> Result<FactsBundle, FactsError> {
    let trended = has_axis(series.x_kind) && series.len() >= 2;
    let (monotonic, intervals, significant, correlation) = if trended {
        let intervals = segment_trend(series)?;
        let significant = significant_intervals(&intervals, config);
        let r = correlation(&series.positions(), &series.y).ok();
        (is_monotonic(series)?, intervals, significant, r)
    } else {
        (None, vec![], vec![], None)
    };
    let pie_shares = if chart_type == ChartType::Pie {
        Some(pie_proportions(series)?)
    } else {
        None
    };
    Ok(FactsBundle {
        variable: series.label.clone(),
        extrema: extrema(series)?,
        mean: mean(series)?,
        stddev: stddev(series)?,
        median: median(series)?,
        quartiles: quartiles(series)?,
        outliers: iqr_outliers(series)?,
        monotonic,
        intervals,
        significant,
        slope_unit: SlopeUnit::for_kind(series.x_kind),
        correlation,
        pie_shares,
        dropped_rows,
    })
}

/// Facts for every dependent numeric variable, in table order.
pub fn compute_all_facts(
    bundle: &ChartBundle,
    config: TrendConfig,
    mode: ExecMode,
) -> Vec<Result<FactsBundle, FactsError>> {
    let variables: Vec<String> = bundle
        .table
        .dependent_numeric()
        .into_iter()
        .map(str::to_string)
        .collect();
    par::map(mode, &variables, |v| compute_facts(bundle, v, config))
}
