use std::collections::HashSet;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::IngestError;
use crate::model::{Cell, ColumnKind, ColumnSpec, DataTable, Timestamp};

/// Cell texts that mean "no value" in numeric and temporal columns.
const MISSING_MARKERS: [&str; 5] = ["", "na", "n/a", "nan", "null"];

fn is_missing_marker(s: &str) -> bool {
    let lower = s.to_ascii_lowercase();
    MISSING_MARKERS.contains(&lower.as_str())
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// ISO-8601 dates (`YYYY`, `YYYY-MM`, `YYYY-MM-DD`, optionally with a time
/// and offset). Offsets are normalized to UTC.
pub(crate) fn parse_temporal(s: &str) -> Option<NaiveDateTime> {
    let midnight = |d: NaiveDate| d.and_hms_opt(0, 0, 0);
    let bytes = s.as_bytes();
    match s.len() {
        4 if bytes.iter().all(u8::is_ascii_digit) => {
            return NaiveDate::from_ymd_opt(s.parse().ok()?, 1, 1).and_then(midnight);
        }
        7 if bytes[4] == b'-' => {
            return NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
                .ok()
                .and_then(midnight);
        }
        10 => return NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(midnight),
        _ => {}
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_utc());
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
}

/// Numeric if every non-missing cell is a finite number, else Temporal if
/// every non-missing cell is an ISO date, else Categorical.
pub fn infer_kind<'a>(cells: impl IntoIterator<Item = &'a str> + Clone) -> ColumnKind {
    let present = || cells.clone().into_iter().filter(|c| !is_missing_marker(c));
    if present().all(|c| parse_number(c).is_some()) {
        ColumnKind::Numeric
    } else if present().all(|c| parse_temporal(c).is_some()) {
        ColumnKind::Temporal
    } else {
        ColumnKind::Categorical
    }
}

fn to_cell(kind: ColumnKind, raw: &str) -> Cell {
    match kind {
        ColumnKind::Categorical if raw.is_empty() => Cell::Missing,
        ColumnKind::Categorical => Cell::Text(raw.to_string()),
        _ if is_missing_marker(raw) => Cell::Missing,
        ColumnKind::Numeric => Cell::Number(parse_number(raw).expect("inferred numeric")),
        ColumnKind::Temporal => Cell::Temporal(Timestamp {
            raw: raw.to_string(),
            instant: parse_temporal(raw).expect("inferred temporal"),
        }),
    }
}

/// Parses comma-separated text with a header row (RFC 4180 quoting).
pub fn parse_data_table(csv_text: &str) -> Result<DataTable, IngestError> {
    if csv_text.trim().is_empty() {
        return Err(IngestError::EmptyInput);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| IngestError::Csv(e.to_string()))?,
        None => return Err(IngestError::EmptyInput),
    };
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(IngestError::DuplicateColumn(name.clone()));
        }
    }

    let mut raw_rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
        if record.len() != names.len() {
            return Err(IngestError::RaggedRow(i));
        }
        raw_rows.push(record.iter().map(str::to_string).collect());
    }

    let columns: Vec<ColumnSpec> = names
        .into_iter()
        .enumerate()
        .map(|(j, name)| {
            let kind = infer_kind(raw_rows.iter().map(|r| r[j].as_str()));
            ColumnSpec { name, kind }
        })
        .collect();
    let rows = raw_rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&columns)
                .map(|(raw, col)| to_cell(col.kind, raw))
                .collect()
        })
        .collect();
    Ok(DataTable { columns, rows })
}

/// CSV text that [`parse_data_table`] reads back into an equal table.
pub fn serialize_data_table(table: &DataTable) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(table.columns.iter().map(|c| c.name.as_str()))
        .expect("write to memory");
    for row in &table.rows {
        writer
            .write_record(row.iter().map(Cell::to_csv_field))
            .expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 input")
}
