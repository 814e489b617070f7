use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde_json::Value;

use super::IngestError;
use crate::model::{AxisLabels, ChartMetadata, ChartType, SortOrder};

/// Parses a metadata JSON document.
///
/// Flat keys (`id`, `title`, `type`, `subtitle`, `footnote`, `axis_labels`,
/// `sorted`, `created_at`, `source_note`) take precedence; Datawrapper's
/// nested `metadata.describe` / `metadata.annotate` blocks and `createdAt`
/// are used as fallbacks. Unrecognized keys are ignored.
pub fn parse_metadata(doc: &str) -> Result<ChartMetadata, IngestError> {
    let root: Value =
        serde_json::from_str(doc).map_err(|e| IngestError::MalformedDocument(e.to_string()))?;
    if !root.is_object() {
        return Err(IngestError::MalformedDocument("expected a JSON object".into()));
    }

    let id = match root.get("id") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(IngestError::MissingField("id")),
    };
    let type_text = text_at(&root, &["type"]).ok_or(IngestError::MissingField("type"))?;
    let chart_type: ChartType = type_text
        .parse()
        .map_err(|_| IngestError::UnknownChartType(type_text.clone()))?;

    let created_raw = text_at(&root, &["created_at"])
        .or_else(|| text_at(&root, &["createdAt"]))
        .ok_or(IngestError::MissingField("created_at"))?;
    let created_at = parse_instant(&created_raw)?;

    let axis_labels = AxisLabels {
        independent: text_at(&root, &["axis_labels", "independent"]),
        dependent: text_at(&root, &["axis_labels", "dependent"]),
    };

    Ok(ChartMetadata {
        id,
        title: text_at(&root, &["title"]).unwrap_or_default(),
        subtitle: text_at(&root, &["subtitle"])
            .or_else(|| text_at(&root, &["metadata", "describe", "intro"])),
        footnote: text_at(&root, &["footnote"])
            .or_else(|| text_at(&root, &["metadata", "annotate", "notes"])),
        chart_type,
        axis_labels,
        declared_sorted: text_at(&root, &["sorted"]).and_then(|s| parse_sort(&s)),
        created_at,
        source_note: text_at(&root, &["source_note"])
            .or_else(|| text_at(&root, &["metadata", "describe", "source-name"])),
    })
}

/// The canonical flat document for `meta`; parses back to an equal value.
pub fn metadata_to_document(meta: &ChartMetadata) -> Value {
    serde_json::to_value(meta).expect("metadata serializes")
}

/// Non-empty trimmed string at a key path.
fn text_at(root: &Value, path: &[&str]) -> Option<String> {
    let mut v = root;
    for key in path {
        v = v.get(key)?;
    }
    v.as_str()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn parse_sort(s: &str) -> Option<SortOrder> {
    match s.to_ascii_lowercase().as_str() {
        "asc" | "ascending" => Some(SortOrder::Ascending),
        "desc" | "descending" => Some(SortOrder::Descending),
        _ => None,
    }
}

fn parse_instant(raw: &str) -> Result<DateTime<Utc>, IngestError> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(naive.and_utc());
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(date.and_hms_opt(0, 0, 0).unwrap().and_utc());
    }
    Err(IngestError::InvalidTimestamp(raw.to_string()))
}
