use std::path::Path;

use chartscribe_core::ingestion::{
    load_bundle, metadata_to_document, parse_data_table, parse_metadata, serialize_data_table, write_bundle,
};
use chartscribe_core::model::{
    validate_bundle, AxisLabels, Cell, ChartBundle, ChartMetadata, ChartType, ColumnKind, ColumnSpec, DataTable,
    SortOrder,
};
use chrono::{DateTime, Utc};
use proptest::prelude::*;

fn trimmed_text() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ,.%()-]{0,18}[A-Za-z0-9.)]"
}

fn metadata() -> impl Strategy<Value = ChartMetadata> {
    (
        "[a-z0-9]{1,8}",
        prop_oneof![Just(String::new()), trimmed_text()],
        prop::option::of(trimmed_text()),
        prop::option::of(trimmed_text()),
        prop::sample::select(ChartType::ALL.to_vec()),
        (prop::option::of(trimmed_text()), prop::option::of(trimmed_text())),
        prop::option::of(prop::sample::select(vec![SortOrder::Ascending, SortOrder::Descending])),
        0i64..4_000_000_000,
        prop::option::of(trimmed_text()),
    )
        .prop_map(
            |(id, title, subtitle, footnote, chart_type, (independent, dependent), declared_sorted, secs, source_note)| {
                ChartMetadata {
                    id,
                    title,
                    subtitle,
                    footnote,
                    chart_type,
                    axis_labels: AxisLabels { independent, dependent },
                    declared_sorted,
                    created_at: DateTime::<Utc>::from_timestamp(secs, 0).unwrap(),
                    source_note,
                }
            },
        )
}

fn cell_text(kind: ColumnKind) -> BoxedStrategy<String> {
    match kind {
        // Categorical cells always start with `K`.
        ColumnKind::Categorical => "K[a-z ,\"]{0,6}[a-z]".boxed(),
        ColumnKind::Numeric => prop_oneof![
            (-1e6..1e6f64).prop_map(|v| v.to_string()),
            (-50i32..50).prop_map(|v| v.to_string()),
        ]
        .boxed(),
        ColumnKind::Temporal => (1900i32..2100, 1u32..13, 1u32..29)
            .prop_map(|(y, m, d)| format!("{y:04}-{m:02}-{d:02}"))
            .boxed(),
    }
}

/// CSV text for a table with a fixed column kind per column. Row 0 is fully
/// present so every column keeps its kind.
fn csv_text() -> impl Strategy<Value = String> {
    let kinds = prop::collection::vec(
        prop::sample::select(vec![ColumnKind::Categorical, ColumnKind::Numeric, ColumnKind::Temporal]),
        1..5,
    );
    (kinds, 1usize..12).prop_flat_map(|(kinds, rows)| {
        let row = kinds
            .iter()
            .map(|&k| prop_oneof![4 => cell_text(k), 1 => Just(String::new())])
            .collect::<Vec<_>>();
        let first = kinds.iter().map(|&k| cell_text(k)).collect::<Vec<_>>();
        let n = kinds.len();
        (first, prop::collection::vec(row, rows - 1)).prop_map(move |(first, rest)| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record((0..n).map(|j| format!("col{j}"))).unwrap();
            w.write_record(&first).unwrap();
            for r in rest {
                w.write_record(&r).unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn metadata_document_round_trips(meta in metadata()) {
        let doc = metadata_to_document(&meta).to_string();
        prop_assert_eq!(parse_metadata(&doc).unwrap(), meta);
    }

    #[test]
    fn table_csv_round_trips(text in csv_text()) {
        let table = parse_data_table(&text).unwrap();
        let again = parse_data_table(&serialize_data_table(&table)).unwrap();
        prop_assert_eq!(again, table);
    }

    #[test]
    fn bundle_directory_round_trips(meta in metadata(), text in csv_text()) {
        let bundle = ChartBundle {
            metadata: meta,
            table: parse_data_table(&text).unwrap(),
            svg_text: None,
            extracted_colors: Vec::new(),
        };
        let validated = validate_bundle(bundle.clone()).unwrap();
        prop_assert_eq!(&validated, &bundle);
        prop_assert_eq!(validate_bundle(validated.clone()).unwrap(), validated);

        let dir = tempfile::tempdir().unwrap();
        write_bundle(&bundle, dir.path()).unwrap();
        prop_assert_eq!(load_bundle(dir.path()).unwrap(), bundle);
    }
}

#[test]
fn fixtures_survive_a_write_and_reload() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let bundle = load_bundle(entry.unwrap().path()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_bundle(&bundle, dir.path()).unwrap();
        assert_eq!(load_bundle(dir.path()).unwrap(), bundle);
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn invalid_tables_are_rejected() {
    let meta = parse_metadata(r#"{"id":"x","type":"bar","created_at":"2024-01-01T00:00:00Z"}"#).unwrap();
    let table = DataTable {
        columns: vec![
            ColumnSpec { name: "a".into(), kind: ColumnKind::Categorical },
            ColumnSpec { name: "b".into(), kind: ColumnKind::Numeric },
        ],
        rows: vec![vec![Cell::Text("x".into())]],
    };
    let bundle = ChartBundle { metadata: meta, table, svg_text: None, extracted_colors: vec![] };
    assert!(validate_bundle(bundle).is_err());
}
