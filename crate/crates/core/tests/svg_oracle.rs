use chartscribe_core::ingestion::extract_svg_colors;
use proptest::prelude::*;
use regex::Regex;

/// Document-order `fill`/`stroke` hex attributes, uppercased and deduplicated.
fn regex_oracle(svg: &str) -> Vec<String> {
    let re = Regex::new(r##"(?:fill|stroke)="#([0-9a-fA-F]{6})""##).unwrap();
    let mut out: Vec<String> = Vec::new();
    for cap in re.captures_iter(svg) {
        let hex = format!("#{}", cap[1].to_ascii_uppercase());
        if !out.contains(&hex) {
            out.push(hex);
        }
    }
    out
}

fn element() -> impl Strategy<Value = String> {
    let hex = "[0-9a-fA-F]{6}";
    prop_oneof![
        hex.prop_map(|h| format!(r##"<rect width="3" fill="#{h}"/>"##)),
        hex.prop_map(|h| format!(r##"<path d="M0 0" fill="none" stroke="#{h}"/>"##)),
        (hex, hex).prop_map(|(a, b)| format!(r##"<circle r="2" fill="#{a}" stroke="#{b}"/>"##)),
        Just(r#"<rect fill="none"/>"#.to_string()),
        Just("<text>label</text>".to_string()),
        hex.prop_map(|h| format!(r##"<g><rect fill="#{h}"/></g>"##)),
    ]
}

proptest! {
    #[test]
    fn extraction_matches_regex_oracle(body in prop::collection::vec(element(), 0..30)) {
        let svg = format!(r#"<svg xmlns="http://www.w3.org/2000/svg">{}</svg>"#, body.concat());
        prop_assert_eq!(extract_svg_colors(&svg).unwrap(), regex_oracle(&svg));
    }
}
