use super::IngestError;
use crate::color::{to_hex, Palette};
use crate::model::{ChartBundle, ChartType};

/// Fill and stroke colors of every element, de-duplicated, in document order.
///
/// Reads `fill` / `stroke` presentation attributes and the matching
/// declarations of inline `style` attributes (style wins over the attribute).
/// Paints that are `none`, `transparent`, fully transparent, or hidden by a
/// zero `opacity` / `fill-opacity` / `stroke-opacity` are skipped. Stylesheet
/// rules and class selectors are not resolved.
pub fn extract_svg_colors(svg_text: &str) -> Result<Vec<String>, IngestError> {
    let doc = parse(svg_text)?;
    let mut out: Vec<String> = Vec::new();
    for node in doc.descendants().filter(|n| n.is_element()) {
        for hex in element_paints(&node) {
            if !out.contains(&hex) {
                out.push(hex);
            }
        }
    }
    Ok(out)
}

fn parse(svg_text: &str) -> Result<roxmltree::Document<'_>, IngestError> {
    roxmltree::Document::parse(svg_text).map_err(|e| IngestError::MalformedMarkup(e.to_string()))
}

/// Visible fill and stroke of one element, as normalized hex.
fn element_paints(node: &roxmltree::Node) -> Vec<String> {
    let style = node.attribute("style").map(parse_style).unwrap_or_default();
    let lookup = |prop: &str| -> Option<String> {
        style
            .iter()
            .rev()
            .find(|(k, _)| k == prop)
            .map(|(_, v)| v.clone())
            .or_else(|| node.attribute(prop).map(str::to_string))
    };
    if is_zero(lookup("opacity").as_deref()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (paint, opacity) in [("fill", "fill-opacity"), ("stroke", "stroke-opacity")] {
        if is_zero(lookup(opacity).as_deref()) {
            continue;
        }
        if let Some(hex) = lookup(paint).as_deref().and_then(parse_css_color) {
            out.push(hex);
        }
    }
    out
}

/// Adds `data-row` / `data-column` attributes to the marks of `bundle`'s
/// chart so anchors can be mapped to elements.
///
/// A variable's marks are the elements painted in its color (colors are
/// paired with variables in order when their counts match). They are
/// labelled only when there is exactly one mark per row, or one per present
/// value. Pie slices are matched one color per row. Anything ambiguous is
/// left untouched.
pub fn annotate_svg(svg_text: &str, bundle: &ChartBundle) -> Result<String, IngestError> {
    let doc = parse(svg_text)?;
    let table = &bundle.table;
    let variables = table.dependent_numeric();
    let colors = &bundle.extracted_colors;
    let elements: Vec<(usize, Vec<String>)> = doc
        .descendants()
        .filter(|n| n.is_element())
        .map(|n| (n.range().start, element_paints(&n)))
        .collect();
    let painted = |hex: &str| -> Vec<usize> {
        elements
            .iter()
            .filter(|(_, paints)| paints.iter().any(|p| p == hex))
            .map(|(start, _)| *start)
            .collect()
    };

    // (tag start offset, row, column)
    let mut labels: Vec<(usize, usize, String)> = Vec::new();
    let pie_like = bundle.metadata.chart_type == ChartType::Pie
        && variables.len() == 1
        && colors.len() == table.rows.len();
    if pie_like {
        for (row, hex) in colors.iter().enumerate() {
            for start in painted(hex) {
                labels.push((start, row, variables[0].to_string()));
            }
        }
    } else if !variables.is_empty() && colors.len() == variables.len() {
        for (var, hex) in variables.iter().zip(colors) {
            let marks = painted(hex);
            let j = table.column_index(var).expect("dependent column exists");
            let present: Vec<usize> = (0..table.rows.len())
                .filter(|&r| !table.rows[r][j].is_missing())
                .collect();
            let rows: Vec<usize> = if marks.len() == table.rows.len() {
                (0..table.rows.len()).collect()
            } else if marks.len() == present.len() {
                present
            } else {
                continue;
            };
            for (start, row) in marks.into_iter().zip(rows) {
                labels.push((start, row, var.to_string()));
            }
        }
    }

    labels.sort_by_key(|l| std::cmp::Reverse(l.0));
    let mut out = svg_text.to_string();
    for (start, row, column) in labels {
        let name_end = out[start + 1..]
            .find(|c: char| c.is_whitespace() || c == '/' || c == '>')
            .map(|i| start + 1 + i)
            .unwrap_or(out.len());
        let attrs = format!(r#" data-row="{row}" data-column="{}""#, escape_attr(&column));
        out.insert_str(name_end, &attrs);
    }
    Ok(out)
}

fn escape_attr(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('"', "&quot;")
        .replace('<', "&lt;")
}

fn parse_style(style: &str) -> Vec<(String, String)> {
    style
        .split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            let v = v.trim().trim_end_matches("!important").trim();
            Some((k.trim().to_ascii_lowercase(), v.to_string()))
        })
        .collect()
}

fn is_zero(v: Option<&str>) -> bool {
    let Some(v) = v else { return false };
    let v = v.trim();
    let parsed = match v.strip_suffix('%') {
        Some(p) => p.trim().parse::<f64>().map(|x| x / 100.0),
        None => v.parse::<f64>(),
    };
    matches!(parsed, Ok(x) if x <= 0.0)
}

/// Normalizes an opaque CSS color value to `#RRGGBB`. Returns `None` for
/// non-colors (`none`, `url(...)`, `currentColor`) and fully transparent ones.
pub fn parse_css_color(value: &str) -> Option<String> {
    let v = value.trim().to_ascii_lowercase();
    if let Some(hex) = v.strip_prefix('#') {
        if !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return None;
        }
        let nibble = |i: usize| u8::from_str_radix(&hex[i..i + 1], 16).ok();
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
        let (rgb, alpha) = match hex.len() {
            3 | 4 => {
                let rgb = [nibble(0)? * 17, nibble(1)? * 17, nibble(2)? * 17];
                let alpha = if hex.len() == 4 { nibble(3)? } else { 15 };
                (rgb, alpha)
            }
            6 | 8 => {
                let rgb = [byte(0)?, byte(2)?, byte(4)?];
                let alpha = if hex.len() == 8 { byte(6)? } else { 255 };
                (rgb, alpha)
            }
            _ => return None,
        };
        return (alpha != 0).then(|| to_hex(rgb));
    }
    if let Some(args) = v
        .strip_prefix("rgba(")
        .or_else(|| v.strip_prefix("rgb("))
        .and_then(|rest| rest.strip_suffix(')'))
    {
        return parse_rgb_function(args);
    }
    Palette::css3().lookup(&v).map(|e| e.hex.clone())
}

fn parse_rgb_function(args: &str) -> Option<String> {
    // Both "r, g, b[, a]" and "r g b[ / a]" syntaxes.
    let (channels, alpha) = match args.split_once('/') {
        Some((c, a)) => (c, Some(a.trim())),
        None => (args, None),
    };
    let mut parts: Vec<&str> = channels
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    let alpha = match (alpha, parts.len()) {
        (Some(a), 3) => Some(a),
        (None, 4) => parts.pop(),
        (None, 3) => None,
        _ => return None,
    };
    if let Some(a) = alpha {
        if is_zero(Some(a)) {
            return None;
        }
    }
    let channel = |s: &str| -> Option<u8> {
        let x = match s.strip_suffix('%') {
            Some(p) => p.parse::<f64>().ok()? * 255.0 / 100.0,
            None => s.parse::<f64>().ok()?,
        };
        Some(x.round().clamp(0.0, 255.0) as u8)
    };
    Some(to_hex([channel(parts[0])?, channel(parts[1])?, channel(parts[2])?]))
}
