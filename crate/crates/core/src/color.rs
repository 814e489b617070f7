//! sRGB → CIELAB conversion and nearest-name lookup over the CSS3 extended
//! color keywords.
//!
//! Conversion chain: gamma-encoded sRGB → linear RGB → XYZ (D65, 2° observer)
//! → CIELAB. Names are chosen by smallest Euclidean distance in Lab (ΔE76),
//! ties going to the lexicographically smallest name.

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::par::{self, ExecMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("invalid hex color {0:?}")]
    InvalidHex(String),
    #[error("palette is empty")]
    EmptyPalette,
    #[error("palette line {line}: {reason}")]
    BadPalette { line: usize, reason: String },
}

// D65 reference white, Y normalized to 1.
const WHITE_X: f64 = 0.950_47;
const WHITE_Y: f64 = 1.0;
const WHITE_Z: f64 = 1.088_83;

// Linear sRGB → XYZ (D65).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabColor {
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    /// ΔE76.
    pub fn distance(&self, other: &LabColor) -> f64 {
        self.distance_squared(other).sqrt()
    }

    fn distance_squared(&self, other: &LabColor) -> f64 {
        let dl = self.l - other.l;
        let da = self.a - other.a;
        let db = self.b - other.b;
        dl * dl + da * da + db * db
    }
}

/// True for the canonical `#RRGGBB` uppercase form.
pub fn is_normalized_hex(s: &str) -> bool {
    s.len() == 7
        && s.starts_with('#')
        && s[1..]
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'A'..=b'F').contains(&b))
}

/// Parses `#RRGGBB` (either case) into channel bytes.
pub fn parse_hex(hex: &str) -> Result<[u8; 3], ColorError> {
    let digits = hex
        .strip_prefix('#')
        .filter(|d| d.len() == 6 && d.bytes().all(|b| b.is_ascii_hexdigit()))
        .ok_or_else(|| ColorError::InvalidHex(hex.to_string()))?;
    let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).unwrap();
    Ok([channel(0), channel(2), channel(4)])
}

pub fn to_hex(rgb: [u8; 3]) -> String {
    format!("#{:02X}{:02X}{:02X}", rgb[0], rgb[1], rgb[2])
}

/// Undo the sRGB transfer curve for one 8-bit channel.
pub fn srgb_to_linear(channel: u8) -> f64 {
    let c = f64::from(channel) / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

pub fn linear_to_xyz(rgb: [f64; 3]) -> [f64; 3] {
    let row = |m: [f64; 3]| m[0] * rgb[0] + m[1] * rgb[1] + m[2] * rgb[2];
    [row(RGB_TO_XYZ[0]), row(RGB_TO_XYZ[1]), row(RGB_TO_XYZ[2])]
}

pub fn xyz_to_lab(xyz: [f64; 3]) -> LabColor {
    const EPSILON: f64 = 216.0 / 24_389.0;
    const KAPPA: f64 = 24_389.0 / 27.0;
    let f = |t: f64| {
        if t > EPSILON {
            t.cbrt()
        } else {
            (KAPPA * t + 16.0) / 116.0
        }
    };
    let fx = f(xyz[0] / WHITE_X);
    let fy = f(xyz[1] / WHITE_Y);
    let fz = f(xyz[2] / WHITE_Z);
    LabColor {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

pub fn srgb_to_lab(hex: &str) -> Result<LabColor, ColorError> {
    let rgb = parse_hex(hex)?;
    Ok(rgb_to_lab(rgb))
}

pub fn rgb_to_lab(rgb: [u8; 3]) -> LabColor {
    let linear = rgb.map(srgb_to_linear);
    xyz_to_lab(linear_to_xyz(linear))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedColorEntry {
    pub name: String,
    pub hex: String,
    pub lab: LabColor,
}

/// A color palette indexed for nearest-neighbour queries in Lab.
///
/// Entries are kept sorted by lightness so a query can walk outwards from its
/// own L and stop once the lightness gap alone exceeds the best distance.
#[derive(Debug, Clone)]
pub struct Palette {
    by_lightness: Vec<NamedColorEntry>,
}

static CSS3: OnceLock<Palette> = OnceLock::new();

impl Palette {
    pub fn new(entries: Vec<NamedColorEntry>) -> Result<Self, ColorError> {
        if entries.is_empty() {
            return Err(ColorError::EmptyPalette);
        }
        let mut by_lightness = entries;
        by_lightness.sort_by(|a, b| a.lab.l.total_cmp(&b.lab.l).then_with(|| a.name.cmp(&b.name)));
        Ok(Palette { by_lightness })
    }

    /// Parses a `name,hex` CSV with a header line.
    pub fn from_csv(text: &str) -> Result<Self, ColorError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| ColorError::BadPalette {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (name, hex) = line.split_once(',').ok_or_else(|| bad("expected name,hex"))?;
            let rgb = parse_hex(hex.trim()).map_err(|_| bad("invalid hex"))?;
            entries.push(NamedColorEntry {
                name: name.trim().to_ascii_lowercase(),
                hex: to_hex(rgb),
                lab: rgb_to_lab(rgb),
            });
        }
        Self::new(entries)
    }

    /// The embedded CSS3 extended color keywords (147 names).
    pub fn css3() -> &'static Palette {
        CSS3.get_or_init(|| {
            Palette::from_csv(include_str!("../assets/css3_colors.csv"))
                .expect("embedded palette is valid")
        })
    }

    pub fn entries(&self) -> &[NamedColorEntry] {
        &self.by_lightness
    }

    pub fn len(&self) -> usize {
        self.by_lightness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_lightness.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<&NamedColorEntry> {
        self.by_lightness.iter().find(|e| e.name == name)
    }

    /// Nearest entry to `target`, returning it and the squared distance.
    fn nearest_lab(&self, target: &LabColor) -> (&NamedColorEntry, f64) {
        let entries = &self.by_lightness;
        let start = entries.partition_point(|e| e.lab.l < target.l);
        let mut best: Option<(&NamedColorEntry, f64)> = None;
        let better = |e: &NamedColorEntry, d: f64, best: &Option<(&NamedColorEntry, f64)>| match best {
            None => true,
            Some((b, bd)) => d < *bd || (d == *bd && e.name < b.name),
        };

        // Walk upwards in lightness.
        for e in &entries[start..] {
            let dl = e.lab.l - target.l;
            if let Some((_, bd)) = best {
                if dl * dl > bd {
                    break;
                }
            }
            let d = e.lab.distance_squared(target);
            if better(e, d, &best) {
                best = Some((e, d));
            }
        }
        // And downwards.
        for e in entries[..start].iter().rev() {
            let dl = target.l - e.lab.l;
            if let Some((_, bd)) = best {
                if dl * dl > bd {
                    break;
                }
            }
            let d = e.lab.distance_squared(target);
            if better(e, d, &best) {
                best = Some((e, d));
            }
        }
        best.expect("palette is non-empty")
    }
}

/// Closest palette name to `hex` and its ΔE76 distance.
pub fn nearest_color_name(hex: &str, palette: &Palette) -> Result<(String, f64), ColorError> {
    let lab = srgb_to_lab(hex)?;
    let (entry, d2) = palette.nearest_lab(&lab);
    Ok((entry.name.clone(), d2.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedColor {
    pub hex: String,
    pub name: String,
}

/// Names every color against the CSS3 palette, preserving input order.
pub fn name_chart_colors(colors: &[String]) -> Result<Vec<NamedColor>, ColorError> {
    name_chart_colors_with(colors, Palette::css3(), ExecMode::default())
}

pub fn name_chart_colors_with(
    colors: &[String],
    palette: &Palette,
    mode: ExecMode,
) -> Result<Vec<NamedColor>, ColorError> {
    par::map(mode, colors, |hex| {
        nearest_color_name(hex, palette).map(|(name, _)| NamedColor {
            hex: hex.clone(),
            name,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_white_and_black() {
        let w = srgb_to_lab("#FFFFFF").unwrap();
        assert_abs_diff_eq!(w.l, 100.0, epsilon = 1e-3);
        assert_abs_diff_eq!(w.a, 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(w.b, 0.0, epsilon = 1e-3);
        let k = srgb_to_lab("#000000").unwrap();
        assert_abs_diff_eq!(k.l, 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(k.a, 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(k.b, 0.0, epsilon = 1e-3);
    }

    #[test]
    fn pure_red() {
        let r = srgb_to_lab("#FF0000").unwrap();
        assert_abs_diff_eq!(r.l, 53.241, epsilon = 1e-2);
        assert_abs_diff_eq!(r.a, 80.092, epsilon = 1e-2);
        assert_abs_diff_eq!(r.b, 67.203, epsilon = 1e-2);
    }

    #[test]
    fn lowercase_hex_is_accepted_and_garbage_is_not() {
        assert_eq!(parse_hex("#ff8000").unwrap(), [255, 128, 0]);
        for bad in ["FF0000", "#FF00", "#GG0000", "", "#FF00000"] {
            assert_eq!(parse_hex(bad), Err(ColorError::InvalidHex(bad.into())));
        }
    }

    #[test]
    fn embedded_palette_has_all_css3_names() {
        let p = Palette::css3();
        assert_eq!(p.len(), 147);
        assert!(p.lookup("rebeccapurple").is_none());
        assert_eq!(p.lookup("aqua").unwrap().hex, p.lookup("cyan").unwrap().hex);
    }

    #[test]
    fn exact_members_and_alias_tie_break() {
        let p = Palette::css3();
        assert_eq!(nearest_color_name("#FF0000", p).unwrap(), ("red".into(), 0.0));
        assert_eq!(nearest_color_name("#00FFFF", p).unwrap(), ("aqua".into(), 0.0));
        assert_eq!(nearest_color_name("#FF00FF", p).unwrap(), ("fuchsia".into(), 0.0));
        assert_eq!(nearest_color_name("#808080", p).unwrap().0, "gray");
    }

    #[test]
    fn naming_preserves_order_and_is_idempotent() {
        let colors = vec!["#FF0000".to_string(), "#008000".to_string()];
        let named = name_chart_colors(&colors).unwrap();
        assert_eq!(
            named,
            vec![
                NamedColor {
                    hex: "#FF0000".into(),
                    name: "red".into()
                },
                NamedColor {
                    hex: "#008000".into(),
                    name: "green".into()
                },
            ]
        );
        assert_eq!(name_chart_colors(&colors).unwrap(), named);
        assert!(name_chart_colors(&[]).unwrap().is_empty());
        assert!(name_chart_colors(&["nope".to_string()]).is_err());
    }

    #[test]
    fn empty_palette_is_rejected() {
        assert_eq!(Palette::new(vec![]).unwrap_err(), ColorError::EmptyPalette);
    }
}
