use serde::{Deserialize, Serialize};

use super::TextgenError;

const MINUS: char = '\u{2212}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatConfig {
    /// Maximum digits after the decimal point.
    pub max_decimals: usize,
}

impl Default for FormatConfig {
    fn default() -> Self {
        FormatConfig { max_decimals: 2 }
    }
}

/// Rounds half away from zero on the shortest decimal representation of `v`,
/// strips trailing zeros and writes negatives with U+2212.
///
/// Working on the shortest representation means `1.005` rounds to `1.01`,
/// as a reader would expect, even though the nearest double is slightly less.
pub fn format_number(v: f64, fmt: FormatConfig) -> Result<String, TextgenError> {
    if !v.is_finite() {
        return Err(TextgenError::NonFinite);
    }
    let shortest = format!("{}", v.abs());
    let (int_part, frac_part) = shortest.split_once('.').unwrap_or((&shortest, ""));
    let keep = fmt.max_decimals.min(frac_part.len());
    let mut digits: Vec<u8> = int_part.bytes().chain(frac_part[..keep].bytes()).collect();
    let round_up = frac_part.as_bytes().get(keep).is_some_and(|d| *d >= b'5');
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - keep;
    let int_digits = std::str::from_utf8(&digits[..split]).expect("ascii digits");
    let frac_digits = std::str::from_utf8(&digits[split..])
        .expect("ascii digits")
        .trim_end_matches('0');
    let mut out = String::new();
    let is_zero = int_digits.bytes().all(|d| d == b'0') && frac_digits.is_empty();
    if v < 0.0 && !is_zero {
        out.push(MINUS);
    }
    out.push_str(int_digits);
    if !frac_digits.is_empty() {
        out.push('.');
        out.push_str(frac_digits);
    }
    Ok(out)
}
