//! Slow, straightforward reference implementations. Nothing here depends on
//! the engine crates; tests compare the engine against these.

/// CIE L*a*b* (D65) of an `#RRGGBB` color, written from the CIE formulas
/// with the `(6/29)` form of the cube-root threshold.
pub fn hex_to_lab(hex: &str) -> [f64; 3] {
    let h = hex.trim_start_matches('#');
    assert_eq!(h.len(), 6, "expected #RRGGBB, got {hex}");
    let channel = |i: usize| {
        let c = u8::from_str_radix(&h[i..i + 2], 16).expect("hex digit") as f64 / 255.0;
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    };
    let (r, g, b) = (channel(0), channel(2), channel(4));
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let delta: f64 = 6.0 / 29.0;
    let f = |t: f64| {
        if t > delta.powi(3) {
            t.cbrt()
        } else {
            t / (3.0 * delta * delta) + 4.0 / 29.0
        }
    };
    let (fx, fy, fz) = (f(x / 0.95047), f(y / 1.0), f(z / 1.08883));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn delta_e76(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

const PALETTE: &str = include_str!("../../core/assets/css3_colors.csv");

/// `(name, #RRGGBB)` for every CSS3 extended color name.
pub fn css3_palette() -> Vec<(String, String)> {
    PALETTE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (name, hex) = l.split_once(',').expect("name,hex");
            (name.trim().to_string(), hex.trim().to_ascii_uppercase())
        })
        .collect()
}

/// Scans every palette entry; ties go to the lexicographically smallest name.
pub fn nearest_exhaustive(hex: &str, palette: &[(String, String)]) -> (String, f64) {
    let lab = hex_to_lab(hex);
    let mut best: Option<(String, f64)> = None;
    for (name, h) in palette {
        let d = delta_e76(lab, hex_to_lab(h));
        let better = match &best {
            None => true,
            Some((bn, bd)) => d < *bd || (d == *bd && name < bn),
        };
        if better {
            best = Some((name.clone(), d));
        }
    }
    best.expect("non-empty palette")
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation from pairwise differences:
/// `var = sum_{i<j} (x_i - x_j)^2 / n^2`.
pub fn stddev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s += (v[i] - v[j]).powi(2);
        }
    }
    (s / (n * n)).sqrt()
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

pub fn median(v: &[f64]) -> f64 {
    let s = sorted(v);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Linear interpolation between order statistics at `h = (n - 1) p`.
pub fn quantile(v: &[f64], p: f64) -> f64 {
    let s = sorted(v);
    let h = (s.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

/// Indices of values outside `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`.
pub fn iqr_outliers(v: &[f64]) -> Vec<usize> {
    let (q1, q3) = (quantile(v, 0.25), quantile(v, 0.75));
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    (0..v.len()).filter(|&i| v[i] < lo || v[i] > hi).collect()
}

/// Pearson r from pairwise co-differences; `None` when undefined.
pub fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// First index of the maximum and of the minimum.
pub fn extrema(v: &[f64]) -> (usize, usize) {
    let mut max = 0;
    let mut min = 0;
    for i in 1..v.len() {
        if v[i] > v[max] {
            max = i;
        }
        if v[i] < v[min] {
            min = i;
        }
    }
    (max, min)
}
