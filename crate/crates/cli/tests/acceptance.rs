//! One PASS/FAIL line per acceptance criterion. Exits nonzero on any failure.

#[path = "../../service/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use chartscribe_core::color::{nearest_color_name, srgb_to_lab, to_hex, Palette};
use chartscribe_core::describe::catalog_for;
use chartscribe_core::facts::{
    correlation, extrema, facts_for_series, iqr_outliers, is_monotonic, mean, median, quartiles, segment_trend,
    stddev, FactsBundle, TrendConfig,
};
use chartscribe_core::features::ids;
use chartscribe_core::model::{ChartType, ColumnKind, Series};
use chartscribe_core::textgen::select_all;
use chartscribe_oracle as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = Result<String, String>;
type NamedCheck<'a> = Box<dyn Fn() -> Check + 'a>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn random_hex(rng: &mut ChaCha8Rng) -> String {
    to_hex([rng.random(), rng.random(), rng.random()])
}

fn palette_closure() -> Check {
    let start = Instant::now();
    let palette = Palette::css3();
    ensure!(palette.len() == 147, "palette has {} names", palette.len());
    for entry in palette.entries() {
        let (name, d) = nearest_color_name(&entry.hex, palette).map_err(|e| e.to_string())?;
        ensure!(d == 0.0, "{} at distance {d}", entry.hex);
        let named = palette.lookup(&name).ok_or("name not in palette")?;
        ensure!(named.hex == entry.hex, "{} named {name} ({})", entry.hex, named.hex);
        let first = palette.entries().iter().filter(|e| e.hex == entry.hex).map(|e| &e.name).min().unwrap();
        ensure!(&name == first, "{} named {name}, expected {first}", entry.hex);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("147 names in {elapsed:.2?}"))
}

fn color_oracle() -> Check {
    let palette = Palette::css3();
    let reference = oracle::css3_palette();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let hex = random_hex(&mut rng);
        let (name, d) = nearest_color_name(&hex, palette).map_err(|e| e.to_string())?;
        let (want, want_d) = oracle::nearest_exhaustive(&hex, &reference);
        ensure!(name == want, "{hex}: {name} vs {want}");
        worst = worst.max((d - want_d).abs());
        ensure!(worst <= TOL, "{hex}: distance {d} vs {want_d}");
    }
    Ok(format!("1000/1000 agree, max |dE diff| {worst:.1e}"))
}

fn lab_spots() -> Check {
    let cases = [
        ("#FFFFFF", [100.0, 0.0, 0.0], 1e-3),
        ("#000000", [0.0, 0.0, 0.0], 1e-3),
        ("#FF0000", [53.241, 80.092, 67.203], 1e-2),
    ];
    for (hex, want, tol) in cases {
        let lab = srgb_to_lab(hex).map_err(|e| e.to_string())?;
        let got = [lab.l, lab.a, lab.b];
        let independent = oracle::hex_to_lab(hex);
        for i in 0..3 {
            ensure!((got[i] - want[i]).abs() <= tol, "{hex}: {got:?} vs {want:?}");
            ensure!((got[i] - independent[i]).abs() <= tol, "{hex}: {got:?} vs oracle {independent:?}");
        }
    }
    Ok("white, black, red within tolerance".into())
}

fn random_series(rng: &mut ChaCha8Rng, len: std::ops::RangeInclusive<usize>) -> Vec<f64> {
    let n = rng.random_range(len);
    let integers = rng.random_bool(0.5);
    (0..n)
        .map(|_| {
            if integers {
                rng.random_range(0..20) as f64
            } else {
                rng.random_range(-1000.0..1000.0)
            }
        })
        .collect()
}

fn statistics_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for case in 0..500 {
        let y = random_series(&mut rng, 1..=200);
        let s = Series::indexed("v", y.clone()).map_err(|e| e.to_string())?;
        let q = quartiles(&s).map_err(|e| e.to_string())?;
        let pairs = [
            ("mean", mean(&s).unwrap(), oracle::mean(&y)),
            ("stddev", stddev(&s).unwrap(), oracle::stddev(&y)),
            ("median", median(&s).unwrap(), oracle::median(&y)),
            ("q1", q.q1, oracle::quantile(&y, 0.25)),
            ("q2", q.q2, oracle::quantile(&y, 0.5)),
            ("q3", q.q3, oracle::quantile(&y, 0.75)),
        ];
        for (what, got, want) in pairs {
            ensure!(close(got, want), "case {case} {what}: {got} vs {want}");
        }
        let rows: Vec<usize> = iqr_outliers(&s).unwrap().iter().map(|o| o.row).collect();
        ensure!(rows == oracle::iqr_outliers(&y), "case {case} outliers differ");
        let x = random_series(&mut rng, y.len()..=y.len());
        match (correlation(&x, &y), oracle::correlation(&x, &y)) {
            (Ok(r), Some(want)) => ensure!(close(r, want), "case {case} r: {r} vs {want}"),
            (Err(_), None) => {}
            (got, want) => return Err(format!("case {case} r: {got:?} vs {want:?}")),
        }
    }
    Ok("500 series agree".into())
}

fn trend_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let mut monotone_inputs = 0;
    for case in 0..500 {
        let mut y = random_series(&mut rng, 2..=200);
        let sorted = case % 4 == 0;
        if sorted {
            y.sort_by(f64::total_cmp);
            if case % 8 == 0 {
                y.reverse();
            }
            monotone_inputs += 1;
        }
        let s = Series::indexed("v", y.clone()).map_err(|e| e.to_string())?;
        let iv = segment_trend(&s).map_err(|e| e.to_string())?;
        ensure!(iv[0].start == 0 && iv.last().unwrap().end == y.len() - 1, "case {case}: not spanning");
        for w in iv.windows(2) {
            ensure!(w[0].end == w[1].start, "case {case}: gap or overlap");
            ensure!(w[0].direction != w[1].direction, "case {case}: repeated direction");
        }
        ensure!(iv.iter().all(|i| i.start < i.end), "case {case}: empty interval");
        if sorted {
            ensure!(iv.len() == 1, "case {case}: monotone input gave {} intervals", iv.len());
        }
        let monotone = is_monotonic(&s).map_err(|e| e.to_string())?;
        ensure!(monotone.is_some() == (iv.len() == 1), "case {case}: monotonic/single disagree");
    }
    Ok(format!("500 series ({monotone_inputs} monotone) hold"))
}

fn worked_fixtures() -> Check {
    let s = Series::indexed("v", vec![1.0, 3.0, 2.0, 2.0, 5.0]).unwrap();
    let slopes: Vec<f64> = segment_trend(&s).unwrap().iter().map(|i| i.slope).collect();
    ensure!(slopes == [2.0, -1.0, 0.0, 3.0], "slopes {slopes:?}");
    let s = Series::indexed("v", vec![2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
    let (m, sd) = (mean(&s).unwrap(), stddev(&s).unwrap());
    ensure!(m == 5.0 && sd == 2.0, "mean {m}, stddev {sd}");
    let s = Series::indexed("v", vec![1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
    let out: Vec<f64> = iqr_outliers(&s).unwrap().iter().map(|o| o.value).collect();
    ensure!(out == [100.0], "outliers {out:?}");
    Ok("slopes (2,-1,0,3); mean 5, sd 2; outliers {100}".into())
}

fn facts_of(y: &[f64], chart_type: ChartType) -> Result<FactsBundle, String> {
    let x: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
    let s = Series::numeric("v", x, y.to_vec()).map_err(|e| e.to_string())?;
    facts_for_series(&s, vec![], chart_type, TrendConfig::default()).map_err(|e| e.to_string())
}

fn equivariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for case in 0..200 {
        let n = rng.random_range(2..=120);
        // Positive values with repeats.
        let mut y: Vec<f64> = Vec::with_capacity(n);
        for i in 0..n {
            let v = if i > 0 && rng.random_bool(0.2) { y[i - 1] } else { rng.random_range(1.0..500.0) };
            y.push(v);
        }
        let c = rng.random_range(0.1..10.0);
        let d = rng.random_range(-100.0..100.0);
        let base = facts_of(&y, ChartType::Pie)?;
        let scaled = facts_of(&y.iter().map(|v| v * c).collect::<Vec<_>>(), ChartType::Pie)?;
        let shifted = facts_of(&y.iter().map(|v| v + d).collect::<Vec<_>>(), ChartType::Line)?;

        let scale_pairs = [
            ("mean", scaled.mean, c * base.mean),
            ("stddev", scaled.stddev, c * base.stddev),
            ("median", scaled.median, c * base.median),
            ("max", scaled.extrema.max_value, c * base.extrema.max_value),
            ("min", scaled.extrema.min_value, c * base.extrema.min_value),
            ("r", scaled.correlation.unwrap_or(0.0), base.correlation.unwrap_or(0.0)),
        ];
        for (what, got, want) in scale_pairs {
            ensure!(close(got, want), "case {case} scale {what}: {got} vs {want}");
        }
        ensure!(scaled.intervals.len() == base.intervals.len(), "case {case}: scale changed intervals");
        for (a, b) in base.intervals.iter().zip(&scaled.intervals) {
            ensure!(a.direction == b.direction, "case {case}: scale changed a direction");
            ensure!(close(b.slope, c * a.slope), "case {case}: slope {} vs {}", b.slope, c * a.slope);
        }
        let rows = |f: &FactsBundle| f.outliers.iter().map(|o| o.row).collect::<Vec<_>>();
        ensure!(rows(&scaled) == rows(&base), "case {case}: scale changed outliers");
        let (ps, pb) = (scaled.pie_shares.as_deref().unwrap(), base.pie_shares.as_deref().unwrap());
        ensure!(ps.iter().zip(pb).all(|(a, b)| close(*a, *b)), "case {case}: pie shares changed");

        let shift_pairs = [
            ("mean", shifted.mean, base.mean + d),
            ("stddev", shifted.stddev, base.stddev),
            ("median", shifted.median, base.median + d),
            ("r", shifted.correlation.unwrap_or(0.0), base.correlation.unwrap_or(0.0)),
        ];
        for (what, got, want) in shift_pairs {
            ensure!(close(got, want), "case {case} shift {what}: {got} vs {want}");
        }
        ensure!(shifted.intervals.len() == base.intervals.len(), "case {case}: shift changed intervals");
        for (a, b) in base.intervals.iter().zip(&shifted.intervals) {
            ensure!(a.direction == b.direction, "case {case}: shift changed a direction");
            ensure!(close(a.slope, b.slope), "case {case}: shift changed a slope");
        }
        ensure!(rows(&shifted) == rows(&base), "case {case}: shift changed outliers");
        ensure!(
            extrema(&Series::indexed("v", y.clone()).unwrap()).unwrap().max_row == shifted.extrema.max_row,
            "case {case}: shift moved the maximum"
        );
    }
    Ok("200 series hold under scale and shift".into())
}

fn cli_describe(dirs: &[std::path::PathBuf]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_chartscribe"))
        .arg("describe")
        .args(dirs)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "cli failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn end_to_end_golden(rt: &tokio::runtime::Runtime) -> Check {
    let dirs = common::fixture_dirs();
    let bundles = common::fixture_bundles();
    let mut types: Vec<ChartType> = Vec::new();
    for t in bundles.iter().map(|b| b.metadata.chart_type) {
        if !types.contains(&t) {
            types.push(t);
        }
    }
    for need in [ChartType::Line, ChartType::Bar, ChartType::GroupedColumn, ChartType::StackedBar, ChartType::Pie] {
        ensure!(types.contains(&need), "no {need:?} fixture");
    }
    let first = cli_describe(&dirs)?;
    let second = cli_describe(&dirs)?;
    ensure!(first == second, "two runs differ");
    let lines: Vec<&str> = first.lines().collect();
    ensure!(lines.len() == bundles.len(), "{} lines for {} fixtures", lines.len(), bundles.len());

    let h = common::Harness::new(None, "http://127.0.0.1:9", true);
    for (bundle, line) in bundles.iter().zip(&lines) {
        let selection = serde_json::to_value(select_all(&catalog_for(bundle, &Default::default()))).unwrap();
        let uri = format!("/api/charts/{}/description", bundle.id());
        let (status, body) = rt.block_on(h.json("POST", &uri, Some(selection)));
        ensure!(status == StatusCode::OK, "{uri}: {status}");
        ensure!(body["rendered"] == *line, "{}: service and CLI differ", bundle.id());
    }
    Ok(format!("{} fixtures, {} chart types, CLI == service", bundles.len(), types.len()))
}

fn feature_gating() -> Check {
    let bundles = common::fixture_bundles();
    for b in &bundles {
        let catalog = catalog_for(b, &Default::default());
        let axis = matches!(b.table.columns[0].kind, ColumnKind::Numeric | ColumnKind::Temporal);
        let pie = b.metadata.chart_type == ChartType::Pie;
        ensure!(catalog.contains(ids::TREND) == axis, "{}: trend gating", b.id());
        ensure!(catalog.contains(ids::CORRELATION) == axis, "{}: correlation gating", b.id());
        ensure!(catalog.contains(ids::PIE) == pie, "{}: pie gating", b.id());
    }
    Ok(format!("{}/{} fixtures", bundles.len(), bundles.len()))
}

fn service_contract(rt: &tokio::runtime::Runtime) -> Check {
    rt.block_on(async {
        let h = common::Harness::new(Some(common::TOKEN), "http://127.0.0.1:9", true);
        let mut checked = 0;
        let mut check = |schema: &str, status: StatusCode, want: StatusCode, body: &serde_json::Value| -> Check {
            ensure!(status == want, "{schema}: status {status}");
            let v = common::validator(schema);
            let errors: Vec<String> = v.iter_errors(body).map(|e| e.to_string()).collect();
            ensure!(errors.is_empty(), "{schema}: {errors:?}");
            checked += 1;
            Ok(String::new())
        };
        let (s, b) = h.json("GET", "/healthz", None).await;
        check("health.json", s, StatusCode::OK, &b)?;
        let (s, b) = h.json("GET", "/api/charts?page=1&page_size=5", None).await;
        check("chart_page.json", s, StatusCode::OK, &b)?;
        let (s, b) = h.json("GET", "/api/charts?page=0", None).await;
        check("error.json", s, StatusCode::BAD_REQUEST, &b)?;
        for bundle in common::fixture_bundles() {
            let id = bundle.id();
            let (s, b) = h.json("GET", &format!("/api/charts/{id}"), None).await;
            check("chart.json", s, StatusCode::OK, &b)?;
            let (s, b) = h.json("GET", &format!("/api/charts/{id}/features"), None).await;
            check("feature_catalog.json", s, StatusCode::OK, &b)?;
            let sel = serde_json::to_value(select_all(&catalog_for(&bundle, &Default::default()))).unwrap();
            let (s, b) = h.json("POST", &format!("/api/charts/{id}/description"), Some(sel)).await;
            check("description.json", s, StatusCode::OK, &b)?;
            if bundle.has_svg() {
                let (s, headers, _) = h.call("GET", &format!("/api/charts/{id}/svg"), None).await;
                ensure!(s == StatusCode::OK && headers["content-type"] == "image/svg+xml", "{id} svg");
            }
        }
        let (s, b) = h.json("GET", "/api/charts/missing", None).await;
        check("error.json", s, StatusCode::NOT_FOUND, &b)?;
        let (s, b) = h.json("POST", "/api/rescan", None).await;
        check("scan_report.json", s, StatusCode::OK, &b)?;

        let base = common::spawn_remote(common::TOKEN).await;
        let target = common::Harness::new(Some(common::TOKEN), &base, false);
        for bundle in common::fixture_bundles() {
            let (s, b) = target.json("POST", "/api/charts/import", Some(json!({"remote_id": bundle.id()}))).await;
            check("import_result.json", s, StatusCode::CREATED, &b)?;
            let stored = target.state.store().get(bundle.id()).ok_or("import not stored")?;
            ensure!(*stored == bundle, "{}: imported bundle differs", bundle.id());
        }
        let (reloaded, report) =
            chartscribe_service::ChartStore::open(target.dir.path()).map_err(|e| e.to_string())?;
        ensure!(report.skipped.is_empty(), "reload skipped {:?}", report.skipped);
        for bundle in common::fixture_bundles() {
            ensure!(reloaded.get(bundle.id()).as_deref() == Some(&bundle), "{}: reload differs", bundle.id());
        }
        let unauth = common::Harness::new(None, &base, false);
        let (s, b) = unauth.json("POST", "/api/charts/import", Some(json!({"remote_id": "line-gdp"}))).await;
        check("error.json", s, StatusCode::UNAUTHORIZED, &b)?;
        Ok(format!("{checked} responses valid, stub import exact"))
    })
}

fn main() -> ExitCode {
    let suite_start = Instant::now();
    let rt = tokio::runtime::Runtime::new().unwrap();
    let checks: Vec<(&str, NamedCheck)> = vec![
        ("color palette closure", Box::new(palette_closure)),
        ("color oracle", Box::new(color_oracle)),
        ("lab spot values", Box::new(lab_spots)),
        ("statistics oracle", Box::new(statistics_oracle)),
        ("trend invariants", Box::new(trend_invariants)),
        ("worked fixtures", Box::new(worked_fixtures)),
        ("equivariance", Box::new(equivariance)),
        ("end-to-end golden", Box::new(|| end_to_end_golden(&rt))),
        ("feature gating", Box::new(feature_gating)),
        ("service contract", Box::new(|| service_contract(&rt))),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    let elapsed = suite_start.elapsed();
    let budget = Duration::from_secs(60);
    if elapsed < budget {
        println!("PASS  suite runtime: {elapsed:.2?} (budget 60s)");
    } else {
        failed += 1;
        println!("FAIL  suite runtime: {elapsed:.2?} (budget 60s)");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
