use chartscribe_core::facts::{
    extrema, iqr_outliers, is_monotonic, mean, median, quartiles, segment_trend, significant_intervals, stddev, Direction,
    TrendConfig, TrendInterval,
};
use chartscribe_core::model::Series;
use proptest::prelude::*;

/// Small integers mixed with free values.
fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    let point = prop_oneof![
        (0..5i32).prop_map(f64::from),
        -100.0..100.0f64,
    ];
    prop::collection::vec(point, 2..max_len)
}

fn check_tiling(y: &[f64], intervals: &[TrendInterval]) -> Result<(), TestCaseError> {
    prop_assert!(!intervals.is_empty());
    prop_assert_eq!(intervals[0].start, 0);
    prop_assert_eq!(intervals.last().unwrap().end, y.len() - 1);
    for w in intervals.windows(2) {
        prop_assert_eq!(w[0].end, w[1].start);
        prop_assert_ne!(w[0].direction, w[1].direction);
    }
    for iv in intervals {
        prop_assert!(iv.start < iv.end);
        let steps = &y[iv.start..=iv.end];
        let diffs = steps.windows(2).map(|w| w[1] - w[0]);
        match iv.direction {
            Direction::Rising => prop_assert!(diffs.clone().all(|d| d >= 0.0) && diffs.clone().any(|d| d > 0.0)),
            Direction::Falling => prop_assert!(diffs.clone().all(|d| d <= 0.0) && diffs.clone().any(|d| d < 0.0)),
            Direction::Constant => prop_assert!(diffs.clone().all(|d| d == 0.0)),
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn intervals_tile_and_alternate(y in values(60)) {
        let s = Series::indexed("v", y.clone()).unwrap();
        check_tiling(&y, &segment_trend(&s).unwrap())?;
    }

    #[test]
    fn single_interval_iff_monotone(y in values(60)) {
        let s = Series::indexed("v", y).unwrap();
        let intervals = segment_trend(&s).unwrap();
        let monotone = is_monotonic(&s).unwrap();
        prop_assert_eq!(monotone.is_some(), intervals.len() == 1);
        if let Some(m) = monotone {
            prop_assert!(intervals[0].direction.matches(m));
        }
    }

    #[test]
    fn sorted_series_is_one_interval(mut y in values(60), descending: bool) {
        y.sort_by(f64::total_cmp);
        if descending {
            y.reverse();
        }
        let s = Series::indexed("v", y).unwrap();
        prop_assert_eq!(segment_trend(&s).unwrap().len(), 1);
    }

    #[test]
    fn slopes_follow_endpoints(y in values(40), gaps in prop::collection::vec(0.5..3.0f64, 40)) {
        let x: Vec<f64> = gaps[..y.len()].iter().scan(0.0, |acc, g| { *acc += g; Some(*acc) }).collect();
        let s = Series::numeric("v", x.clone(), y.clone()).unwrap();
        for iv in segment_trend(&s).unwrap() {
            let want = (y[iv.end] - y[iv.start]) / (x[iv.end] - x[iv.start]);
            prop_assert!((iv.slope - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn significant_subset_is_steepest(y in values(60)) {
        let s = Series::indexed("v", y).unwrap();
        let all = segment_trend(&s).unwrap();
        let config = TrendConfig::default();
        let kept = significant_intervals(&all, config);
        if all.len() <= config.threshold {
            prop_assert_eq!(&kept, &all);
        } else {
            prop_assert_eq!(kept.len(), config.top_k.min(all.len()));
            prop_assert!(kept.windows(2).all(|w| w[0].start < w[1].start));
            let weakest_kept = kept.iter().map(|i| i.slope.abs()).fold(f64::INFINITY, f64::min);
            let dropped = all.iter().filter(|i| !kept.contains(i));
            for d in dropped {
                prop_assert!(d.slope.abs() <= weakest_kept);
            }
        }
    }

    #[test]
    fn scale_and_shift_equivariance(y in values(80), c in 0.1..10.0f64, shift in -50.0..50.0f64) {
        let base = Series::indexed("v", y.clone()).unwrap();
        let scaled = Series::indexed("v", y.iter().map(|v| v * c).collect()).unwrap();
        let shifted = Series::indexed("v", y.iter().map(|v| v + shift).collect()).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;

        prop_assert!(close(mean(&scaled).unwrap(), c * mean(&base).unwrap()));
        prop_assert!(close(stddev(&scaled).unwrap(), c * stddev(&base).unwrap()));
        prop_assert!(close(median(&scaled).unwrap(), c * median(&base).unwrap()));
        prop_assert!(close(mean(&shifted).unwrap(), mean(&base).unwrap() + shift));
        prop_assert!(close(stddev(&shifted).unwrap(), stddev(&base).unwrap()));
        prop_assert!(close(median(&shifted).unwrap(), median(&base).unwrap() + shift));

        // Skips series with a point on a fence.
        let (lo, hi) = quartiles(&base).unwrap().fences();
        let on_fence = y.iter().any(|v| (v - lo).abs() <= 1e-9 || (v - hi).abs() <= 1e-9);
        if !on_fence {
            let rows = |s: &Series| iqr_outliers(s).unwrap().into_iter().map(|o| o.row).collect::<Vec<_>>();
            prop_assert_eq!(rows(&scaled), rows(&base));
            prop_assert_eq!(rows(&shifted), rows(&base));
        }
        let ext = |s: &Series| { let e = extrema(s).unwrap(); (e.max_row, e.min_row) };
        prop_assert_eq!(ext(&scaled), ext(&base));
        prop_assert_eq!(ext(&shifted), ext(&base));

        let t0 = segment_trend(&base).unwrap();
        for (other, factor) in [(segment_trend(&scaled).unwrap(), c), (segment_trend(&shifted).unwrap(), 1.0)] {
            prop_assert_eq!(other.len(), t0.len());
            for (a, b) in t0.iter().zip(&other) {
                prop_assert_eq!((a.start, a.end, a.direction), (b.start, b.end, b.direction));
                prop_assert!(close(b.slope, factor * a.slope));
            }
        }
    }
}

#[test]
fn worked_segmentation() {
    let s = Series::indexed("v", vec![1.0, 3.0, 2.0, 2.0, 5.0]).unwrap();
    let intervals = segment_trend(&s).unwrap();
    let slopes: Vec<f64> = intervals.iter().map(|i| i.slope).collect();
    assert_eq!(slopes, vec![2.0, -1.0, 0.0, 3.0]);
    let dirs: Vec<Direction> = intervals.iter().map(|i| i.direction).collect();
    assert_eq!(
        dirs,
        vec![Direction::Rising, Direction::Falling, Direction::Constant, Direction::Rising]
    );
}
