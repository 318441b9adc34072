mod common;

use common::reference::{argmax, nearest_index, periodogram_lsq};
use jamcast::amwr::{
    adapt_prediction_window, dominant_period, frequency_grid, lomb_scargle, run_amwr, size_training_window,
    AmwrConfig, WindowController, GRID_POINTS,
};
use jamcast::featureset::TrafficObservation;
use jamcast::ingestion::{synth_generate, SynthConfig, DEFAULT_START};
use jamcast::pipeline::road_series;
use jamcast::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DAY: f64 = 86_400.0;

fn daily_sinusoid(days: usize) -> (Vec<f64>, Vec<f64>) {
    let times: Vec<f64> = (0..days * 288).map(|k| k as f64 * 300.0).collect();
    let values = times.iter().map(|t| 5.0 + 2.0 * (std::f64::consts::TAU * t / DAY).sin()).collect();
    (times, values)
}

fn row(ts: i64, jam: f64) -> TrafficObservation {
    TrafficObservation {
        timestamp: ts,
        road_id: "r".into(),
        temperature_c: 25.0,
        daylight: true,
        humidity_pct: 50.0,
        wind_speed_kmh: 5.0,
        speed_ratio: 1.0 - jam / 10.0,
        jam_factor: jam,
    }
}

#[test]
fn planted_daily_period_is_recovered() {
    let (times, values) = daily_sinusoid(3);
    let grid = frequency_grid(&times, GRID_POINTS).unwrap();
    let pg = lomb_scargle(&times, &values, &grid).unwrap();
    let found = argmax(pg.powers()) as i64;
    let planted = nearest_index(&grid, 1.0 / DAY) as i64;
    assert!((found - planted).abs() <= 1, "peak bin {found}, planted bin {planted}");
    let period = dominant_period(&pg).unwrap();
    assert!((1.0 / period - 1.0 / DAY).abs() <= (grid[planted as usize + 1] - grid[planted as usize - 1]));
}

#[test]
fn periodogram_matches_least_squares_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.random_range(8..60);
        let mut t = 0.0;
        let times: Vec<f64> = (0..n)
            .map(|_| {
                t += rng.random_range(60.0..900.0);
                t
            })
            .collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| (t / 5000.0).sin() * 3.0 + rng.random_range(-1.0..1.0))
            .collect();
        let grid = frequency_grid(&times, 50).unwrap();
        let pg = lomb_scargle(&times, &values, &grid).unwrap();
        for (f, p) in grid.iter().zip(pg.powers()) {
            let r = periodogram_lsq(&times, &values, *f);
            assert!((p - r).abs() <= 1e-7 * r.abs().max(1.0), "f={f}: {p} vs {r}");
        }
    }
}

#[test]
fn constant_signal_and_mean_shift() {
    let (times, values) = daily_sinusoid(2);
    let grid = frequency_grid(&times, 200).unwrap();
    let flat = lomb_scargle(&times, &vec![3.0; times.len()], &grid).unwrap();
    assert!(flat.powers().iter().all(|p| *p == 0.0));
    assert!(matches!(dominant_period(&flat), Err(Error::NoDominantPeriod)));

    let a = lomb_scargle(&times, &values, &grid).unwrap();
    let shifted: Vec<f64> = values.iter().map(|v| v + 5.0).collect();
    let b = lomb_scargle(&times, &shifted, &grid).unwrap();
    for (x, y) in a.powers().iter().zip(b.powers()) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn training_window_sized_from_planted_period() {
    let (times, values) = daily_sinusoid(4);
    let series: Vec<_> = times
        .iter()
        .zip(&values)
        .map(|(t, v)| row(DEFAULT_START + *t as i64, *v))
        .collect();
    let warmup = 3 * 86_400;
    let window = size_training_window(&series, warmup).unwrap().unwrap();
    let head: Vec<f64> = times.iter().copied().filter(|t| *t < warmup as f64).collect();
    let grid = frequency_grid(&head, GRID_POINTS).unwrap();
    let i = nearest_index(&grid, 1.0 / DAY);
    let (lo, hi) = (1.0 / grid[i + 1], 1.0 / grid[i - 1]);
    assert!((lo..=hi).contains(&(window as f64)), "window {window} outside [{lo}, {hi}]");
}

#[test]
fn constant_series_grows_window_to_max() {
    let series: Vec<_> = (0..5 * 288).map(|k| row(DEFAULT_START + k * 300, 3.0)).collect();
    let run = run_amwr(&series, &AmwrConfig::default()).unwrap();
    assert!(run.fallback_window);
    assert!(run.points.iter().all(|p| (p.predicted - 3.0).abs() <= 0.1 + 1e-9));
    assert!(run.steps.iter().all(|s| s.accuracy > 0.95));
    assert_eq!(run.final_controller.prediction_window, run.final_controller.max_prediction_window);
}

#[test]
fn series_shorter_than_window_is_rejected() {
    let series: Vec<_> = (0..100).map(|k| row(DEFAULT_START + k * 300, 3.0)).collect();
    assert!(matches!(run_amwr(&series, &AmwrConfig::default()), Err(Error::InsufficientData(_))));
    assert!(matches!(run_amwr(&[], &AmwrConfig::default()), Err(Error::InsufficientData(_))));
}

#[test]
fn run_output_invariants() {
    let data = synth_generate(&SynthConfig {
        roads: 1,
        days: 5,
        ..SynthConfig::default()
    })
    .unwrap();
    let series = road_series(&data, "road-01");
    let run = run_amwr(&series, &AmwrConfig::default()).unwrap();
    let input: std::collections::HashSet<i64> = series.iter().map(|o| o.timestamp).collect();
    assert!(run.points.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
    assert!(run.points.iter().all(|p| input.contains(&p.timestamp)));
    assert!(run.points.iter().all(|p| (0.0..=10.0).contains(&p.predicted)));
    // consecutive spans tile the forecast range without overlap
    let mut covered = 0;
    for pair in run.steps.windows(2) {
        assert!(pair[0].span_start + pair[0].prediction_window <= pair[1].span_start);
    }
    for s in &run.steps {
        covered += s.forecast_rows;
        assert!(s.training_rows > 0);
    }
    assert_eq!(covered, run.points.len());
    // no look-ahead: the first forecast is after the warm-up stretch
    assert!(run.points[0].timestamp >= series[0].timestamp + AmwrConfig::default().warmup);
}

fn controller() -> impl Strategy<Value = WindowController> {
    (900i64..=86_400).prop_map(|w| WindowController {
        prediction_window: w,
        ..WindowController::default()
    })
}

proptest! {
    #[test]
    fn window_stays_in_bounds(start in controller(), accs in prop::collection::vec(0.0..=1.0f64, 1..60)) {
        let mut c = start;
        for a in accs {
            let next = adapt_prediction_window(&c, a).unwrap();
            prop_assert!((c.min_prediction_window..=c.max_prediction_window).contains(&next.prediction_window));
            if a > c.high_threshold {
                prop_assert!(next.prediction_window >= c.prediction_window);
            } else if a < c.low_threshold {
                prop_assert!(next.prediction_window <= c.prediction_window);
            } else {
                prop_assert_eq!(next.prediction_window, c.prediction_window);
            }
            prop_assert_eq!(adapt_prediction_window(&c, a).unwrap(), next);
            c = next;
        }
    }
}
