//! Adaptive moving-window regression (AMWR) baseline.
//!
//! The baseline sizes its training window from the dominant period of the
//! jam-factor series (Lomb-Scargle periodogram), then repeatedly trains an
//! SVR on the trailing training window, forecasts the next prediction window,
//! scores the forecast and grows or shrinks the prediction window:
//!
//! * accuracy above 95 %: prediction window times `growth_factor`
//! * accuracy below 80 %: prediction window divided by `growth_factor`
//! * otherwise: unchanged
//!
//! Accuracy is `1 - MAE / max(mean|actual|, 1)`, clamped to `[0, 1]`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureset::{apply_scaler, encode_observation, fit_scaler, TrafficObservation, SECONDS_PER_DAY};
use crate::svr::{train_svr, SvrHyperparams};

/// Number of log-spaced frequencies in [`frequency_grid`].
pub const GRID_POINTS: usize = 1000;

/// Lomb-Scargle power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    frequencies: Vec<f64>,
    powers: Vec<f64>,
}

impl Periodogram {
    pub fn new(frequencies: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if frequencies.len() != powers.len() {
            return Err(Error::Shape(format!(
                "{} frequencies but {} powers",
                frequencies.len(),
                powers.len()
            )));
        }
        check_frequencies(&frequencies)?;
        if let Some(p) = powers.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::validation("powers", format!("{p} is negative or NaN")));
        }
        Ok(Self { frequencies, powers })
    }

    /// Frequencies in cycles per second.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

fn check_frequencies(frequencies: &[f64]) -> Result<()> {
    if let Some(f) = frequencies.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(Error::Domain(format!("frequency {f} is not positive")));
    }
    if frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("frequencies", "must be strictly increasing"));
    }
    Ok(())
}

/// Normalized Lomb-Scargle periodogram with the time-shift `tau` chosen so
/// the sine and cosine terms are orthogonal:
///
/// ```text
/// P(w) = [ (sum y_j cos w(t_j - tau))^2 / sum cos^2 w(t_j - tau)
///        + (sum y_j sin w(t_j - tau))^2 / sum sin^2 w(t_j - tau) ] / (2 s^2)
/// tan(2 w tau) = sum sin 2 w t_j / sum cos 2 w t_j
/// ```
///
/// with `y_j` the mean-removed values and `s^2` their sample variance. A
/// constant series has all-zero power.
pub fn lomb_scargle(times: &[f64], values: &[f64], frequencies: &[f64]) -> Result<Periodogram> {
    if times.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "periodogram needs at least 4 points, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::validation("times", "must be strictly increasing"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("values", "must be finite"));
    }
    check_frequencies(frequencies)?;

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let variance = centered.iter().map(|y| y * y).sum::<f64>() / (n - 1.0);
    let magnitude = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if variance <= (1e-12 * magnitude).powi(2) {
        return Periodogram::new(frequencies.to_vec(), vec![0.0; frequencies.len()]);
    }
    // The tau shift makes the result invariant to a time offset; subtracting
    // the first time keeps the phases small.
    let t0 = times[0];
    let rel: Vec<f64> = times.iter().map(|t| t - t0).collect();

    let powers = frequencies
        .iter()
        .map(|&f| {
            let w = TAU * f;
            let (s2, c2) = rel.iter().fold((0.0, 0.0), |(s, c), t| {
                let (sn, cs) = (2.0 * w * t).sin_cos();
                (s + sn, c + cs)
            });
            let tau = s2.atan2(c2) / (2.0 * w);
            let (mut yc, mut ys, mut cc, mut ss) = (0.0, 0.0, 0.0, 0.0);
            for (t, y) in rel.iter().zip(&centered) {
                let (sn, cs) = (w * (t - tau)).sin_cos();
                yc += y * cs;
                ys += y * sn;
                cc += cs * cs;
                ss += sn * sn;
            }
            // Either sum vanishes only when all phases are multiples of pi/2
            // apart; that term carries no information.
            let floor = 1e-12 * n;
            let mut p = 0.0;
            if cc > floor {
                p += yc * yc / cc;
            }
            if ss > floor {
                p += ys * ys / ss;
            }
            p / (2.0 * variance)
        })
        .collect();
    Periodogram::new(frequencies.to_vec(), powers)
}

/// `points` log-spaced frequencies from `1 / span` to `1 / (2 * median dt)`.
pub fn frequency_grid(times: &[f64], points: usize) -> Result<Vec<f64>> {
    if times.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "frequency grid needs at least 3 time points, got {}",
            times.len()
        )));
    }
    if points < 2 {
        return Err(Error::Domain(format!("grid needs at least 2 points, got {points}")));
    }
    let span = times[times.len() - 1] - times[0];
    let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::validation("times", "must be strictly increasing"));
    }
    gaps.sort_by(f64::total_cmp);
    let mid = gaps.len() / 2;
    let median = if gaps.len() % 2 == 0 {
        0.5 * (gaps[mid - 1] + gaps[mid])
    } else {
        gaps[mid]
    };
    let (lo, hi) = (1.0 / span, 1.0 / (2.0 * median));
    if !(hi > lo) {
        return Err(Error::InsufficientData(
            "series too short to resolve any period".into(),
        ));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                (llo + step * i as f64).exp()
            }
        })
        .collect())
}

/// Period (seconds) of the strongest peak. Ties go to the lower frequency.
pub fn dominant_period(pg: &Periodogram) -> Result<f64> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in pg.powers.iter().enumerate() {
        if p > 0.0 && best.is_none_or(|(_, bp)| p > bp) {
            best = Some((i, p));
        }
    }
    best.map(|(i, _)| 1.0 / pg.frequencies[i])
        .ok_or(Error::NoDominantPeriod)
}

/// Adaptive window state. Durations are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowController {
    pub training_window: i64,
    pub prediction_window: i64,
    pub low_threshold: f64,
    pub high_threshold: f64,
    pub min_prediction_window: i64,
    pub max_prediction_window: i64,
    pub growth_factor: f64,
}

impl Default for WindowController {
    /// 24 h training window; prediction window starts at 15 min and moves
    /// between 15 min and 24 h by a factor of 2; thresholds 0.80 / 0.95.
    fn default() -> Self {
        Self {
            training_window: SECONDS_PER_DAY,
            prediction_window: 15 * 60,
            low_threshold: 0.80,
            high_threshold: 0.95,
            min_prediction_window: 15 * 60,
            max_prediction_window: SECONDS_PER_DAY,
            growth_factor: 2.0,
        }
    }
}

impl WindowController {
    pub fn validate(&self) -> Result<()> {
        if self.training_window <= 0 {
            return Err(Error::validation("training_window", "must be positive"));
        }
        if self.min_prediction_window <= 0 || self.min_prediction_window > self.max_prediction_window {
            return Err(Error::validation(
                "min_prediction_window",
                "must be positive and not above max_prediction_window",
            ));
        }
        if !(self.min_prediction_window..=self.max_prediction_window).contains(&self.prediction_window) {
            return Err(Error::validation("prediction_window", "outside [min, max]"));
        }
        if !(0.0 < self.low_threshold && self.low_threshold < self.high_threshold && self.high_threshold < 1.0) {
            return Err(Error::validation(
                "low_threshold",
                "thresholds must satisfy 0 < low < high < 1",
            ));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::validation("growth_factor", "must be greater than 1"));
        }
        Ok(())
    }
}

/// Grows, shrinks or keeps the prediction window according to `accuracy`.
/// Both thresholds are strict: accuracy exactly at a threshold keeps the
/// window.
pub fn adapt_prediction_window(ctrl: &WindowController, accuracy: f64) -> Result<WindowController> {
    if !(0.0..=1.0).contains(&accuracy) {
        return Err(Error::Domain(format!("accuracy {accuracy} outside [0, 1]")));
    }
    let window = ctrl.prediction_window as f64;
    let prediction_window = if accuracy > ctrl.high_threshold {
        ((window * ctrl.growth_factor).round() as i64).min(ctrl.max_prediction_window)
    } else if accuracy < ctrl.low_threshold {
        ((window / ctrl.growth_factor).round() as i64).max(ctrl.min_prediction_window)
    } else {
        ctrl.prediction_window
    };
    Ok(WindowController {
        prediction_window,
        ..*ctrl
    })
}

/// `max(0, 1 - MAE / max(mean|actual|, 1))`.
pub fn accuracy_score(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.len() != predicted.len() || actual.is_empty() {
        return Err(Error::Shape(format!(
            "accuracy needs equal non-empty series, got {} and {}",
            actual.len(),
            predicted.len()
        )));
    }
    let n = actual.len() as f64;
    let mae = actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum::<f64>() / n;
    let scale = (actual.iter().map(|a| a.abs()).sum::<f64>() / n).max(1.0);
    Ok((1.0 - mae / scale).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmwrConfig {
    pub controller: WindowController,
    pub hyperparams: SvrHyperparams,
    /// Length of the leading stretch used to size the training window. No
    /// forecast starts before it ends, so sizing never sees forecast targets.
    pub warmup: i64,
}

impl Default for AmwrConfig {
    fn default() -> Self {
        Self {
            controller: WindowController::default(),
            hyperparams: SvrHyperparams::default(),
            warmup: 3 * SECONDS_PER_DAY,
        }
    }
}

/// One forecast: `(timestamp, predicted, actual)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmwrPoint {
    pub timestamp: i64,
    pub predicted: f64,
    pub actual: f64,
}

/// One iteration of the rolling loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmwrStep {
    pub span_start: i64,
    pub training_rows: usize,
    pub forecast_rows: usize,
    pub prediction_window: i64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmwrRun {
    /// Training window chosen from the periodogram (or the 24 h fallback).
    pub training_window: i64,
    /// Whether the fallback was used.
    pub fallback_window: bool,
    pub points: Vec<AmwrPoint>,
    pub steps: Vec<AmwrStep>,
    pub final_controller: WindowController,
}

/// Training window length from the dominant period of the warm-up stretch,
/// or `None` when the periodogram has no peak.
pub fn size_training_window(series: &[TrafficObservation], warmup: i64) -> Result<Option<i64>> {
    let Some(first) = series.first() else {
        return Err(Error::InsufficientData("empty series".into()));
    };
    let head: Vec<&TrafficObservation> = series
        .iter()
        .take_while(|o| o.timestamp < first.timestamp + warmup)
        .collect();
    if head.len() < 4 {
        return Ok(None);
    }
    let times: Vec<f64> = head.iter().map(|o| o.timestamp as f64).collect();
    let values: Vec<f64> = head.iter().map(|o| o.jam_factor).collect();
    let grid = frequency_grid(&times, GRID_POINTS)?;
    match dominant_period(&lomb_scargle(&times, &values, &grid)?) {
        Ok(period) => Ok(Some(period.round() as i64)),
        Err(Error::NoDominantPeriod) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs the rolling AMWR forecaster over one road's time-ordered series.
///
/// The first forecast span starts at `first + max(training_window, warmup)`.
/// Every span is forecast by an SVR trained (with its own scaler) on the
/// observations in `[span_start - training_window, span_start)`. Predictions
/// are clipped to `[0, 10]`.
pub fn run_amwr(series: &[TrafficObservation], config: &AmwrConfig) -> Result<AmwrRun> {
    config.controller.validate()?;
    config.hyperparams.validate()?;
    if config.warmup < 0 {
        return Err(Error::validation("warmup", "must be non-negative"));
    }
    let Some(first) = series.first() else {
        return Err(Error::InsufficientData("empty series".into()));
    };
    for (i, obs) in series.iter().enumerate() {
        obs.validate()?;
        if obs.road_id != first.road_id {
            return Err(Error::validation(
                "road_id",
                format!("series mixes roads `{}` and `{}`", first.road_id, obs.road_id),
            ));
        }
        if i > 0 && obs.timestamp <= series[i - 1].timestamp {
            return Err(Error::validation("timestamp", "series must be strictly increasing"));
        }
    }

    let sized = size_training_window(series, config.warmup)?;
    let fallback_window = sized.is_none();
    let training_window = sized.unwrap_or(SECONDS_PER_DAY);
    log::debug!(
        "AMWR road {}: training window {training_window} s{}",
        first.road_id,
        if fallback_window { " (fallback)" } else { "" }
    );
    let mut ctrl = WindowController {
        training_window,
        ..config.controller
    };

    let forecast_start = first.timestamp + training_window.max(config.warmup);
    let mut cursor = series.partition_point(|o| o.timestamp < forecast_start);
    if cursor >= series.len() {
        return Err(Error::InsufficientData(format!(
            "series of {} s does not reach past the initial {} s window",
            series[series.len() - 1].timestamp - first.timestamp,
            forecast_start - first.timestamp
        )));
    }

    let mut points = Vec::new();
    let mut steps = Vec::new();
    while cursor < series.len() {
        let span_start = series[cursor].timestamp;
        let span_end = span_start + ctrl.prediction_window;
        let train_from = series.partition_point(|o| o.timestamp < span_start - ctrl.training_window);
        let train_rows = &series[train_from..cursor];
        let span_len = series[cursor..].partition_point(|o| o.timestamp < span_end);
        let forecast_rows = &series[cursor..cursor + span_len];

        let encoded = train_rows.iter().map(encode_observation).collect::<Result<Vec<_>>>()?;
        let scaler = fit_scaler(&encoded).map_err(|_| {
            Error::InsufficientData(format!(
                "fewer than 2 observations in the training window before {span_start}"
            ))
        })?;
        let scaled = encoded
            .iter()
            .map(|s| apply_scaler(&scaler, s))
            .collect::<Result<Vec<_>>>()?;
        let model = train_svr(&scaled, &config.hyperparams)?.with_scaler(scaler)?;

        let mut actual = Vec::with_capacity(span_len);
        let mut predicted = Vec::with_capacity(span_len);
        for obs in forecast_rows {
            let x = encode_observation(obs)?;
            let p = model.predict_unscaled(&x.features)?.clamp(0.0, 10.0);
            points.push(AmwrPoint {
                timestamp: obs.timestamp,
                predicted: p,
                actual: obs.jam_factor,
            });
            actual.push(obs.jam_factor);
            predicted.push(p);
        }
        let accuracy = accuracy_score(&actual, &predicted)?;
        steps.push(AmwrStep {
            span_start,
            training_rows: train_rows.len(),
            forecast_rows: span_len,
            prediction_window: ctrl.prediction_window,
            accuracy,
        });
        ctrl = adapt_prediction_window(&ctrl, accuracy)?;
        cursor += span_len;
    }

    Ok(AmwrRun {
        training_window,
        fallback_window,
        points,
        steps,
        final_controller: ctrl,
    })
}
