//! Observation schema and numeric feature encoding.
//!
//! Every [`TrafficObservation`] is turned into a fixed-length feature vector
//! with the layout given by [`FEATURE_NAMES`]:
//!
//! ```text
//! [time_sin, time_cos, day_sin, day_cos, temperature_c, daylight,
//!  humidity_pct, wind_speed_kmh, speed_ratio]
//! ```
//!
//! Time of day and day of week are encoded as points on the unit circle so
//! that 23:55 sits next to 00:00 and Sunday next to Monday. Days are indexed
//! with Monday = 0. The road identity is not a feature; one model is trained
//! per road.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: i64 = 86_400;
pub const SECONDS_PER_WEEK: i64 = 7 * SECONDS_PER_DAY;

/// Feature names in encoding order. Model files record this layout.
pub const FEATURE_NAMES: [&str; 9] = [
    "time_sin",
    "time_cos",
    "day_sin",
    "day_cos",
    "temperature_c",
    "daylight",
    "humidity_pct",
    "wind_speed_kmh",
    "speed_ratio",
];

pub const FEATURE_DIM: usize = FEATURE_NAMES.len();

/// Layout tag written into serialized models.
pub fn feature_layout_tag() -> String {
    FEATURE_NAMES.join(",")
}

/// One timestamped per-road record joining traffic state and weather.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficObservation {
    /// UTC seconds since the Unix epoch.
    pub timestamp: i64,
    /// Opaque road segment identifier (source/destination pair).
    pub road_id: String,
    pub temperature_c: f64,
    pub daylight: bool,
    /// Relative humidity in percent, `[0, 100]`.
    pub humidity_pct: f64,
    pub wind_speed_kmh: f64,
    /// Current speed over free-flow speed.
    pub speed_ratio: f64,
    /// Congestion score in `[0, 10]`; higher is worse.
    pub jam_factor: f64,
}

impl TrafficObservation {
    /// Checks the record invariants, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        if self.timestamp <= 0 {
            return Err(Error::validation("timestamp", "must be strictly positive"));
        }
        let finite = [
            ("temperature_c", self.temperature_c),
            ("humidity_pct", self.humidity_pct),
            ("wind_speed_kmh", self.wind_speed_kmh),
            ("speed_ratio", self.speed_ratio),
            ("jam_factor", self.jam_factor),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(Error::validation(field, format!("{value} is not finite")));
            }
        }
        if !(0.0..=100.0).contains(&self.humidity_pct) {
            return Err(Error::validation(
                "humidity_pct",
                format!("{} outside [0, 100]", self.humidity_pct),
            ));
        }
        if self.wind_speed_kmh < 0.0 {
            return Err(Error::validation(
                "wind_speed_kmh",
                format!("{} is negative", self.wind_speed_kmh),
            ));
        }
        if self.speed_ratio < 0.0 {
            return Err(Error::validation(
                "speed_ratio",
                format!("{} is negative", self.speed_ratio),
            ));
        }
        if !(0.0..=10.0).contains(&self.jam_factor) {
            return Err(Error::validation(
                "jam_factor",
                format!("{} outside [0, 10]", self.jam_factor),
            ));
        }
        Ok(())
    }

    /// Seconds elapsed since UTC midnight.
    pub fn seconds_since_midnight(&self) -> i64 {
        self.timestamp.rem_euclid(SECONDS_PER_DAY)
    }

    /// Day of week with Monday = 0.
    pub fn day_index(&self) -> u32 {
        day_index(self.timestamp)
    }
}

/// Day of week (Monday = 0) of a UTC timestamp.
pub fn day_index(timestamp: i64) -> u32 {
    // 1970-01-01 was a Thursday.
    (timestamp.div_euclid(SECONDS_PER_DAY) + 3).rem_euclid(7) as u32
}

/// Numeric feature vector plus jam-factor target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedSample {
    pub features: Vec<f64>,
    pub target: f64,
}

impl EncodedSample {
    pub fn new(features: Vec<f64>, target: f64) -> Self {
        Self { features, target }
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

/// Maps seconds since midnight onto the unit circle.
pub fn encode_time_of_day(seconds_since_midnight: i64) -> Result<(f64, f64)> {
    if !(0..SECONDS_PER_DAY).contains(&seconds_since_midnight) {
        return Err(Error::Domain(format!(
            "time of day {seconds_since_midnight} s outside [0, 86400)"
        )));
    }
    let phase = TAU * seconds_since_midnight as f64 / SECONDS_PER_DAY as f64;
    Ok(phase.sin_cos())
}

/// Maps a Monday = 0 day index onto the unit circle.
pub fn encode_day_of_week(day_index: u32) -> Result<(f64, f64)> {
    if day_index > 6 {
        return Err(Error::Domain(format!("day index {day_index} outside 0..=6")));
    }
    let phase = TAU * day_index as f64 / 7.0;
    Ok(phase.sin_cos())
}

/// Encodes the predictors of an observation; the jam factor becomes the target.
pub fn encode_observation(obs: &TrafficObservation) -> Result<EncodedSample> {
    obs.validate()?;
    let (time_sin, time_cos) = encode_time_of_day(obs.seconds_since_midnight())?;
    let (day_sin, day_cos) = encode_day_of_week(obs.day_index())?;
    let features = vec![
        time_sin,
        time_cos,
        day_sin,
        day_cos,
        obs.temperature_c,
        if obs.daylight { 1.0 } else { 0.0 },
        obs.humidity_pct,
        obs.wind_speed_kmh,
        obs.speed_ratio,
    ];
    Ok(EncodedSample::new(features, obs.jam_factor))
}

/// Per-feature standardization statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

/// Population standard deviations below this are treated as zero.
const MIN_SCALE: f64 = 1e-12;

impl ScalerParams {
    pub fn new(mean: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        if mean.len() != scale.len() {
            return Err(Error::Shape(format!(
                "scaler mean has {} entries, scale has {}",
                mean.len(),
                scale.len()
            )));
        }
        if let Some(bad) = scale.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::validation("scale", format!("{bad} is not a positive finite number")));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::validation("mean", "entries must be finite"));
        }
        Ok(Self { mean, scale })
    }

    /// Mean 0, scale 1 for every feature.
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Shape(format!(
                "scaler has dimension {}, sample has {len}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn transform(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(features.len())?;
        Ok(features
            .iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect())
    }

    pub fn inverse_transform(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(features.len())?;
        Ok(features
            .iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(z, (m, s))| z * s + m)
            .collect())
    }
}

/// Fits z-score statistics (mean, population standard deviation).
pub fn fit_scaler(samples: &[EncodedSample]) -> Result<ScalerParams> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "scaler needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].dim();
    if let Some(bad) = samples.iter().find(|s| s.dim() != dim) {
        return Err(Error::Shape(format!(
            "mixed sample dimensions {dim} and {}",
            bad.dim()
        )));
    }
    let n = samples.len() as f64;
    let mut mean = vec![0.0; dim];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(&s.features) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut var = vec![0.0; dim];
    for s in samples {
        for ((v, x), m) in var.iter_mut().zip(&s.features).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let scale = var
        .into_iter()
        .map(|v| {
            let sd = (v / n).sqrt();
            if sd < MIN_SCALE {
                1.0
            } else {
                sd
            }
        })
        .collect();
    ScalerParams::new(mean, scale)
}

/// Standardizes the features of `sample`; the target is untouched.
pub fn apply_scaler(params: &ScalerParams, sample: &EncodedSample) -> Result<EncodedSample> {
    Ok(EncodedSample::new(params.transform(&sample.features)?, sample.target))
}
