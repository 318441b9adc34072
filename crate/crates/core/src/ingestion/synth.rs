//! Deterministic synthetic traffic and weather.
//!
//! For a slot at hour-of-day `h` on a weekday (weekend):
//!
//! ```text
//! base  = amplitude * (bump(h, morning) + bump(h, evening))
//! bump  = exp(-(h - peak)^2 / (2 * 1.5^2))
//! jam   = clamp(base + rain_jam_boost * rain + noise, 0, 10)
//! ratio = clamp(1 - jam / 10, 0.05, 1)
//! ```
//!
//! Weather is shared by all roads: temperature follows a diurnal sinusoid
//! peaking at 15:00, humidity jumps while it rains, daylight spans
//! 06:00-18:00. Every slot draws from its own ChaCha stream, so any slot can
//! be regenerated on its own (the mock provider relies on this).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::payload::{TrafficRecord, WeatherReport};
use crate::error::{Error, Result};
use crate::featureset::{day_index, TrafficObservation, SECONDS_PER_DAY};

pub const SLOT_SECONDS: i64 = 300;
pub const SLOTS_PER_DAY: usize = (SECONDS_PER_DAY / SLOT_SECONDS) as usize;

/// Free-flow speed of every synthetic road, km/h.
pub const FREEFLOW_KMH: f64 = 60.0;

/// Width (standard deviation) of each rush-hour bump, hours.
const PEAK_WIDTH_H: f64 = 1.5;

/// 2019-04-15 00:00:00 UTC, a Monday.
pub const DEFAULT_START: i64 = 1_555_286_400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub roads: usize,
    pub days: usize,
    /// First slot, UTC seconds; must sit on a 5-minute boundary.
    pub start_timestamp: i64,
    /// Morning and evening peak, hours after midnight.
    pub rush_hour_peaks: (f64, f64),
    pub weekday_amplitude: f64,
    pub weekend_amplitude: f64,
    pub rain_probability: f64,
    pub rain_jam_boost: f64,
    pub noise_std: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            roads: 4,
            days: 14,
            start_timestamp: DEFAULT_START,
            rush_hour_peaks: (8.5, 18.0),
            weekday_amplitude: 6.0,
            weekend_amplitude: 2.5,
            rain_probability: 0.05,
            rain_jam_boost: 1.5,
            noise_std: 0.5,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.roads == 0 {
            return Err(Error::validation("roads", "must be at least 1"));
        }
        if self.days == 0 {
            return Err(Error::validation("days", "must be at least 1"));
        }
        if self.start_timestamp <= 0 || self.start_timestamp % SLOT_SECONDS != 0 {
            return Err(Error::validation(
                "start_timestamp",
                "must be positive and on a 5-minute boundary",
            ));
        }
        let (m, e) = self.rush_hour_peaks;
        if !((0.0..24.0).contains(&m) && (0.0..24.0).contains(&e)) {
            return Err(Error::validation("rush_hour_peaks", "hours must lie in [0, 24)"));
        }
        for (name, v) in [
            ("weekday_amplitude", self.weekday_amplitude),
            ("weekend_amplitude", self.weekend_amplitude),
            ("rain_jam_boost", self.rain_jam_boost),
            ("noise_std", self.noise_std),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.rain_probability) {
            return Err(Error::validation("rain_probability", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn road_ids(&self) -> Vec<String> {
        (1..=self.roads).map(|r| format!("road-{r:02}")).collect()
    }

    pub fn row_count(&self) -> usize {
        self.roads * self.days * SLOTS_PER_DAY
    }
}

/// Everything generated for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotState {
    pub weather: WeatherReport,
    pub raining: bool,
    pub traffic: Vec<TrafficRecord>,
}

fn bump(hour: f64, peak: f64) -> f64 {
    (-(hour - peak).powi(2) / (2.0 * PEAK_WIDTH_H * PEAK_WIDTH_H)).exp()
}

/// Noise-free, rain-free jam factor at `timestamp`.
pub fn base_jam(config: &SynthConfig, timestamp: i64) -> f64 {
    let hour = timestamp.rem_euclid(SECONDS_PER_DAY) as f64 / 3600.0;
    let amplitude = if day_index(timestamp) < 5 {
        config.weekday_amplitude
    } else {
        config.weekend_amplitude
    };
    let (morning, evening) = config.rush_hour_peaks;
    amplitude * (bump(hour, morning) + bump(hour, evening))
}

/// Generates the slot containing `timestamp` (which must be slot-aligned).
pub fn slot_state(config: &SynthConfig, timestamp: i64) -> Result<SlotState> {
    if timestamp % SLOT_SECONDS != 0 || timestamp <= 0 {
        return Err(Error::Domain(format!("{timestamp} is not a positive 5-minute slot")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream((timestamp / SLOT_SECONDS) as u64);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let hour = timestamp.rem_euclid(SECONDS_PER_DAY) as f64 / 3600.0;
    let temperature_c = 30.0 + 6.0 * (std::f64::consts::TAU * (hour - 9.0) / 24.0).sin()
        + 0.5 * unit.sample(&mut rng);
    let raining = rng.random::<f64>() < config.rain_probability;
    let humidity_pct = if raining {
        85.0 + 5.0 * unit.sample(&mut rng)
    } else {
        40.0 + 8.0 * unit.sample(&mut rng)
    }
    .clamp(0.0, 100.0);
    let wind_speed_kmh = (8.0 + 3.0 * unit.sample(&mut rng)).max(0.0);
    let daylight = (6.0..18.0).contains(&hour);

    let base = base_jam(config, timestamp) + if raining { config.rain_jam_boost } else { 0.0 };
    let traffic = config
        .road_ids()
        .into_iter()
        .map(|road_id| {
            let jam = (base + config.noise_std * unit.sample(&mut rng)).clamp(0.0, 10.0);
            let ratio = (1.0 - jam / 10.0).clamp(0.05, 1.0);
            TrafficRecord {
                road_id,
                jam_factor: jam,
                current_speed: ratio * FREEFLOW_KMH,
                freeflow_speed: FREEFLOW_KMH,
            }
        })
        .collect();

    Ok(SlotState {
        weather: WeatherReport {
            temperature_c,
            humidity_pct,
            wind_speed_kmh,
            daylight,
        },
        raining,
        traffic,
    })
}

/// Generates `roads x days x 288` observations, ordered by timestamp then
/// road.
pub fn synth_generate(config: &SynthConfig) -> Result<Vec<TrafficObservation>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.row_count());
    for slot in 0..config.days * SLOTS_PER_DAY {
        let timestamp = config.start_timestamp + slot as i64 * SLOT_SECONDS;
        let state = slot_state(config, timestamp)?;
        for rec in state.traffic {
            // Store the ratio directly rather than current/freeflow so the
            // value is exactly the documented clamp.
            let speed_ratio = (1.0 - rec.jam_factor / 10.0).clamp(0.05, 1.0);
            out.push(TrafficObservation {
                timestamp,
                road_id: rec.road_id,
                temperature_c: state.weather.temperature_c,
                daylight: state.weather.daylight,
                humidity_pct: state.weather.humidity_pct,
                wind_speed_kmh: state.weather.wind_speed_kmh,
                speed_ratio,
                jam_factor: rec.jam_factor,
            });
        }
    }
    Ok(out)
}
