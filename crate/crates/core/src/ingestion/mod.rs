//! Data collection, persistence and synthetic datasets.

mod payload;
mod provider;
mod store;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use payload::{
    parse_traffic_payload, parse_weather_payload, traffic_payload_json, weather_payload_json, TrafficRecord,
    WeatherReport,
};
#[cfg(feature = "http")]
pub use provider::HttpTransport;
pub use provider::{
    collect, poll_cycle, Clock, CollectSummary, MockTransport, SimulatedClock, SystemClock, TrafficClient,
    TrafficProvider, Transport, WeatherClient, WeatherProvider, MOCK_TRAFFIC_ENDPOINT, MOCK_WEATHER_ENDPOINT,
};
pub use store::{append_csv, load_csv, read_csv, save_csv, to_csv_bytes, CSV_HEADER};
pub use synth::{
    base_jam, slot_state, synth_generate, SlotState, SynthConfig, DEFAULT_START, FREEFLOW_KMH, SLOTS_PER_DAY,
    SLOT_SECONDS,
};

/// Two opposite corners, each `(latitude, longitude)` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoundingBox", into = "RawBoundingBox")]
pub struct BoundingBox {
    corner_a: (f64, f64),
    corner_b: (f64, f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundingBox {
    corner_a: (f64, f64),
    corner_b: (f64, f64),
}

impl TryFrom<RawBoundingBox> for BoundingBox {
    type Error = Error;

    fn try_from(raw: RawBoundingBox) -> Result<Self> {
        Self::new(raw.corner_a, raw.corner_b)
    }
}

impl From<BoundingBox> for RawBoundingBox {
    fn from(b: BoundingBox) -> Self {
        Self {
            corner_a: b.corner_a,
            corner_b: b.corner_b,
        }
    }
}

impl BoundingBox {
    pub fn new(corner_a: (f64, f64), corner_b: (f64, f64)) -> Result<Self> {
        for (name, (lat, lon)) in [("corner_a", corner_a), ("corner_b", corner_b)] {
            if !(-90.0..=90.0).contains(&lat) {
                return Err(Error::validation(name, format!("latitude {lat} outside [-90, 90]")));
            }
            if !(-180.0..=180.0).contains(&lon) {
                return Err(Error::validation(name, format!("longitude {lon} outside [-180, 180]")));
            }
        }
        if corner_a == corner_b {
            return Err(Error::validation("corner_b", "corners must be distinct"));
        }
        Ok(Self { corner_a, corner_b })
    }

    pub fn corner_a(&self) -> (f64, f64) {
        self.corner_a
    }

    pub fn corner_b(&self) -> (f64, f64) {
        self.corner_b
    }
}

impl Default for BoundingBox {
    /// Central New Delhi.
    fn default() -> Self {
        Self {
            corner_a: (28.747193, 77.091064),
            corner_b: (28.495247, 77.304611),
        }
    }
}

/// Collection settings, read from a TOML file:
///
/// ```toml
/// poll_interval_secs = 300
/// traffic_endpoint = "https://traffic.example/flow.json"
/// weather_endpoint = "https://weather.example/report.json"
/// api_key_env = "TRAFFIC_API_KEY"
///
/// [bbox]
/// corner_a = [28.747193, 77.091064]
/// corner_b = [28.495247, 77.304611]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectConfig {
    pub bbox: BoundingBox,
    pub poll_interval_secs: i64,
    pub traffic_endpoint: String,
    pub weather_endpoint: String,
    /// Name of the environment variable holding the API key, if any.
    pub api_key_env: Option<String>,
}

impl Default for CollectConfig {
    fn default() -> Self {
        Self {
            bbox: BoundingBox::default(),
            poll_interval_secs: SLOT_SECONDS,
            traffic_endpoint: MOCK_TRAFFIC_ENDPOINT.into(),
            weather_endpoint: MOCK_WEATHER_ENDPOINT.into(),
            api_key_env: None,
        }
    }
}

impl CollectConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.poll_interval_secs <= 0 {
            return Err(Error::validation("poll_interval_secs", "must be positive"));
        }
        if self.traffic_endpoint.is_empty() || self.weather_endpoint.is_empty() {
            return Err(Error::validation("traffic_endpoint", "endpoints must be non-empty"));
        }
        Ok(())
    }

    /// Reads the API key from the configured environment variable.
    pub fn api_key(&self) -> Result<Option<String>> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| Error::Config(format!("environment variable {var} is not set"))),
        }
    }
}
