//! Provider payload schemas.
//!
//! Traffic:
//!
//! ```json
//! {"roads": [{"road_id": "A->B", "jam_factor": 3.2, "current_speed": 31.0, "freeflow_speed": 52.0}]}
//! ```
//!
//! Weather:
//!
//! ```json
//! {"temperature_c": 31.5, "humidity_pct": 40.0, "wind_speed_kmh": 7.2, "daylight": true}
//! ```
//!
//! Parse errors name the JSON path of the offending value, e.g.
//! `roads[0].jam_factor`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// One road entry of a traffic payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficRecord {
    pub road_id: String,
    pub jam_factor: f64,
    /// km/h
    pub current_speed: f64,
    /// km/h, free-flow reference speed
    pub freeflow_speed: f64,
}

impl TrafficRecord {
    pub fn speed_ratio(&self) -> f64 {
        self.current_speed / self.freeflow_speed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherReport {
    pub temperature_c: f64,
    pub humidity_pct: f64,
    pub wind_speed_kmh: f64,
    pub daylight: bool,
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(format!("{path}{key}"), "missing field"))
}

fn number(obj: &Map<String, Value>, path: &str, key: &str) -> Result<f64> {
    field(obj, path, key)?
        .as_f64()
        .ok_or_else(|| Error::parse(format!("{path}{key}"), "expected a number"))
}

fn in_range(value: f64, lo: f64, hi: f64, path: &str, key: &str) -> Result<f64> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(Error::parse(
            format!("{path}{key}"),
            format!("{value} outside [{lo}, {hi}]"),
        ))
    }
}

fn parse_json(raw: &[u8]) -> Result<Value> {
    let text = std::str::from_utf8(raw).map_err(|e| Error::parse("$", format!("invalid UTF-8: {e}")))?;
    serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))
}

pub fn parse_traffic_payload(raw: &[u8]) -> Result<Vec<TrafficRecord>> {
    let root = parse_json(raw)?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected an object"))?;
    let roads = field(obj, "", "roads")?
        .as_array()
        .ok_or_else(|| Error::parse("roads", "expected an array"))?;
    roads
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let path = format!("roads[{i}].");
            let rec = entry
                .as_object()
                .ok_or_else(|| Error::parse(format!("roads[{i}]"), "expected an object"))?;
            let road_id = field(rec, &path, "road_id")?
                .as_str()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::parse(format!("{path}road_id"), "expected a non-empty string"))?
                .to_string();
            let jam_factor = in_range(number(rec, &path, "jam_factor")?, 0.0, 10.0, &path, "jam_factor")?;
            let current_speed = in_range(
                number(rec, &path, "current_speed")?,
                0.0,
                f64::MAX,
                &path,
                "current_speed",
            )?;
            let freeflow_speed = number(rec, &path, "freeflow_speed")?;
            if !(freeflow_speed > 0.0 && freeflow_speed.is_finite()) {
                return Err(Error::parse(
                    format!("{path}freeflow_speed"),
                    format!("{freeflow_speed} is not positive"),
                ));
            }
            Ok(TrafficRecord {
                road_id,
                jam_factor,
                current_speed,
                freeflow_speed,
            })
        })
        .collect()
}

pub fn parse_weather_payload(raw: &[u8]) -> Result<WeatherReport> {
    let root = parse_json(raw)?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected an object"))?;
    let temperature_c = number(obj, "", "temperature_c")?;
    if !temperature_c.is_finite() {
        return Err(Error::parse("temperature_c", "not finite"));
    }
    Ok(WeatherReport {
        temperature_c,
        humidity_pct: in_range(number(obj, "", "humidity_pct")?, 0.0, 100.0, "", "humidity_pct")?,
        wind_speed_kmh: in_range(number(obj, "", "wind_speed_kmh")?, 0.0, f64::MAX, "", "wind_speed_kmh")?,
        daylight: field(obj, "", "daylight")?
            .as_bool()
            .ok_or_else(|| Error::parse("daylight", "expected a boolean"))?,
    })
}

pub fn traffic_payload_json(records: &[TrafficRecord]) -> Vec<u8> {
    serde_json::to_vec(&serde_json::json!({ "roads": records })).expect("records serialize")
}

pub fn weather_payload_json(report: &WeatherReport) -> Vec<u8> {
    serde_json::to_vec(report).expect("report serializes")
}
