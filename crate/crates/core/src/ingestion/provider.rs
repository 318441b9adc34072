//! Provider clients, transports and the polling loop.

use std::collections::{BTreeMap, HashSet};
use std::sync::Mutex;

use super::payload::{
    parse_traffic_payload, parse_weather_payload, traffic_payload_json, weather_payload_json, TrafficRecord,
    WeatherReport,
};
use super::synth::{slot_state, SynthConfig, SLOT_SECONDS};
use super::BoundingBox;
use crate::error::{Error, Result};
use crate::featureset::TrafficObservation;

/// Request/response transport. Failures should be reported as
/// [`Error::Provider`].
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        (**self).get(url)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        (**self).get(url)
    }
}

pub trait TrafficProvider {
    fn traffic(&self, bbox: &BoundingBox, at: i64) -> Result<Vec<TrafficRecord>>;
}

pub trait WeatherProvider {
    fn weather(&self, bbox: &BoundingBox, at: i64) -> Result<WeatherReport>;
}

fn request_url(endpoint: &str, bbox: &BoundingBox, at: i64, api_key: Option<&str>) -> String {
    let sep = if endpoint.contains('?') { '&' } else { '?' };
    let (a, b) = (bbox.corner_a(), bbox.corner_b());
    let mut url = format!(
        "{endpoint}{sep}bbox={},{};{},{}&at={at}",
        a.0, a.1, b.0, b.1
    );
    if let Some(key) = api_key {
        url.push_str("&apiKey=");
        url.push_str(key);
    }
    url
}

/// Traffic endpoint client speaking the documented JSON schema.
pub struct TrafficClient<T> {
    transport: T,
    endpoint: String,
    api_key: Option<String>,
}

impl<T: Transport> TrafficClient<T> {
    pub fn new(transport: T, endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        Self {
            transport,
            endpoint: endpoint.into(),
            api_key,
        }
    }
}

impl<T: Transport> TrafficProvider for TrafficClient<T> {
    fn traffic(&self, bbox: &BoundingBox, at: i64) -> Result<Vec<TrafficRecord>> {
        let url = request_url(&self.endpoint, bbox, at, self.api_key.as_deref());
        parse_traffic_payload(&self.transport.get(&url)?)
    }
}

/// Weather endpoint client speaking the documented JSON schema.
pub struct WeatherClient<T> {
    transport: T,
    endpoint: String,
    api_key: Option<String>,
}

impl<T: Transport> WeatherClient<T> {
    pub fn new(transport: T, endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        Self {
            transport,
            endpoint: endpoint.into(),
            api_key,
        }
    }
}

impl<T: Transport> WeatherProvider for WeatherClient<T> {
    fn weather(&self, bbox: &BoundingBox, at: i64) -> Result<WeatherReport> {
        let url = request_url(&self.endpoint, bbox, at, self.api_key.as_deref());
        parse_weather_payload(&self.transport.get(&url)?)
    }
}

type Handler = Box<dyn Fn(&str) -> Result<Vec<u8>> + Send + Sync>;

/// In-process transport that answers from registered handlers and records
/// every requested URL.
#[derive(Default)]
pub struct MockTransport {
    routes: Vec<(String, Handler)>,
    requests: Mutex<Vec<String>>,
}

impl MockTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Routes URLs starting with `prefix` to `handler`. The first matching
    /// route wins.
    pub fn route(
        mut self,
        prefix: impl Into<String>,
        handler: impl Fn(&str) -> Result<Vec<u8>> + Send + Sync + 'static,
    ) -> Self {
        self.routes.push((prefix.into(), Box::new(handler)));
        self
    }

    /// Routes `prefix` to a fixed body.
    pub fn respond(self, prefix: impl Into<String>, body: impl Into<Vec<u8>>) -> Self {
        let body = body.into();
        self.route(prefix, move |_| Ok(body.clone()))
    }

    /// Serves payloads generated by the synthetic model: traffic under
    /// `mock://traffic`, weather under `mock://weather`. The `at` query
    /// parameter selects the 5-minute slot containing it.
    pub fn synthetic(config: SynthConfig) -> Self {
        let weather_cfg = config.clone();
        Self::new()
            .route(MOCK_TRAFFIC_ENDPOINT, move |url| {
                let state = slot_state(&config, slot_floor(query_timestamp(url)?))?;
                Ok(traffic_payload_json(&state.traffic))
            })
            .route(MOCK_WEATHER_ENDPOINT, move |url| {
                let state = slot_state(&weather_cfg, slot_floor(query_timestamp(url)?))?;
                Ok(weather_payload_json(&state.weather))
            })
    }

    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().expect("request log poisoned").clone()
    }
}

pub const MOCK_TRAFFIC_ENDPOINT: &str = "mock://traffic";
pub const MOCK_WEATHER_ENDPOINT: &str = "mock://weather";

fn slot_floor(ts: i64) -> i64 {
    ts.div_euclid(SLOT_SECONDS) * SLOT_SECONDS
}

fn query_timestamp(url: &str) -> Result<i64> {
    let query = url.split_once('?').map(|(_, q)| q).unwrap_or_default();
    query
        .split('&')
        .find_map(|kv| kv.strip_prefix("at="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Provider(format!("no `at` parameter in {url}")))
}

impl Transport for MockTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        self.requests.lock().expect("request log poisoned").push(url.to_string());
        self.routes
            .iter()
            .find(|(prefix, _)| url.starts_with(prefix.as_str()))
            .map(|(_, handler)| handler(url))
            .unwrap_or_else(|| Err(Error::Provider(format!("no mock route for {url}"))))
    }
}

/// Blocking HTTP transport.
#[cfg(feature = "http")]
pub struct HttpTransport {
    agent: ureq::Agent,
}

#[cfg(feature = "http")]
impl HttpTransport {
    pub fn new(timeout: std::time::Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { agent }
    }
}

#[cfg(feature = "http")]
impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>> {
        let mut response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| Error::Provider(format!("GET {url}: {e}")))?;
        response
            .body_mut()
            .read_to_vec()
            .map_err(|e| Error::Provider(format!("GET {url}: {e}")))
    }
}

/// Runs one collection cycle: one observation per road in the traffic
/// payload, joined with the single weather report. Duplicate road ids within
/// a payload keep their first record.
pub fn poll_cycle(
    traffic: &dyn TrafficProvider,
    weather: &dyn WeatherProvider,
    bbox: &BoundingBox,
    at: i64,
) -> Result<Vec<TrafficObservation>> {
    if at <= 0 {
        return Err(Error::Domain(format!("poll timestamp {at} is not positive")));
    }
    let records = traffic.traffic(bbox, at)?;
    let report = weather.weather(bbox, at)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        if !seen.insert(rec.road_id.clone()) {
            log::warn!("duplicate road `{}` in traffic payload at {at}; keeping the first", rec.road_id);
            continue;
        }
        let obs = TrafficObservation {
            timestamp: at,
            speed_ratio: rec.speed_ratio(),
            road_id: rec.road_id,
            temperature_c: report.temperature_c,
            daylight: report.daylight,
            humidity_pct: report.humidity_pct,
            wind_speed_kmh: report.wind_speed_kmh,
            jam_factor: rec.jam_factor,
        };
        obs.validate()?;
        out.push(obs);
    }
    Ok(out)
}

/// Time source for the collection loop.
pub trait Clock {
    fn now(&self) -> i64;
    fn sleep_until(&mut self, timestamp: i64);
}

/// Wall clock; sleeps for real.
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> i64 {
        chrono::Utc::now().timestamp()
    }

    fn sleep_until(&mut self, timestamp: i64) {
        let wait = timestamp - self.now();
        if wait > 0 {
            std::thread::sleep(std::time::Duration::from_secs(wait as u64));
        }
    }
}

/// Clock that jumps straight to the requested time.
pub struct SimulatedClock {
    now: i64,
}

impl SimulatedClock {
    pub fn starting_at(now: i64) -> Self {
        Self { now }
    }
}

impl Clock for SimulatedClock {
    fn now(&self) -> i64 {
        self.now
    }

    fn sleep_until(&mut self, timestamp: i64) {
        self.now = self.now.max(timestamp);
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct CollectSummary {
    pub cycles: usize,
    pub succeeded: usize,
    pub skipped: usize,
    pub rows: usize,
    /// Error message per skipped cycle timestamp.
    pub failures: BTreeMap<i64, String>,
}

/// Polls every `interval` seconds for `duration` seconds, starting at the
/// first interval boundary at or after `clock.now()`. Failed cycles are
/// logged and skipped; rows from successful cycles go to `sink`.
pub fn collect(
    traffic: &dyn TrafficProvider,
    weather: &dyn WeatherProvider,
    bbox: &BoundingBox,
    clock: &mut dyn Clock,
    interval: i64,
    duration: i64,
    mut sink: impl FnMut(&[TrafficObservation]) -> Result<()>,
) -> Result<CollectSummary> {
    if interval <= 0 {
        return Err(Error::validation("poll_interval_secs", "must be positive"));
    }
    if duration < 0 {
        return Err(Error::validation("duration", "must be non-negative"));
    }
    let start = clock.now().div_euclid(interval) * interval
        + if clock.now().rem_euclid(interval) == 0 { 0 } else { interval };
    let cycles = duration / interval;
    let mut summary = CollectSummary {
        cycles: cycles as usize,
        ..CollectSummary::default()
    };
    for k in 0..cycles {
        let at = start + k * interval;
        clock.sleep_until(at);
        match poll_cycle(traffic, weather, bbox, at) {
            Ok(rows) => {
                sink(&rows)?;
                summary.succeeded += 1;
                summary.rows += rows.len();
            }
            Err(e) => {
                log::warn!("poll cycle at {at} skipped: {e}");
                summary.skipped += 1;
                summary.failures.insert(at, e.to_string());
            }
        }
    }
    Ok(summary)
}
