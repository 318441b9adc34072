//! Week split, per-road training and week-ahead forecasting.

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{rmse, EvaluationSeries};
use crate::featureset::{
    apply_scaler, encode_observation, feature_layout_tag, fit_scaler, TrafficObservation, SECONDS_PER_DAY,
};
use crate::ingestion::SLOT_SECONDS;
use crate::svr::{train_svr, SvrHyperparams, SvrModel};

/// Fewest training rows accepted for one road.
pub const MIN_TRAINING_ROWS: usize = 100;

/// Longest run of missing slots that [`fill_gaps`] bridges.
pub const MAX_FILLED_SLOTS: i64 = 3;

/// Training and test weeks, as UTC midnights of their first and last days.
/// A span covers `[start, end + 1 day)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekSplit {
    train_start: i64,
    train_end: i64,
    test_start: i64,
    test_end: i64,
}

fn midnight(date: NaiveDate) -> i64 {
    date.and_time(NaiveTime::MIN).and_utc().timestamp()
}

fn parse_date(field: &str, text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .map_err(|e| Error::validation(field, format!("`{text}` is not an ISO date: {e}")))
}

impl WeekSplit {
    pub fn new(train_start: i64, train_end: i64, test_start: i64, test_end: i64) -> Result<Self> {
        for (name, start, end) in [
            ("train_end", train_start, train_end),
            ("test_end", test_start, test_end),
        ] {
            if start % SECONDS_PER_DAY != 0 || end % SECONDS_PER_DAY != 0 {
                return Err(Error::validation(name, "split bounds must be UTC midnights"));
            }
            if end - start != 6 * SECONDS_PER_DAY {
                return Err(Error::validation(name, "each span must cover exactly 7 days"));
            }
        }
        if train_end + SECONDS_PER_DAY > test_start {
            return Err(Error::validation("test_start", "test week must start after the training week"));
        }
        Ok(Self {
            train_start,
            train_end,
            test_start,
            test_end,
        })
    }

    pub fn from_dates(train_start: NaiveDate, train_end: NaiveDate, test_start: NaiveDate, test_end: NaiveDate) -> Result<Self> {
        Self::new(
            midnight(train_start),
            midnight(train_end),
            midnight(test_start),
            midnight(test_end),
        )
    }

    /// Parses `YYYY-MM-DD` dates.
    pub fn parse(train_start: &str, train_end: &str, test_start: &str, test_end: &str) -> Result<Self> {
        Self::from_dates(
            parse_date("train_start", train_start)?,
            parse_date("train_end", train_end)?,
            parse_date("test_start", test_start)?,
            parse_date("test_end", test_end)?,
        )
    }

    /// Consecutive weeks, the first starting at the UTC midnight `train_start`.
    pub fn consecutive(train_start: i64) -> Result<Self> {
        let week = 7 * SECONDS_PER_DAY;
        Self::new(
            train_start,
            train_start + 6 * SECONDS_PER_DAY,
            train_start + week,
            train_start + week + 6 * SECONDS_PER_DAY,
        )
    }

    pub fn train_start(&self) -> i64 {
        self.train_start
    }

    pub fn train_end(&self) -> i64 {
        self.train_end
    }

    pub fn test_start(&self) -> i64 {
        self.test_start
    }

    pub fn test_end(&self) -> i64 {
        self.test_end
    }

    /// Half-open training span.
    pub fn train_span(&self) -> (i64, i64) {
        (self.train_start, self.train_end + SECONDS_PER_DAY)
    }

    /// Half-open test span.
    pub fn test_span(&self) -> (i64, i64) {
        (self.test_start, self.test_end + SECONDS_PER_DAY)
    }
}

/// Partitions `dataset` into training and test rows. Rows outside both spans
/// are dropped; input order is preserved.
pub fn split_weeks(
    dataset: &[TrafficObservation],
    split: &WeekSplit,
) -> Result<(Vec<TrafficObservation>, Vec<TrafficObservation>)> {
    let within = |(lo, hi): (i64, i64)| {
        dataset
            .iter()
            .filter(|o| (lo..hi).contains(&o.timestamp))
            .cloned()
            .collect::<Vec<_>>()
    };
    let train = within(split.train_span());
    let test = within(split.test_span());
    if train.is_empty() {
        return Err(Error::InsufficientData("no observations in the training week".into()));
    }
    if test.is_empty() {
        return Err(Error::InsufficientData("no observations in the test week".into()));
    }
    Ok((train, test))
}

/// One road's rows, sorted by timestamp. Later duplicates of a timestamp are
/// dropped.
pub fn road_series(dataset: &[TrafficObservation], road_id: &str) -> Vec<TrafficObservation> {
    let mut rows: Vec<_> = dataset.iter().filter(|o| o.road_id == road_id).cloned().collect();
    rows.sort_by_key(|o| o.timestamp);
    rows.dedup_by_key(|o| o.timestamp);
    rows
}

/// Sorted, de-duplicated road ids.
pub fn road_ids(dataset: &[TrafficObservation]) -> Vec<String> {
    let mut ids: Vec<String> = dataset.iter().map(|o| o.road_id.clone()).collect();
    ids.sort();
    ids.dedup();
    ids
}

/// Forward-fills runs of up to [`MAX_FILLED_SLOTS`] missing 5-minute slots
/// in a sorted single-road series. Longer gaps stay empty.
pub fn fill_gaps(series: &[TrafficObservation]) -> Vec<TrafficObservation> {
    let mut out = Vec::with_capacity(series.len());
    for (i, obs) in series.iter().enumerate() {
        if i > 0 {
            let prev = &series[i - 1];
            let gap = obs.timestamp - prev.timestamp;
            let missing = gap / SLOT_SECONDS - 1;
            if gap % SLOT_SECONDS == 0 && (1..=MAX_FILLED_SLOTS).contains(&missing) {
                for k in 1..=missing {
                    out.push(TrafficObservation {
                        timestamp: prev.timestamp + k * SLOT_SECONDS,
                        ..prev.clone()
                    });
                }
            }
        }
        out.push(obs.clone());
    }
    out
}

/// Trains the road's model on its (gap-filled) training rows. The scaler is
/// fit on those rows only and embedded in the returned model.
pub fn train_road_model(train: &[TrafficObservation], road_id: &str, hp: &SvrHyperparams) -> Result<SvrModel> {
    let rows = fill_gaps(&road_series(train, road_id));
    if rows.len() < MIN_TRAINING_ROWS {
        return Err(Error::InsufficientData(format!(
            "road `{road_id}` has {} training rows, need at least {MIN_TRAINING_ROWS}",
            rows.len()
        )));
    }
    let encoded = rows.iter().map(encode_observation).collect::<Result<Vec<_>>>()?;
    let scaler = fit_scaler(&encoded)?;
    let scaled = encoded
        .iter()
        .map(|s| apply_scaler(&scaler, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(train_svr(&scaled, hp)?
        .with_scaler(scaler)?
        .with_layout_tag(feature_layout_tag()))
}

/// `(timestamp, predicted, actual)` for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastPoint {
    pub timestamp: i64,
    pub predicted: f64,
    pub actual: f64,
}

/// Forecasts for one road; timestamps strictly increase and both values lie
/// in `[0, 10]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSeries {
    road_id: String,
    points: Vec<ForecastPoint>,
}

impl ForecastSeries {
    pub fn new(road_id: impl Into<String>, points: Vec<ForecastPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if i > 0 && p.timestamp <= points[i - 1].timestamp {
                return Err(Error::validation("points", format!("timestamp {} out of order", p.timestamp)));
            }
            if !(0.0..=10.0).contains(&p.predicted) || !(0.0..=10.0).contains(&p.actual) {
                return Err(Error::validation(
                    "points",
                    format!("values at {} outside [0, 10]", p.timestamp),
                ));
            }
        }
        Ok(Self {
            road_id: road_id.into(),
            points,
        })
    }

    pub fn road_id(&self) -> &str {
        &self.road_id
    }

    pub fn points(&self) -> &[ForecastPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn actual(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.actual).collect()
    }

    pub fn predicted(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.predicted).collect()
    }

    pub fn to_evaluation(&self) -> Result<EvaluationSeries> {
        EvaluationSeries::new(self.actual(), self.predicted())
    }
}

/// Predicts every test row of the road, clamped to `[0, 10]`.
pub fn forecast_week(model: &SvrModel, road_id: &str, test: &[TrafficObservation]) -> Result<ForecastSeries> {
    if model.feature_layout_tag() != feature_layout_tag() {
        return Err(Error::Shape(format!(
            "model feature layout `{}` does not match `{}`",
            model.feature_layout_tag(),
            feature_layout_tag()
        )));
    }
    let points = road_series(test, road_id)
        .iter()
        .map(|obs| {
            let x = encode_observation(obs)?;
            Ok(ForecastPoint {
                timestamp: obs.timestamp,
                predicted: model.predict_unscaled(&x.features)?.clamp(0.0, 10.0),
                actual: obs.jam_factor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ForecastSeries::new(road_id, points)
}

/// Hyperparameter grid; expands to the Cartesian product in the order
/// `c`, then `epsilon`, then `gamma`.
///
/// Read from TOML:
///
/// ```toml
/// c = [1.0, 10.0]
/// epsilon = [0.1]
/// gamma = [0.05, 0.11]
/// tol = 1e-3        # optional
/// max_passes = 1000 # optional
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperparamGrid {
    pub c: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_passes: Option<usize>,
}

impl HyperparamGrid {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn expand(&self) -> Vec<SvrHyperparams> {
        let base = SvrHyperparams::default();
        let mut out = Vec::new();
        for &c in &self.c {
            for &epsilon in &self.epsilon {
                for &gamma in &self.gamma {
                    out.push(SvrHyperparams {
                        c,
                        epsilon,
                        gamma,
                        tol: self.tol.unwrap_or(base.tol),
                        max_passes: self.max_passes.unwrap_or(base.max_passes),
                    });
                }
            }
        }
        out
    }
}

/// Validation RMSE of every grid point, `None` where training failed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: SvrHyperparams,
    pub best_rmse: f64,
    pub scores: Vec<(SvrHyperparams, Option<f64>)>,
}

/// Fits each grid point on the road's first six training days and scores it
/// by RMSE on the seventh. Ties go to the earlier grid point.
pub fn grid_search(train: &[TrafficObservation], road_id: &str, grid: &[SvrHyperparams]) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::SearchFailed("empty hyperparameter grid".into()));
    }
    let series = road_series(train, road_id);
    let Some(first) = series.first() else {
        return Err(Error::InsufficientData(format!("road `{road_id}` has no training rows")));
    };
    let cut = first.timestamp.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY + 6 * SECONDS_PER_DAY;
    let (fit, validate): (Vec<_>, Vec<_>) = series.into_iter().partition(|o| o.timestamp < cut);
    if validate.is_empty() {
        return Err(Error::InsufficientData(format!("road `{road_id}` has no rows on its seventh training day")));
    }

    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(SvrHyperparams, f64)> = None;
    for hp in grid {
        let score = train_road_model(&fit, road_id, hp)
            .and_then(|model| forecast_week(&model, road_id, &validate))
            .and_then(|f| Ok(rmse(&f.to_evaluation()?)));
        match score {
            Ok(r) => {
                if best.is_none_or(|(_, b)| r < b) {
                    best = Some((*hp, r));
                }
                scores.push((*hp, Some(r)));
            }
            Err(e) => {
                log::warn!("grid point {hp:?} failed on road `{road_id}`: {e}");
                scores.push((*hp, None));
            }
        }
    }
    let (best, best_rmse) =
        best.ok_or_else(|| Error::SearchFailed(format!("every grid point failed on road `{road_id}`")))?;
    Ok(GridSearchResult {
        best,
        best_rmse,
        scores,
    })
}
