//! RMSE, per-road reports and method comparison.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::featureset::{TrafficObservation, SECONDS_PER_WEEK};
use crate::pipeline::{fill_gaps, road_series, ForecastPoint, ForecastSeries};

/// Paired actual and predicted values; equal lengths, at least one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSeries {
    actual: Vec<f64>,
    predicted: Vec<f64>,
}

impl EvaluationSeries {
    pub fn new(actual: Vec<f64>, predicted: Vec<f64>) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::Shape(format!(
                "{} actual values but {} predictions",
                actual.len(),
                predicted.len()
            )));
        }
        if actual.is_empty() {
            return Err(Error::Shape("empty evaluation series".into()));
        }
        if actual.iter().chain(&predicted).any(|v| !v.is_finite()) {
            return Err(Error::Domain("evaluation series contains non-finite values".into()));
        }
        Ok(Self { actual, predicted })
    }

    pub fn actual(&self) -> &[f64] {
        &self.actual
    }

    pub fn predicted(&self) -> &[f64] {
        &self.predicted
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }
}

/// Root-mean-square error.
///
/// ```
/// use jamcast::evaluation::{rmse, EvaluationSeries};
/// let s = EvaluationSeries::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
/// assert_eq!(rmse(&s), 12.5f64.sqrt());
/// ```
pub fn rmse(series: &EvaluationSeries) -> f64 {
    let sum: f64 = series
        .actual
        .iter()
        .zip(&series.predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    (sum / series.len() as f64).sqrt()
}

/// Per-road RMSE of one method and their unweighted mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    per_road: BTreeMap<String, f64>,
    average_rmse: f64,
    method_label: String,
}

impl EvaluationReport {
    pub fn from_per_road(per_road: BTreeMap<String, f64>, method_label: impl Into<String>) -> Result<Self> {
        if per_road.is_empty() {
            return Err(Error::Shape("report needs at least one road".into()));
        }
        if let Some((road, v)) = per_road.iter().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::validation("per_road", format!("RMSE {v} for road `{road}` is invalid")));
        }
        let average_rmse = mean(per_road.values().copied());
        Ok(Self {
            per_road,
            average_rmse,
            method_label: method_label.into(),
        })
    }

    pub fn per_road(&self) -> &BTreeMap<String, f64> {
        &self.per_road
    }

    pub fn average_rmse(&self) -> f64 {
        self.average_rmse
    }

    pub fn method_label(&self) -> &str {
        &self.method_label
    }
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

pub fn build_report(forecasts: &[ForecastSeries], label: &str) -> Result<EvaluationReport> {
    if forecasts.is_empty() {
        return Err(Error::Shape("no forecasts to report".into()));
    }
    let mut per_road = BTreeMap::new();
    for f in forecasts {
        let r = rmse(&f.to_evaluation()?);
        if per_road.insert(f.road_id().to_string(), r).is_some() {
            return Err(Error::validation("forecasts", format!("road `{}` appears twice", f.road_id())));
        }
    }
    EvaluationReport::from_per_road(per_road, label)
}

/// Label of the trailing row in comparison tables and report CSVs.
pub const AVERAGE_ROW: &str = "average";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub road_id: String,
    pub proposed_rmse: f64,
    pub baseline_rmse: f64,
}

/// One row per road in road order, followed by an [`AVERAGE_ROW`].
pub fn compare_reports(proposed: &EvaluationReport, baseline: &EvaluationReport) -> Result<Vec<ComparisonRow>> {
    let a: BTreeSet<&String> = proposed.per_road.keys().collect();
    let b: BTreeSet<&String> = baseline.per_road.keys().collect();
    if a != b {
        let only = |x: &BTreeSet<&String>, y: &BTreeSet<&String>| {
            x.difference(y).map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        };
        return Err(Error::validation(
            "roads",
            format!(
                "only in {}: [{}]; only in {}: [{}]",
                proposed.method_label,
                only(&a, &b),
                baseline.method_label,
                only(&b, &a)
            ),
        ));
    }
    let mut rows: Vec<ComparisonRow> = proposed
        .per_road
        .iter()
        .map(|(road, &p)| ComparisonRow {
            road_id: road.clone(),
            proposed_rmse: p,
            baseline_rmse: baseline.per_road[road],
        })
        .collect();
    rows.push(ComparisonRow {
        road_id: AVERAGE_ROW.into(),
        proposed_rmse: proposed.average_rmse,
        baseline_rmse: baseline.average_rmse,
    });
    Ok(rows)
}

pub const PERSISTENCE: &str = "persistence_last_week";
pub const GLOBAL_MEAN: &str = "global_mean";

/// Reference forecasts for the road's test rows:
///
/// * [`PERSISTENCE`]: the (gap-filled) training value at the same weekday and
///   time of day;
/// * [`GLOBAL_MEAN`]: the mean training jam factor.
pub fn naive_baselines(
    test: &[TrafficObservation],
    train: &[TrafficObservation],
    road_id: &str,
) -> Result<BTreeMap<String, ForecastSeries>> {
    let history = road_series(train, road_id);
    if history.is_empty() {
        return Err(Error::InsufficientData(format!("road `{road_id}` has no training rows")));
    }
    let global = mean(history.iter().map(|o| o.jam_factor));
    let by_slot: HashMap<i64, f64> = fill_gaps(&history)
        .iter()
        .map(|o| (o.timestamp.rem_euclid(SECONDS_PER_WEEK), o.jam_factor))
        .collect();

    let rows = road_series(test, road_id);
    let mut persistence = Vec::with_capacity(rows.len());
    let mut flat = Vec::with_capacity(rows.len());
    for o in &rows {
        let Some(&last_week) = by_slot.get(&o.timestamp.rem_euclid(SECONDS_PER_WEEK)) else {
            return Err(Error::InsufficientData(format!(
                "road `{road_id}`: no training value aligned with {}",
                o.timestamp
            )));
        };
        persistence.push(ForecastPoint {
            timestamp: o.timestamp,
            predicted: last_week,
            actual: o.jam_factor,
        });
        flat.push(ForecastPoint {
            timestamp: o.timestamp,
            predicted: global,
            actual: o.jam_factor,
        });
    }
    Ok(BTreeMap::from([
        (PERSISTENCE.to_string(), ForecastSeries::new(road_id, persistence)?),
        (GLOBAL_MEAN.to_string(), ForecastSeries::new(road_id, flat)?),
    ]))
}

fn csv_string(rows: impl IntoIterator<Item = [String; 3]>, header: [&str; 3]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// `road_id,method,rmse`: each report's roads followed by its average row.
pub fn report_csv(reports: &[EvaluationReport]) -> String {
    let rows = reports.iter().flat_map(|r| {
        r.per_road
            .iter()
            .map(|(road, v)| [road.clone(), r.method_label.clone(), v.to_string()])
            .chain(std::iter::once([
                AVERAGE_ROW.to_string(),
                r.method_label.clone(),
                r.average_rmse.to_string(),
            ]))
            .collect::<Vec<_>>()
    });
    csv_string(rows, ["road_id", "method", "rmse"])
}

/// `road_id,proposed_rmse,baseline_rmse`.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    csv_string(
        rows.iter().map(|r| {
            [
                r.road_id.clone(),
                r.proposed_rmse.to_string(),
                r.baseline_rmse.to_string(),
            ]
        }),
        ["road_id", "proposed_rmse", "baseline_rmse"],
    )
}
