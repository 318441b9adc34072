//! CSV persistence.
//!
//! Header, in this exact order:
//!
//! ```text
//! timestamp,road_id,temperature_c,daylight,humidity_pct,wind_speed_kmh,speed_ratio,jam_factor
//! ```
//!
//! Timestamps are integer epoch seconds, `daylight` is `0`/`1`, and reals are
//! written in shortest round-trip form so a save/load cycle is lossless.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::featureset::TrafficObservation;

pub const CSV_HEADER: [&str; 8] = [
    "timestamp",
    "road_id",
    "temperature_c",
    "daylight",
    "humidity_pct",
    "wind_speed_kmh",
    "speed_ratio",
    "jam_factor",
];

fn record(obs: &TrafficObservation) -> [String; 8] {
    [
        obs.timestamp.to_string(),
        obs.road_id.clone(),
        obs.temperature_c.to_string(),
        if obs.daylight { "1" } else { "0" }.to_string(),
        obs.humidity_pct.to_string(),
        obs.wind_speed_kmh.to_string(),
        obs.speed_ratio.to_string(),
        obs.jam_factor.to_string(),
    ]
}

fn write_rows<W: Write>(out: W, rows: &[TrafficObservation], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    if header {
        w.write_record(CSV_HEADER).map_err(csv_err)?;
    }
    for (i, obs) in rows.iter().enumerate() {
        obs.validate().map_err(|e| match e {
            Error::Validation { field, message } => Error::Validation {
                field: format!("rows[{i}].{field}"),
                message,
            },
            e => e,
        })?;
        w.write_record(record(obs)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `rows` (validated) with a header, replacing any existing file.
pub fn save_csv(rows: &[TrafficObservation], path: impl AsRef<Path>) -> Result<()> {
    write_rows(File::create(path)?, rows, true)
}

/// Serializes to an in-memory CSV document.
pub fn to_csv_bytes(rows: &[TrafficObservation]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows, true)?;
    Ok(buf)
}

/// Appends `rows`, writing the header first when the file is new or empty.
/// An existing file must carry the expected header.
pub fn append_csv(rows: &[TrafficObservation], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = OpenOptions::new().create(true).read(true).append(true).open(path)?;
    let mut existing = String::new();
    file.read_to_string(&mut existing)?;
    let empty = existing.trim().is_empty();
    if !empty {
        let first = existing.lines().next().unwrap_or_default();
        if first.trim_end() != CSV_HEADER.join(",") {
            return Err(Error::parse("line 1", format!("unexpected header `{first}`")));
        }
        if !existing.ends_with('\n') {
            file.write_all(b"\n")?;
        }
    }
    write_rows(file, rows, empty)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<TrafficObservation>> {
    read_csv(File::open(path)?)
}

/// Parses a CSV document; errors carry the 1-based line number.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrafficObservation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    match records.next() {
        None => return Err(Error::parse("line 1", "missing header")),
        Some(Err(e)) => return Err(Error::parse("line 1", e.to_string())),
        Some(Ok(h)) => {
            if h.iter().ne(CSV_HEADER) {
                return Err(Error::parse(
                    "line 1",
                    format!("expected header `{}`", CSV_HEADER.join(",")),
                ));
            }
        }
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(format!("line {line}"), e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let at = || format!("line {line}");
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::parse(
                at(),
                format!("expected {} columns, found {}", CSV_HEADER.len(), rec.len()),
            ));
        }
        let real = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(at(), format!("`{}` is not a number in column {}", &rec[i], CSV_HEADER[i])))
        };
        let obs = TrafficObservation {
            timestamp: rec[0]
                .parse()
                .map_err(|_| Error::parse(at(), format!("`{}` is not an integer timestamp", &rec[0])))?,
            road_id: rec[1].to_string(),
            temperature_c: real(2)?,
            daylight: match &rec[3] {
                "0" => false,
                "1" => true,
                other => return Err(Error::parse(at(), format!("daylight must be 0 or 1, got `{other}`"))),
            },
            humidity_pct: real(4)?,
            wind_speed_kmh: real(5)?,
            speed_ratio: real(6)?,
            jam_factor: real(7)?,
        };
        obs.validate().map_err(|e| Error::parse(at(), e.to_string()))?;
        out.push(obs);
    }
    Ok(out)
}
