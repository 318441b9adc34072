// Encode raw observations into the nine-feature layout and standardize them.

use jamcast::featureset::{
    apply_scaler, encode_day_of_week, encode_observation, encode_time_of_day, fit_scaler, TrafficObservation,
    FEATURE_NAMES,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Monday 2019-04-15, every three hours
    let rows: Vec<TrafficObservation> = (0..8)
        .map(|k| TrafficObservation {
            timestamp: 1_555_286_400 + k * 3 * 3600,
            road_id: "ring-road".into(),
            temperature_c: 26.0 + k as f64,
            daylight: (2..6).contains(&k),
            humidity_pct: 40.0,
            wind_speed_kmh: 8.0,
            speed_ratio: 1.0 - 0.1 * k as f64,
            jam_factor: k as f64,
        })
        .collect();

    let (s, c) = encode_time_of_day(6 * 3600)?;
    println!("06:00 -> ({s:.4}, {c:.4})");
    let (s, c) = encode_day_of_week(6)?;
    println!("Sunday -> ({s:.4}, {c:.4})");

    let encoded = rows.iter().map(encode_observation).collect::<Result<Vec<_>, _>>()?;
    let scaler = fit_scaler(&encoded)?;
    let first = apply_scaler(&scaler, &encoded[0])?;
    for ((name, raw), z) in FEATURE_NAMES.iter().zip(&encoded[0].features).zip(&first.features) {
        println!("{name:>15}: raw {raw:>8.4}  scaled {z:>8.4}");
    }
    assert_eq!(scaler.inverse_transform(&first.features)?.len(), FEATURE_NAMES.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
