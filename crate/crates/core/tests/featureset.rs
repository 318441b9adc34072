use jamcast::featureset::{
    apply_scaler, encode_day_of_week, encode_observation, encode_time_of_day, fit_scaler, EncodedSample,
    TrafficObservation, FEATURE_DIM,
};
use proptest::prelude::*;

fn observation() -> impl Strategy<Value = TrafficObservation> {
    (
        1_i64..4_000_000_000,
        -40.0..50.0f64,
        any::<bool>(),
        0.0..=100.0f64,
        0.0..150.0f64,
        0.0..2.0f64,
        0.0..=10.0f64,
    )
        .prop_map(|(timestamp, temperature_c, daylight, humidity_pct, wind_speed_kmh, speed_ratio, jam_factor)| {
            TrafficObservation {
                timestamp,
                road_id: "r".into(),
                temperature_c,
                daylight,
                humidity_pct,
                wind_speed_kmh,
                speed_ratio,
                jam_factor,
            }
        })
}

fn samples(dim: usize) -> impl Strategy<Value = Vec<EncodedSample>> {
    prop::collection::vec(prop::collection::vec(-1e3..1e3f64, dim), 2..40)
        .prop_map(|rows| rows.into_iter().map(|x| EncodedSample::new(x, 0.0)).collect())
}

proptest! {
    #[test]
    fn time_of_day_on_unit_circle(t in 0i64..86_400) {
        let (s, c) = encode_time_of_day(t).unwrap();
        prop_assert!((s * s + c * c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn day_of_week_on_unit_circle(d in 0u32..7) {
        let (s, c) = encode_day_of_week(d).unwrap();
        prop_assert!((s * s + c * c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn encoded_observation_layout(o in observation()) {
        let e = encode_observation(&o).unwrap();
        prop_assert_eq!(e.dim(), FEATURE_DIM);
        prop_assert_eq!(e.target, o.jam_factor);
        prop_assert!((e.features[0].powi(2) + e.features[1].powi(2) - 1.0).abs() < 1e-9);
        prop_assert!((e.features[2].powi(2) + e.features[3].powi(2) - 1.0).abs() < 1e-9);
        prop_assert_eq!(&e.features[4..], &[
            o.temperature_c,
            if o.daylight { 1.0 } else { 0.0 },
            o.humidity_pct,
            o.wind_speed_kmh,
            o.speed_ratio,
        ][..]);
    }

    #[test]
    fn scaled_features_are_standardized(rows in samples(3)) {
        let p = fit_scaler(&rows).unwrap();
        let scaled: Vec<_> = rows.iter().map(|s| apply_scaler(&p, s).unwrap()).collect();
        let n = rows.len() as f64;
        for j in 0..3 {
            let col: Vec<f64> = scaled.iter().map(|s| s.features[j]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            // constant columns keep scale 1 and become all-zero
            let raw_const = rows.iter().all(|s| s.features[j] == rows[0].features[j]);
            if raw_const {
                prop_assert!(var < 1e-18);
            } else {
                prop_assert!((var - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inverse_transform_round_trips(rows in samples(4)) {
        let p = fit_scaler(&rows).unwrap();
        for s in &rows {
            let back = p.inverse_transform(&p.transform(&s.features).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&s.features) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }
}
