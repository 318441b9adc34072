// Poll an in-process mock provider on a simulated clock.

use jamcast::ingestion::{
    collect, BoundingBox, MockTransport, SimulatedClock, SynthConfig, TrafficClient, WeatherClient,
    MOCK_TRAFFIC_ENDPOINT, MOCK_WEATHER_ENDPOINT,
};
use jamcast::Error;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let transport = MockTransport::synthetic(SynthConfig::default());
    let traffic = TrafficClient::new(&transport, MOCK_TRAFFIC_ENDPOINT, None);
    let weather = WeatherClient::new(&transport, MOCK_WEATHER_ENDPOINT, None);
    let mut clock = SimulatedClock::starting_at(1_555_315_200); // Monday 08:00 UTC
    let mut rows = Vec::new();
    let summary = collect(&traffic, &weather, &BoundingBox::default(), &mut clock, 300, 15 * 60, |batch| {
        rows.extend_from_slice(batch);
        Ok(())
    })?;
    println!("{} cycles, {} rows", summary.cycles, summary.rows);
    for o in rows.iter().take(4) {
        println!("  {} {} jam {:.2} ratio {:.2}", o.timestamp, o.road_id, o.jam_factor, o.speed_ratio);
    }
    println!("first request: {}", transport.requests()[0]);

    // a provider that fails the second cycle
    let flaky = MockTransport::new().route("mock://flaky", |url| {
        if url.ends_with("at=1555315500") {
            Err(Error::Provider("503 service unavailable".into()))
        } else {
            Ok(br#"{"roads":[{"road_id":"A->B","jam_factor":3.0,"current_speed":40,"freeflow_speed":50}]}"#.to_vec())
        }
    });
    let traffic = TrafficClient::new(flaky, "mock://flaky", None);
    let mut clock = SimulatedClock::starting_at(1_555_315_200);
    let summary = collect(&traffic, &weather, &BoundingBox::default(), &mut clock, 300, 15 * 60, |_| Ok(()))?;
    println!("flaky provider: {} ok, {} skipped", summary.succeeded, summary.skipped);
    for (at, reason) in &summary.failures {
        println!("  {at}: {reason}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
