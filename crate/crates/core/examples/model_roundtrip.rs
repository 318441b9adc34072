// Train one road's model, save it and the data, load both back and check
// the predictions are bit-for-bit identical.

use jamcast::ingestion::{load_csv, save_csv, synth_generate, SynthConfig};
use jamcast::pipeline::{forecast_week, train_road_model};
use jamcast::svr::{SvrHyperparams, SvrModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("jamcast-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let rows = synth_generate(&SynthConfig {
        roads: 1,
        days: 2,
        ..SynthConfig::default()
    })?;
    let csv_path = dir.join("rows.csv");
    save_csv(&rows, &csv_path)?;
    let reloaded = load_csv(&csv_path)?;
    assert_eq!(reloaded, rows);

    let model = train_road_model(&reloaded, "road-01", &SvrHyperparams::default())?;
    let model_path = dir.join("road-01.svr");
    model.save(&model_path)?;
    let loaded = SvrModel::load(&model_path)?;
    println!("{}", model.to_text().lines().take(8).collect::<Vec<_>>().join("\n"));

    let a = forecast_week(&model, "road-01", &rows)?;
    let b = forecast_week(&loaded, "road-01", &rows)?;
    let identical = a
        .points()
        .iter()
        .zip(b.points())
        .all(|(p, q)| p.predicted.to_bits() == q.predicted.to_bits());
    println!("{} predictions, bitwise identical after reload: {identical}", a.len());
    assert!(identical);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
