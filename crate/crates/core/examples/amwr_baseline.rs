// Run the adaptive moving-window baseline over one synthetic road.

use jamcast::amwr::{run_amwr, AmwrConfig};
use jamcast::evaluation::{rmse, EvaluationSeries};
use jamcast::ingestion::{synth_generate, SynthConfig};
use jamcast::pipeline::road_series;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth_generate(&SynthConfig {
        roads: 1,
        days: 5,
        ..SynthConfig::default()
    })?;
    let series = road_series(&data, "road-01");
    let run = run_amwr(&series, &AmwrConfig::default())?;

    println!(
        "training window {} s{}",
        run.training_window,
        if run.fallback_window { " (fallback)" } else { "" }
    );
    println!("{} rolling steps, {} forecasts", run.steps.len(), run.points.len());
    for step in run.steps.iter().step_by(run.steps.len().div_ceil(8)) {
        println!(
            "  span {}  window {:>6} s  rows {:>3}  accuracy {:.3}",
            step.span_start, step.prediction_window, step.forecast_rows, step.accuracy
        );
    }
    let eval = EvaluationSeries::new(
        run.points.iter().map(|p| p.actual).collect(),
        run.points.iter().map(|p| p.predicted).collect(),
    )?;
    println!("RMSE {:.3}", rmse(&eval));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
