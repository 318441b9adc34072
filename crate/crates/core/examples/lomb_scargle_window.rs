// Find the daily cycle with a Lomb-Scargle periodogram and drive the
// prediction-window controller.

use jamcast::amwr::{adapt_prediction_window, dominant_period, frequency_grid, lomb_scargle, WindowController};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // three days at 5-minute cadence with a few dropped samples
    let times: Vec<f64> = (0..3 * 288).filter(|k| k % 97 != 0).map(|k| k as f64 * 300.0).collect();
    let values: Vec<f64> = times
        .iter()
        .map(|t| 4.0 + 3.0 * (std::f64::consts::TAU * t / 86_400.0).sin())
        .collect();
    let grid = frequency_grid(&times, 1000)?;
    let pg = lomb_scargle(&times, &values, &grid)?;
    let period = dominant_period(&pg)?;
    println!("dominant period: {:.0} s ({:.2} h)", period, period / 3600.0);

    let mut ctrl = WindowController {
        training_window: period.round() as i64,
        ..WindowController::default()
    };
    for accuracy in [0.97, 0.99, 0.90, 0.60, 0.96] {
        ctrl = adapt_prediction_window(&ctrl, accuracy)?;
        println!("accuracy {accuracy:.2} -> prediction window {} s", ctrl.prediction_window);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
