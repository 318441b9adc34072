// Choose hyperparameters on the last training day.

use jamcast::ingestion::{synth_generate, SynthConfig};
use jamcast::pipeline::{grid_search, HyperparamGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let train = synth_generate(&SynthConfig {
        roads: 1,
        days: 7,
        ..SynthConfig::default()
    })?;
    let grid = HyperparamGrid::from_toml(
        r#"
        c = [1.0, 10.0]
        epsilon = [0.1]
        gamma = [0.05, 0.5]
        "#,
    )?;
    let result = grid_search(&train, "road-01", &grid.expand())?;
    for (hp, score) in &result.scores {
        match score {
            Some(r) => println!("C={:<5} gamma={:<5} validation RMSE {r:.4}", hp.c, hp.gamma),
            None => println!("C={:<5} gamma={:<5} failed", hp.c, hp.gamma),
        }
    }
    println!("best: C={} gamma={} ({:.4})", result.best.c, result.best.gamma, result.best_rmse);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
