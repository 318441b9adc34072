// The full experiment: synthesize two weeks, train on the first, forecast
// the second, and compare against the baselines.

use jamcast::cli::{cmd_experiment, cmd_synth, ExperimentOptions, RoadSelection};
use jamcast::pipeline::WeekSplit;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("jamcast-week-ahead-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let data = dir.join("synthetic.csv");
    let synth = cmd_synth(None, Some(7), &data)?;
    println!("generated {} rows", synth.rows);

    let outcome = cmd_experiment(&ExperimentOptions {
        data,
        split: Some(WeekSplit::parse("2019-04-15", "2019-04-21", "2019-04-22", "2019-04-28")?),
        roads: RoadSelection::Random { count: 2 },
        seed: 7,
        grid: None,
        out: dir.join("run"),
    })?;
    for report in &outcome.reports {
        println!("{:>22}: average RMSE {:.3}", report.method_label(), report.average_rmse());
    }
    for row in &outcome.comparison {
        println!("{:>10}  proposed {:.3}  amwr {:.3}", row.road_id, row.proposed_rmse, row.baseline_rmse);
    }
    println!("artifacts listed in {}", outcome.manifest.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
