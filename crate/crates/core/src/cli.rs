//! The `synth`, `experiment` and `collect` commands.
//!
//! Exit codes: `0` success, `2` configuration or usage, `3` data, `4`
//! numeric failure.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amwr::{run_amwr, AmwrConfig};
use crate::error::Error;
use crate::evaluation::{
    build_report, compare_reports, comparison_csv, naive_baselines, report_csv, ComparisonRow, EvaluationReport,
    GLOBAL_MEAN, PERSISTENCE,
};
use crate::featureset::{TrafficObservation, SECONDS_PER_DAY};
use crate::ingestion::{
    append_csv, collect, load_csv, save_csv, synth_generate, CollectConfig, CollectSummary, MockTransport,
    SimulatedClock, SynthConfig, TrafficClient, WeatherClient, DEFAULT_START, MOCK_TRAFFIC_ENDPOINT,
    MOCK_WEATHER_ENDPOINT,
};
use crate::pipeline::{
    forecast_week, grid_search, road_ids, road_series, split_weeks, train_road_model, ForecastPoint, ForecastSeries,
    HyperparamGrid, WeekSplit,
};
use crate::plot::{comparison_chart, forecast_chart};
use crate::svr::SvrHyperparams;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

pub const PROPOSED: &str = "proposed";
pub const AMWR: &str = "amwr";

/// A failed command: exit code plus message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn in_road(mut self, road: &str) -> Self {
        self.message = format!("road `{road}`: {}", self.message);
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Validation { .. } => EXIT_USAGE,
        Error::Parse { .. } | Error::InsufficientData(_) | Error::Shape(_) | Error::Provider(_) | Error::Io(_) => {
            EXIT_DATA
        }
        Error::Convergence { .. } | Error::Domain(_) | Error::NoDominantPeriod | Error::SearchFailed(_) => {
            EXIT_NUMERIC
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Self {
            code: exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn io_failure(path: &Path, err: impl fmt::Display) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: format!("{}: {err}", path.display()),
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    fn new(command: &str, inputs: Vec<String>, seed: Option<u64>, config: impl Serialize) -> Self {
        Self {
            command: command.into(),
            inputs,
            seed,
            config: serde_json::to_value(config).expect("config serializes"),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn write(&self, path: &Path) -> CmdResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| io_failure(path, e))
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn read_text(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> CmdResult<()> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult<()> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthOutcome {
    pub rows: usize,
    pub manifest: PathBuf,
}

/// Generates a synthetic dataset from an optional TOML [`SynthConfig`].
pub fn cmd_synth(config: Option<&Path>, seed: Option<u64>, out: &Path) -> CmdResult<SynthOutcome> {
    let mut cfg = match config {
        Some(path) => toml::from_str::<SynthConfig>(&read_text(path)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        None => SynthConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let rows = synth_generate(&cfg)?;
    save_csv(&rows, out)?;
    let mut manifest = RunManifest::new(
        "synth",
        config.map(display).into_iter().collect(),
        Some(cfg.seed),
        &cfg,
    );
    manifest.outputs.push(display(out));
    let path = manifest_path(out);
    manifest.write(&path)?;
    Ok(SynthOutcome {
        rows: rows.len(),
        manifest: path,
    })
}

/// Which roads an experiment evaluates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RoadSelection {
    All,
    Named(Vec<String>),
    Random { count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub data: PathBuf,
    /// `None` uses two consecutive weeks from the dataset's first midnight.
    pub split: Option<WeekSplit>,
    pub roads: RoadSelection,
    pub seed: u64,
    pub grid: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadResult {
    pub road_id: String,
    pub hyperparams: SvrHyperparams,
    pub proposed: ForecastSeries,
    pub amwr: ForecastSeries,
    pub persistence: ForecastSeries,
    pub global_mean: ForecastSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub split: WeekSplit,
    pub roads: Vec<RoadResult>,
    pub reports: Vec<EvaluationReport>,
    pub comparison: Vec<ComparisonRow>,
    pub manifest: PathBuf,
}

/// Picks `count` roads with a seeded generator; the result is sorted.
pub fn select_random_roads(available: &[String], count: usize, seed: u64) -> CmdResult<Vec<String>> {
    if count == 0 || count > available.len() {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!("cannot pick {count} roads from {}", available.len()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<String> = available.choose_multiple(&mut rng, count).cloned().collect();
    picked.sort();
    Ok(picked)
}

/// File-name-safe form of a road id.
pub fn road_file_stem(road_id: &str) -> String {
    road_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

fn amwr_forecast(
    train: &[TrafficObservation],
    test: &[TrafficObservation],
    road: &str,
    split: &WeekSplit,
    hp: &SvrHyperparams,
) -> crate::Result<ForecastSeries> {
    let mut rows = road_series(train, road);
    rows.extend(road_series(test, road));
    let config = AmwrConfig {
        hyperparams: *hp,
        ..AmwrConfig::default()
    };
    let run = run_amwr(&rows, &config)?;
    let (lo, hi) = split.test_span();
    let points = run
        .points
        .iter()
        .filter(|p| (lo..hi).contains(&p.timestamp))
        .map(|p| ForecastPoint {
            timestamp: p.timestamp,
            predicted: p.predicted,
            actual: p.actual,
        })
        .collect();
    ForecastSeries::new(road, points)
}

fn run_road(
    train: &[TrafficObservation],
    test: &[TrafficObservation],
    road: &str,
    split: &WeekSplit,
    grid: Option<&[SvrHyperparams]>,
) -> crate::Result<(RoadResult, crate::svr::SvrModel)> {
    let hyperparams = match grid {
        Some(points) => grid_search(train, road, points)?.best,
        None => SvrHyperparams::default(),
    };
    let model = train_road_model(train, road, &hyperparams)?;
    let proposed = forecast_week(&model, road, test)?;
    let mut baselines = naive_baselines(test, train, road)?;
    let amwr = amwr_forecast(train, test, road, split, &hyperparams)?;
    if amwr.len() != proposed.len() {
        return Err(Error::InsufficientData(format!(
            "baseline covers {} of {} test rows",
            amwr.len(),
            proposed.len()
        )));
    }
    let result = RoadResult {
        road_id: road.to_string(),
        hyperparams,
        proposed,
        amwr,
        persistence: baselines.remove(PERSISTENCE).expect("persistence baseline"),
        global_mean: baselines.remove(GLOBAL_MEAN).expect("global mean baseline"),
    };
    Ok((result, model))
}

fn forecast_csv(r: &RoadResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["timestamp", "road_id", "actual", PROPOSED, AMWR, PERSISTENCE, GLOBAL_MEAN])
        .expect("in-memory write");
    for (((p, a), s), g) in r
        .proposed
        .points()
        .iter()
        .zip(r.amwr.points())
        .zip(r.persistence.points())
        .zip(r.global_mean.points())
    {
        w.write_record([
            p.timestamp.to_string(),
            r.road_id.clone(),
            p.actual.to_string(),
            p.predicted.to_string(),
            a.predicted.to_string(),
            s.predicted.to_string(),
            g.predicted.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Serialize)]
struct ExperimentConfig<'a> {
    split: &'a WeekSplit,
    roads: &'a RoadSelection,
    selected_roads: &'a [String],
    hyperparams: BTreeMap<&'a str, SvrHyperparams>,
    amwr: AmwrConfig,
}

/// Runs the full week-ahead experiment and writes every artifact under
/// `options.out`.
pub fn cmd_experiment(options: &ExperimentOptions) -> CmdResult<ExperimentOutcome> {
    let dataset = load_csv(&options.data)?;
    let split = match options.split {
        Some(s) => s,
        None => {
            let first = dataset
                .iter()
                .map(|o| o.timestamp)
                .min()
                .ok_or_else(|| Failure::from(Error::InsufficientData("dataset is empty".into())))?;
            WeekSplit::consecutive(first.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY)?
        }
    };
    let grid = match &options.grid {
        Some(path) => {
            let points = HyperparamGrid::from_toml(&read_text(path)?)?.expand();
            for hp in &points {
                hp.validate()?;
            }
            Some(points)
        }
        None => None,
    };
    let (train, test) = split_weeks(&dataset, &split)?;
    let available = road_ids(&train);
    let roads = match &options.roads {
        RoadSelection::All => available.clone(),
        RoadSelection::Named(names) => {
            let mut names = names.clone();
            names.sort();
            names.dedup();
            if let Some(missing) = names.iter().find(|n| !available.contains(n)) {
                return Err(Failure {
                    code: EXIT_DATA,
                    message: format!("road `{missing}` has no training rows"),
                });
            }
            names
        }
        RoadSelection::Random { count } => select_random_roads(&available, *count, options.seed)?,
    };
    if roads.is_empty() {
        return Err(Failure {
            code: EXIT_DATA,
            message: "no roads to evaluate".into(),
        });
    }
    let mut stems: BTreeMap<String, &str> = BTreeMap::new();
    for road in &roads {
        if let Some(other) = stems.insert(road_file_stem(road), road) {
            return Err(Failure::usage(format!("roads `{other}` and `{road}` map to the same file name")));
        }
    }
    log::info!("evaluating {} road(s): {}", roads.len(), roads.join(", "));

    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = roads
            .iter()
            .map(|road| {
                let (train, test, split, grid) = (&train, &test, &split, grid.as_deref());
                scope.spawn(move || run_road(train, test, road, split, grid))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("road worker panicked"))
            .collect()
    });
    let mut per_road = Vec::with_capacity(roads.len());
    let mut models = Vec::with_capacity(roads.len());
    for (road, result) in roads.iter().zip(results) {
        let (r, m) = result.map_err(|e| Failure::from(e).in_road(road))?;
        per_road.push(r);
        models.push(m);
    }

    let report = |label: &str, pick: fn(&RoadResult) -> &ForecastSeries| {
        build_report(&per_road.iter().map(|r| pick(r).clone()).collect::<Vec<_>>(), label)
    };
    let reports = vec![
        report(PROPOSED, |r| &r.proposed)?,
        report(AMWR, |r| &r.amwr)?,
        report(PERSISTENCE, |r| &r.persistence)?,
        report(GLOBAL_MEAN, |r| &r.global_mean)?,
    ];
    let comparison = compare_reports(&reports[0], &reports[1])?;

    let out = &options.out;
    for sub in ["models", "forecasts", "plots"] {
        ensure_dir(&out.join(sub))?;
    }
    let mut outputs = Vec::new();
    let mut emit = |rel: String, contents: &[u8]| -> CmdResult<()> {
        write_file(&out.join(&rel), contents)?;
        outputs.push(rel);
        Ok(())
    };
    for (r, model) in per_road.iter().zip(&models) {
        let stem = road_file_stem(&r.road_id);
        emit(format!("models/{stem}.svr"), model.to_text().as_bytes())?;
        emit(format!("forecasts/{stem}.csv"), forecast_csv(r).as_bytes())?;
        emit(format!("plots/{stem}.svg"), forecast_chart(&r.proposed).as_bytes())?;
    }
    emit("plots/comparison.svg".into(), comparison_chart(&comparison, PROPOSED, AMWR).as_bytes())?;
    emit("report.csv".into(), report_csv(&reports).as_bytes())?;
    emit("comparison.csv".into(), comparison_csv(&comparison).as_bytes())?;

    let config = ExperimentConfig {
        split: &split,
        roads: &options.roads,
        selected_roads: &roads,
        hyperparams: per_road.iter().map(|r| (r.road_id.as_str(), r.hyperparams)).collect(),
        amwr: AmwrConfig::default(),
    };
    let mut inputs = vec![display(&options.data)];
    inputs.extend(options.grid.as_deref().map(display));
    let mut manifest = RunManifest::new("experiment", inputs, Some(options.seed), config);
    manifest.outputs = outputs;
    let manifest_file = out.join("manifest.json");
    manifest.write(&manifest_file)?;

    Ok(ExperimentOutcome {
        split,
        roads: per_road,
        reports,
        comparison,
        manifest: manifest_file,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectOptions {
    pub config: Option<PathBuf>,
    pub duration: Duration,
    pub out: PathBuf,
    /// Serve synthetic payloads in-process and run on a simulated clock.
    pub mock_provider: bool,
    /// Overrides `poll_interval_secs`.
    pub interval: Option<Duration>,
    /// Simulated start time for mock runs.
    pub start: Option<i64>,
}

/// Polls the providers and appends rows to `options.out`.
pub fn cmd_collect(options: &CollectOptions) -> CmdResult<CollectSummary> {
    let mut cfg = match &options.config {
        Some(path) => CollectConfig::from_toml(&read_text(path)?)?,
        None => CollectConfig::default(),
    };
    if let Some(interval) = options.interval {
        cfg.poll_interval_secs = interval.as_secs() as i64;
    }
    cfg.validate()?;
    let duration = options.duration.as_secs() as i64;

    let mut rows_written = 0usize;
    let out = options.out.as_path();
    let sink = |rows: &[TrafficObservation]| {
        rows_written += rows.len();
        append_csv(rows, out)
    };
    let summary = if options.mock_provider {
        cfg.traffic_endpoint = MOCK_TRAFFIC_ENDPOINT.into();
        cfg.weather_endpoint = MOCK_WEATHER_ENDPOINT.into();
        let transport = MockTransport::synthetic(SynthConfig::default());
        let traffic = TrafficClient::new(&transport, MOCK_TRAFFIC_ENDPOINT, None);
        let weather = WeatherClient::new(&transport, MOCK_WEATHER_ENDPOINT, None);
        let mut clock = SimulatedClock::starting_at(options.start.unwrap_or(DEFAULT_START));
        collect(&traffic, &weather, &cfg.bbox, &mut clock, cfg.poll_interval_secs, duration, sink)?
    } else {
        live_collect(&cfg, duration, sink)?
    };
    // An empty run still leaves a valid, header-only file.
    append_csv(&[], out)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        collect: &'a CollectConfig,
        duration_secs: i64,
        mock_provider: bool,
        start: Option<i64>,
    }
    let mut manifest = RunManifest::new(
        "collect",
        options.config.as_deref().map(display).into_iter().collect(),
        None,
        Resolved {
            collect: &cfg,
            duration_secs: duration,
            mock_provider: options.mock_provider,
            start: options.start,
        },
    );
    manifest.outputs.push(display(out));
    manifest.write(&manifest_path(out))?;

    if summary.cycles > 0 && summary.succeeded == 0 {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!("all {} poll cycles failed", summary.cycles),
        });
    }
    Ok(summary)
}

#[cfg(feature = "http")]
fn live_collect(
    cfg: &CollectConfig,
    duration: i64,
    sink: impl FnMut(&[TrafficObservation]) -> crate::Result<()>,
) -> CmdResult<CollectSummary> {
    use crate::ingestion::{HttpTransport, SystemClock};
    let key = cfg.api_key()?;
    let transport = HttpTransport::new(Duration::from_secs(30));
    let traffic = TrafficClient::new(&transport, cfg.traffic_endpoint.clone(), key.clone());
    let weather = WeatherClient::new(&transport, cfg.weather_endpoint.clone(), key);
    Ok(collect(&traffic, &weather, &cfg.bbox, &mut SystemClock, cfg.poll_interval_secs, duration, sink)?)
}

#[cfg(not(feature = "http"))]
fn live_collect(
    _cfg: &CollectConfig,
    _duration: i64,
    _sink: impl FnMut(&[TrafficObservation]) -> crate::Result<()>,
) -> CmdResult<CollectSummary> {
    Err(Failure::usage("built without the `http` feature; use --mock-provider"))
}

/// Week-ahead traffic congestion forecasting.
#[derive(Debug, Parser)]
#[command(name = "jamcast", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Train, forecast and evaluate against the baselines.
    Experiment(ExperimentArgs),
    /// Poll the traffic and weather providers into a CSV file.
    Collect(CollectArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML generator settings; defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, requires_all = ["train_end", "test_start", "test_end"])]
    pub train_start: Option<String>,
    #[arg(long, requires = "train_start")]
    pub train_end: Option<String>,
    #[arg(long, requires = "train_start")]
    pub test_start: Option<String>,
    #[arg(long, requires = "train_start")]
    pub test_end: Option<String>,
    /// Comma-separated road ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    pub roads: Option<Vec<String>>,
    /// Evaluate this many randomly chosen roads.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML hyperparameter grid.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CollectArgs {
    /// TOML collection settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// How long to poll, e.g. `15min` or `2h`.
    #[arg(long, value_parser = humantime::parse_duration)]
    pub duration: Duration,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub mock_provider: bool,
    /// Poll interval override, e.g. `60s`.
    #[arg(long, value_parser = humantime::parse_duration)]
    pub interval: Option<Duration>,
    /// Simulated start time (epoch seconds) for mock runs.
    #[arg(long, requires = "mock_provider")]
    pub start: Option<i64>,
}

impl ExperimentArgs {
    pub fn options(&self) -> CmdResult<ExperimentOptions> {
        let split = match (&self.train_start, &self.train_end, &self.test_start, &self.test_end) {
            (Some(a), Some(b), Some(c), Some(d)) => Some(WeekSplit::parse(a, b, c, d)?),
            _ => None,
        };
        let roads = match (&self.roads, self.random) {
            (Some(names), _) => RoadSelection::Named(names.clone()),
            (None, Some(count)) => RoadSelection::Random { count },
            (None, None) => RoadSelection::All,
        };
        Ok(ExperimentOptions {
            data: self.data.clone(),
            split,
            roads,
            seed: self.seed,
            grid: self.grid.clone(),
            out: self.out.clone(),
        })
    }
}

/// Runs a parsed command, printing a summary to stdout.
pub fn run(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Synth(a) => {
            let outcome = cmd_synth(a.config.as_deref(), a.seed, &a.out)?;
            println!("wrote {} rows to {}", outcome.rows, a.out.display());
        }
        Command::Experiment(a) => {
            let outcome = cmd_experiment(&a.options()?)?;
            println!("{:<16} {:>12} {:>12}", "road", PROPOSED, AMWR);
            for row in &outcome.comparison {
                println!("{:<16} {:>12.3} {:>12.3}", row.road_id, row.proposed_rmse, row.baseline_rmse);
            }
            println!("outputs in {}", a.out.display());
        }
        Command::Collect(a) => {
            let summary = cmd_collect(&CollectOptions {
                config: a.config,
                duration: a.duration,
                out: a.out.clone(),
                mock_provider: a.mock_provider,
                interval: a.interval,
                start: a.start,
            })?;
            println!(
                "{} of {} cycles succeeded, {} rows appended to {}",
                summary.succeeded,
                summary.cycles,
                summary.rows,
                a.out.display()
            );
        }
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::InsufficientData("x".into())), EXIT_DATA);
        assert_eq!(
            exit_code(&Error::Convergence {
                iterations: 1,
                violation: 1.0
            }),
            EXIT_NUMERIC
        );
    }

    #[test]
    fn random_selection_is_seeded_and_sorted() {
        let roads: Vec<String> = (0..10).map(|i| format!("r{i}")).collect();
        let a = select_random_roads(&roads, 4, 7).unwrap();
        assert_eq!(a, select_random_roads(&roads, 4, 7).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a.len(), 4);
        assert!(select_random_roads(&roads, 11, 7).is_err());
    }

    #[test]
    fn file_stems() {
        assert_eq!(road_file_stem("A->B 1"), "A-_B_1");
        assert_eq!(road_file_stem("road-01"), "road-01");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with_args(["jamcast", "bogus"]), EXIT_USAGE);
        assert_eq!(main_with_args(["jamcast", "collect", "--duration", "soon", "--out", "x"]), EXIT_USAGE);
    }
}
