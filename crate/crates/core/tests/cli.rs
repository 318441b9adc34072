use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_jamcast");

fn jamcast(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn synth_reports_rows_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = jamcast(&["synth", "--out", "a.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("16128 rows"));
    jamcast(&["synth", "--out", "b.csv"], dir.path());
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert!(dir.path().join("a.manifest.json").exists());

    std::fs::write(dir.path().join("bad.toml"), "roads = 0\n").unwrap();
    assert_eq!(code(&jamcast(&["synth", "--config", "bad.toml", "--out", "c.csv"], dir.path())), 2);
    std::fs::write(dir.path().join("worse.toml"), "roads = \"many\"\n").unwrap();
    assert_eq!(code(&jamcast(&["synth", "--config", "worse.toml", "--out", "c.csv"], dir.path())), 2);
    assert_eq!(code(&jamcast(&["synth"], dir.path())), 2);
}

#[test]
fn experiment_output_contract() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&jamcast(&["synth", "--out", "data.csv"], p)), 0);
    let args = |out: &str| {
        vec![
            "experiment", "--data", "data.csv", "--train-start", "2019-04-15", "--train-end", "2019-04-21",
            "--test-start", "2019-04-22", "--test-end", "2019-04-28", "--random", "4", "--seed", "7", "--out",
        ]
        .into_iter()
        .chain([out])
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let run = |out: &str| {
        let a = args(out);
        jamcast(&a.iter().map(String::as_str).collect::<Vec<_>>(), p)
    };
    let first = run("run1");
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));

    let run1 = p.join("run1");
    for f in ["report.csv", "comparison.csv", "manifest.json", "plots/comparison.svg"] {
        assert!(run1.join(f).exists(), "missing {f}");
    }
    let count = |sub: &str, ext: &str| {
        std::fs::read_dir(run1.join(sub))
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == ext))
            .count()
    };
    assert_eq!(count("plots", "svg"), 5);
    assert_eq!(count("models", "svr"), 4);

    // report average equals the mean of its road rows
    let mut reader = csv::Reader::from_path(run1.join("report.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["road_id", "method", "rmse"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    for method in ["proposed", "amwr", "persistence_last_week", "global_mean"] {
        let mine: Vec<_> = rows.iter().filter(|r| &r[1] == method).collect();
        let (avg, roads): (Vec<_>, Vec<_>) = mine.into_iter().partition(|r| &r[0] == "average");
        let values: Vec<f64> = roads.iter().map(|r| r[2].parse().unwrap()).collect();
        assert_eq!(values.len(), 4);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert_eq!(avg[0][2].parse::<f64>().unwrap(), mean, "{method}");
    }

    // same seed, same selection, same bytes
    assert_eq!(code(&run("run2")), 0);
    let files = |root: &Path| {
        let mut v: Vec<_> = walk(root).into_iter().map(|f| f.strip_prefix(root).unwrap().to_path_buf()).collect();
        v.sort();
        v
    };
    let (a, b) = (files(&run1), files(&p.join("run2")));
    assert_eq!(a, b);
    for f in &a {
        assert_eq!(std::fs::read(run1.join(f)).unwrap(), std::fs::read(p.join("run2").join(f)).unwrap(), "{f:?}");
    }
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

#[test]
fn experiment_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("one.toml"), "days = 7\nroads = 1\n").unwrap();
    assert_eq!(code(&jamcast(&["synth", "--config", "one.toml", "--out", "week.csv"], p)), 0);
    // only one week of data: no test rows
    assert_eq!(code(&jamcast(&["experiment", "--data", "week.csv", "--out", "o"], p)), 3);
    assert_eq!(code(&jamcast(&["experiment", "--data", "missing.csv", "--out", "o"], p)), 3);

    std::fs::write(p.join("two.toml"), "roads = 1\n").unwrap();
    assert_eq!(code(&jamcast(&["synth", "--config", "two.toml", "--out", "two.csv"], p)), 0);
    let bad_dates = ["experiment", "--data", "two.csv", "--train-start", "2019-04-15", "--train-end", "2019-04-20",
        "--test-start", "2019-04-22", "--test-end", "2019-04-28", "--out", "o"];
    assert_eq!(code(&jamcast(&bad_dates, p)), 2);
    assert_eq!(code(&jamcast(&["experiment", "--data", "two.csv", "--roads", "nowhere", "--out", "o"], p)), 3);

    // a grid that cannot converge is a numeric failure naming the road
    std::fs::write(p.join("grid.toml"), "c = [10.0]\nepsilon = [0.1]\ngamma = [0.1]\ntol = 1e-12\nmax_passes = 1\n").unwrap();
    let out = jamcast(&["experiment", "--data", "two.csv", "--grid", "grid.toml", "--out", "o"], p);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("road-01"));
}

#[test]
fn collect_with_mock_provider() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let lines = |f: &str| std::fs::read_to_string(p.join(f)).unwrap().lines().count();

    let out = jamcast(&["collect", "--mock-provider", "--duration", "15min", "--out", "a.csv"], p);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("3 of 3 cycles"));
    assert_eq!(lines("a.csv"), 1 + 3 * 4);

    let out = jamcast(&["collect", "--mock-provider", "--duration", "15min", "--interval", "60s", "--out", "b.csv"], p);
    assert!(stdout(&out).contains("15 of 15 cycles"));
    assert_eq!(lines("b.csv"), 1 + 15 * 4);

    let out = jamcast(&["collect", "--mock-provider", "--duration", "0s", "--out", "c.csv"], p);
    assert_eq!(code(&out), 0);
    assert_eq!(lines("c.csv"), 1);

    // appending keeps a single header
    jamcast(&["collect", "--mock-provider", "--duration", "5min", "--start", "1555290000", "--out", "a.csv"], p);
    assert_eq!(lines("a.csv"), 1 + 4 * 4);
    assert_eq!(jamcast::ingestion::load_csv(p.join("a.csv")).unwrap().len(), 16);

    std::fs::write(p.join("bad.toml"), "poll_interval_secs = -5\n").unwrap();
    assert_eq!(code(&jamcast(&["collect", "--config", "bad.toml", "--mock-provider", "--duration", "5min", "--out", "d.csv"], p)), 2);
}

#[test]
fn collect_from_unreachable_provider_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("live.toml"),
        "poll_interval_secs = 1\ntraffic_endpoint = \"http://127.0.0.1:9/t\"\nweather_endpoint = \"http://127.0.0.1:9/w\"\n",
    )
    .unwrap();
    let out = jamcast(&["collect", "--config", "live.toml", "--duration", "2s", "--out", "l.csv"], p);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}
