use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bamboo_garden::experiment::read_rates_csv;
use bamboo_garden::{int, rat, RateVector, Rational};
use serde_json::Value;

fn bamboo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bamboo"))
        .args(args)
        .output()
        .expect("spawn bamboo")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn q(s: &str) -> Rational {
    s.parse().unwrap_or_else(|_| panic!("not a rational: {s}"))
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn field(v: &Value, key: &str) -> Rational {
    q(v[key].as_str().unwrap())
}

#[test]
fn two_halves_one_step() {
    let out = bamboo(&["simulate", "--rates", "1/2,1/2", "--strategy", "reduce-max", "--horizon", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("backlog 1/2 (~0.500000)\n"));
}

#[test]
fn rf_x_counter_passes_29_over_14() {
    let dir = tempfile::tempdir().unwrap();
    let out = bamboo(&[
        "simulate", "--construction", "rf-x-counter", "--strategy", "reduce-fastest:1/1",
        "--horizon", "3000", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = report(dir.path());
    assert!(field(&r, "backlog") >= rat(29, 14));
    assert_eq!(r["construction"], "rf-x-counter");
    let lines = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 3000);
}

#[test]
fn deadline_driven_stays_below_two_on_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let out = bamboo(&[
        "simulate", "--construction", "uniform:100:2", "--strategy", "deadline-driven",
        "--horizon", "10000", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = report(dir.path());
    assert!(field(&r, "backlog") < int(2));
    assert_eq!(r["bound_violated"], false);
}

#[test]
fn identical_specs_write_identical_traces() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = bamboo(&[
            "simulate", "--rates", "random:12", "--seed", seed, "--strategy", "deadline-driven",
            "--variant", "unit", "--horizon", "500", "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        fs::read(dir.path().join("trace.jsonl")).unwrap()
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn rates_file_matches_inline_rates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    fs::write(&csv, "rate\n1/6\n1/2\n1/3\n").unwrap();
    let a = bamboo(&["simulate", "--rates", csv.to_str().unwrap(), "--strategy", "reduce-fastest:2", "--horizon", "50"]);
    let b = bamboo(&["simulate", "--rates", "1/6,1/2,1/3", "--strategy", "reduce-fastest:2", "--horizon", "50"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn multiprocessor_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let out = bamboo(&[
        "simulate", "--rates", "1,1/2,1/2,1/2,1/2", "--processors", "3", "--strategy", "deadline-driven",
        "--horizon", "400", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["processors"], 3);
    assert!(field(&r, "backlog") < int(3));
}

#[test]
fn simulate_input_errors() {
    for args in [
        &["simulate", "--rates", "1/2,1/2", "--strategy", "reduce-sideways"][..],
        &["simulate", "--rates", "/nonexistent/rates.csv", "--strategy", "reduce-max"],
        &["simulate", "--rates", "3/4,1/2", "--strategy", "reduce-max"],
        &["simulate", "--rates", "1/2", "--strategy", "reduce-fastest:0"],
        &["simulate", "--strategy", "reduce-max"],
    ] {
        assert_eq!(code(&bamboo(args)), 2, "{args:?}");
    }
}

fn sweep_rows(args: &[&str]) -> Vec<csv::StringRecord> {
    let out = bamboo(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(&reader.headers().unwrap()[5], "observed_backlog");
    reader.records().map(Result::unwrap).collect()
}

#[test]
fn sweep_uniform_reduce_fastest_is_tight() {
    let rows = sweep_rows(&["sweep", "--family", "uniform", "--n", "1000", "--x", "2,3,4", "--strategy", "reduce-fastest:x"]);
    assert_eq!(rows.len(), 3);
    for (row, x) in rows.iter().zip([2, 3, 4]) {
        let observed = q(&row[5]);
        assert!(observed >= int(x + 1) - rat(1, 1000) && observed < int(x + 1), "{row:?}");
        assert_eq!(q(&row[7]), int(x + 1));
        assert_eq!(&row[10], "true");
    }
}

#[test]
fn sweep_two_bamboo_deadline_driven() {
    let rows = sweep_rows(&["sweep", "--family", "two-bamboo", "--eps", "1/10,1/100", "--strategy", "deadline-driven"]);
    assert_eq!(rows.len(), 2);
    for (row, eps) in rows.iter().zip([rat(1, 10), rat(1, 100)]) {
        let observed = q(&row[5]);
        assert!(observed >= int(2) - eps * int(2) && observed < int(2), "{row:?}");
    }
}

#[test]
fn sweep_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = bamboo(&[
        "sweep", "--family", "random", "--n", "5,10", "--count", "3", "--strategy", "reduce-max,deadline-driven",
        "--horizon", "200", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);
}

#[test]
fn empty_sweep_grid_is_an_error() {
    assert_eq!(code(&bamboo(&["sweep", "--family", "uniform", "--n", "10", "--strategy", "reduce-max"])), 2);
}

#[test]
fn construct_rf1_writes_rates_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rf1.csv");
    let out = bamboo(&["construct", "rf1-fast-slow:10000", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rates = read_rates_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rates.len(), 10101);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(field(&sidecar, "predicted_backlog_lower_bound"), rat(30200, 10202));
    assert_eq!(sidecar["bamboo"], 10101);
}

#[test]
fn construct_round_trips_through_csv() {
    for name in ["two-bamboo:1/100", "uniform:7:5/2", "rf1-fast-slow:9", "rf-x-counter"] {
        let out = bamboo(&["construct", name]);
        assert_eq!(code(&out), 0);
        let parsed = read_rates_csv(out.stdout.as_slice()).unwrap();
        let built = name.parse::<bamboo_garden::constructions::ConstructionSpec>().unwrap().build().unwrap();
        assert_eq!(parsed, built.rates.in_original_order(), "{name}");
        assert_eq!(RateVector::new(parsed).unwrap(), built.rates);
    }
    let out = bamboo(&["construct", "two-bamboo:1/100"]);
    assert_eq!(stdout(&out), "rate\n99/100\n1/100\n");
}

#[test]
fn construct_rejects_bad_names() {
    for name in ["uniform:0:2", "two-bamboo", "rf1-fast-slow:-3", "spiral:4"] {
        assert_eq!(code(&bamboo(&["construct", name])), 2, "{name}");
    }
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&bamboo(&["verify", "bogus-name"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("verify.json");
    let out = bamboo(&["verify", "reduce-max", "--quick", "--inject-broken-strategy", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("FAIL C1 "));
    let results: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(results[0]["passed"], false);

    let out = bamboo(&["verify", "deadline-driven", "--quick"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("PASS C6 "));
}

#[test]
fn verify_all_quick_passes() {
    let out = bamboo(&["verify", "all", "--quick"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let passes = stdout(&out).lines().filter(|l| l.starts_with("PASS C")).count();
    assert_eq!(passes, 10);
}
