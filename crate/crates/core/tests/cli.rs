use std::process::{Command, Output};

use lattice_hardy::lattice::random_lattice_function;
use lattice_hardy::{LatticeFunction, MultiIndex};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-hardy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["verify-torus", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_and_domain_errors_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["estimate", "--dim", "1", "--kind", "hardy"]).status.code(), Some(1));
    let o = run(&["constants", "--table", "hardy", "--dims", "2..4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d > -2k+2"));
    assert_eq!(run(&["verify-torus", "--theorem", "rellich", "--dim", "4"]).status.code(), Some(1));
    assert_eq!(run(&["bounds", "--kind", "rellich", "--order", "0", "--dims", "5"]).status.code(), Some(1));
    let budget = Command::new(env!("CARGO_BIN_EXE_lattice-hardy"))
        .args(["estimate", "--dim", "6", "--radius", "6", "--kind", "hardy"])
        .env("LATTICE_HARDY_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(1));
}

#[test]
fn constants_csv_table() {
    let o = run(&["constants", "--table", "hardy", "--dims", "3..10", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,k,d,value");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1], "H,0,3,0.05454545454545454");
    let value: f64 = lines[8].rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(value, 5.0 / 3.0);
}

#[test]
fn negative_weight_exponent_parses() {
    let o = run(&["constants", "--table", "hr", "--dims", "14", "--k", "-1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("HR,-1,14,"));
}

#[test]
fn estimate_hand_case_json() {
    let o = run(&["estimate", "--dim", "1", "--order", "0", "--kind", "hardy", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"value\": 2.0"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["value"].as_f64(), Some(2.0));
    assert_eq!(v["test_quotient"].as_f64(), Some(2.0));
}

#[test]
fn json_numbers_round_trip_bit_exactly() {
    let o = run(&["estimate", "--dim", "3", "--radius", "2", "--kind", "hardy"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["value", "residual", "quotient_check", "lower", "upper"] {
        let x = v[key].as_f64().unwrap();
        let again: f64 = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(x.to_bits(), again.to_bits(), "{key}");
    }
    let lower = v["lower"].as_f64().unwrap();
    assert_eq!(lower, 12.0 / 55.0);
    assert!(lower <= v["value"].as_f64().unwrap());
}

#[test]
fn correspondence_batch_reports() {
    let args = ["verify-correspondence", "--dim", "3", "--k", "1", "--kind", "hardy", "--batch", "20", "--seed", "7"];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 20);
    for (i, r) in reports.iter().enumerate() {
        assert_eq!(r["seed"].as_u64(), Some(7 + i as u64));
        for id in ["weighted_norm", "energy"] {
            assert!(r[id]["rel_err"].as_f64().unwrap() < 1e-10);
        }
    }
    // same seed, same bytes
    assert_eq!(run(&args).stdout, o.stdout);
}

#[test]
fn correspondence_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    let u = random_lattice_function(2, 2, 3, true);
    u.write_text(std::fs::File::create(&path).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["verify-correspondence", "--kind", "rellich", "--k", "2", "--input", p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);

    let origin = LatticeFunction::delta(MultiIndex::origin(2));
    origin.write_text(std::fs::File::create(&path).unwrap()).unwrap();
    let o = run(&["verify-correspondence", "--kind", "hardy", "--input", p]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_torus_prints_seeds() {
    let o = run(&["verify-torus", "--theorem", "hardy", "--dim", "3", "--batch", "4", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let seeds: Vec<u64> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, vec![11, 12, 13, 14]);
    let csv = run(&["verify-torus", "--theorem", "square-expansion", "--dim", "6", "--batch", "2", "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    assert!(stdout(&csv).starts_with("seed,"));
}

#[test]
fn sweep_with_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.json");
    let o = run(&[
        "sweep", "--dims", "3..5", "--radius", "2", "--kind", "hardy", "--fit", "--threads", "1",
        "--plot-data", plot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["rows"].as_array().unwrap().len(), 3);
    assert!(out["fit"]["slope"].as_f64().unwrap() > 0.0);
    let p: Value = serde_json::from_str(&std::fs::read_to_string(&plot).unwrap()).unwrap();
    let series = p["series"].as_array().unwrap();
    assert_eq!(series.len(), 3);
    assert!(series.iter().all(|s| s["points"].as_array().unwrap().len() == 3));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let o = run(&["bounds", "--kind", "hardy", "--dims", "10", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), 20.0 / 3.0);
    assert_eq!(row[4], "40.0");
}
