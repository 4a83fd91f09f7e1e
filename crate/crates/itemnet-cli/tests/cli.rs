//! End-to-end tests of the `itemnet` binary: every subcommand is exercised
//! through a real process, checking outputs, exit codes, and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_itemnet");

/// Fresh scratch directory for one test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("itemnet-cli-test").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Deterministic 0/1 CSV with no header.
fn write_csv(path: &Path, n: usize, p: usize) {
    let mut text = String::new();
    for r in 0..n {
        let row: Vec<String> = (0..p)
            // A fixed pattern with some pairwise structure and both values
            // in every column.
            .map(|j| (((r * (j + 2) + r / 3 + j) % 3 != 0) as u8).to_string())
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn fit_toy_dataset_reports_coordinate_count() {
    let dir = scratch("fit-toy");
    let input = dir.join("toy.csv");
    fs::write(&input, "1,0,1\n0,1,0\n").unwrap();
    let out_dir = dir.join("fit");
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
        "--seed",
        "3",
        "--iterations",
        "80",
        "--burn-in",
        "20",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("n=2 p=3 q=6"));
    for file in [
        "manifest.json",
        "chain.jsonl",
        "estimate.json",
        "edges.csv",
        "mcse.json",
    ] {
        assert!(out_dir.join(file).is_file(), "{file} missing");
    }

    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["command"], "fit");
    assert_eq!(manifest["q"], 6);
    assert_eq!(manifest["seed"], 3);

    // Three items give three pair rows plus the header.
    let edges = fs::read_to_string(out_dir.join("edges.csv")).unwrap();
    assert_eq!(edges.lines().count(), 4);
    assert!(edges.starts_with("item_a,item_b,weight,pip,sign"));
}

#[test]
fn fit_seven_items_records_28_coordinates_and_reruns_identically() {
    let dir = scratch("fit-seven");
    let input = dir.join("data.csv");
    write_csv(&input, 40, 7);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.join(name);
        let out = run(&[
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--output",
            out_dir.to_str().unwrap(),
            "--seed",
            "11",
            "--iterations",
            "120",
            "--burn-in",
            "40",
            "--aux-sweeps",
            "5",
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        outputs.push(out_dir);
    }
    let manifest = json(&outputs[0].join("manifest.json"));
    assert_eq!(manifest["p"], 7);
    assert_eq!(manifest["q"], 28);

    // Same seed, same data: the estimate and the stored chain must match
    // byte for byte.
    for file in ["estimate.json", "chain.jsonl", "edges.csv"] {
        let a = fs::read(outputs[0].join(file)).unwrap();
        let b = fs::read(outputs[1].join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
}

#[test]
fn fit_locates_bad_cells() {
    let dir = scratch("fit-bad-cell");
    let input = dir.join("bad.csv");
    fs::write(&input, "a,b,c\n1,0,1\n0,2,0\n").unwrap();
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("row 3"), "stderr: {err}");
    assert!(err.contains("column 2"), "stderr: {err}");
}

#[test]
fn fit_rejects_ragged_rows() {
    let dir = scratch("fit-ragged");
    let input = dir.join("ragged.csv");
    fs::write(&input, "1,0,1\n0,1\n").unwrap();
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn simulate_default_design_shape() {
    let dir = scratch("simulate-default");
    let out_dir = dir.join("sim");
    let out = run(&[
        "simulate",
        "--output",
        out_dir.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let data = fs::read_to_string(out_dir.join("data_1.csv")).unwrap();
    let lines: Vec<&str> = data.lines().collect();
    assert_eq!(lines.len(), 301, "300 respondents plus a header");
    assert_eq!(lines[0].split(',').count(), 24);
    assert!(lines[0].starts_with("item1,item2,"));

    let truth = json(&out_dir.join("truth_1.json"));
    assert_eq!(truth["group_of"].as_array().unwrap().len(), 24);
    assert_eq!(truth["class_of"].as_array().unwrap().len(), 300);
}

#[test]
fn simulate_replicates_are_distinct_with_recorded_seeds() {
    let dir = scratch("simulate-replicates");
    let out_dir = dir.join("sim");
    let out = run(&[
        "simulate",
        "--output",
        out_dir.to_str().unwrap(),
        "--seed",
        "5",
        "--replicates",
        "3",
        "--n",
        "30",
        "--items",
        "6",
        "--groups",
        "3",
        "--classes",
        "2",
        "--inside-groups",
        "[[0],[1,2]]",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let mut datasets = Vec::new();
    for rep in 1..=3 {
        datasets.push(fs::read(out_dir.join(format!("data_{rep}.csv"))).unwrap());
        assert!(out_dir.join(format!("truth_{rep}.json")).is_file());
    }
    assert_ne!(datasets[0], datasets[1]);
    assert_ne!(datasets[1], datasets[2]);
    assert_ne!(datasets[0], datasets[2]);

    let manifest = json(&out_dir.join("manifest.json"));
    let seeds: Vec<u64> = manifest["config"]["replicate_seeds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(seeds.len(), 3);
    assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2] && seeds[0] != seeds[2]);
}

#[test]
fn simulate_rejects_status_noise_above_signal() {
    let dir = scratch("simulate-bad");
    let out = run(&[
        "simulate",
        "--output",
        dir.join("sim").to_str().unwrap(),
        "--p21",
        "0.9",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("p21"), "stderr: {}", stderr(&out));
}

#[test]
fn ppp_posterior_route_from_fit_output() {
    let dir = scratch("ppp-posterior");
    let input = dir.join("data.csv");
    write_csv(&input, 30, 4);
    let fit_dir = dir.join("fit");
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--output",
        fit_dir.to_str().unwrap(),
        "--seed",
        "2",
        "--iterations",
        "150",
        "--burn-in",
        "50",
        "--aux-sweeps",
        "4",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let ppp_dir = dir.join("ppp");
    let out = run(&[
        "ppp",
        "--input",
        input.to_str().unwrap(),
        "--chain",
        fit_dir.to_str().unwrap(),
        "--output",
        ppp_dir.to_str().unwrap(),
        "--seed",
        "8",
        "--num-draws",
        "60",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let report = json(&ppp_dir.join("pvalues.json"));
    assert_eq!(report["route"], "posterior");
    let pvalues = report["pvalues"].as_array().unwrap();
    assert_eq!(pvalues.len(), 10, "q = 4 + 6 statistics");
    for v in pvalues {
        let v = v.as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
    // Header plus one row per statistic.
    let csv = fs::read_to_string(ppp_dir.join("pvalues.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn ppp_point_route_needs_no_chain() {
    let dir = scratch("ppp-point");
    let input = dir.join("data.csv");
    write_csv(&input, 30, 4);
    let ppp_dir = dir.join("ppp");
    let out = run(&[
        "ppp",
        "--input",
        input.to_str().unwrap(),
        "--elasso",
        "--output",
        ppp_dir.to_str().unwrap(),
        "--seed",
        "8",
        "--num-draws",
        "60",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json(&ppp_dir.join("pvalues.json"));
    assert_eq!(report["route"], "point");
    assert!(report["rmse_to_half"].as_f64().unwrap().is_finite());
}

#[test]
fn ppp_requires_a_route_and_rejects_mismatched_chain() {
    let dir = scratch("ppp-errors");
    let input = dir.join("data.csv");
    write_csv(&input, 20, 4);
    let out = run(&[
        "ppp",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--chain"), "stderr: {}", stderr(&out));

    // A chain fitted to 3 items must be rejected against 4-item data.
    let toy = dir.join("toy.csv");
    fs::write(&toy, "1,0,1\n0,1,0\n1,1,0\n").unwrap();
    let fit_dir = dir.join("fit3");
    let out = run(&[
        "fit",
        "--input",
        toy.to_str().unwrap(),
        "--output",
        fit_dir.to_str().unwrap(),
        "--iterations",
        "60",
        "--burn-in",
        "20",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let out = run(&[
        "ppp",
        "--input",
        input.to_str().unwrap(),
        "--chain",
        fit_dir.to_str().unwrap(),
        "--output",
        dir.join("out2").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("3 items"), "stderr: {}", stderr(&out));
}

#[test]
fn compare_design_mode_emits_table_rows() {
    let dir = scratch("compare");
    let out_dir = dir.join("cmp");
    let out = run(&[
        "compare",
        "--output",
        out_dir.to_str().unwrap(),
        "--seed",
        "4",
        "--replicates",
        "1",
        "--n",
        "60",
        "--items",
        "6",
        "--groups",
        "3",
        "--classes",
        "2",
        "--inside-groups",
        "[[0],[1,2]]",
        "--iterations",
        "250",
        "--burn-in",
        "80",
        "--aux-sweeps",
        "3",
        "--num-draws",
        "40",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let table = fs::read_to_string(out_dir.join("table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 2, "header plus one replicate row");
    assert!(lines[0].starts_with("setting,replicate,elasso_pvalue_rmse,bayes_pvalue_rmse"));
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert!(cells[0].contains("p11=0.7"));

    let rows = json(&out_dir.join("table.json"));
    let row = &rows.as_array().unwrap()[0];
    assert!(row["elasso_pvalue_rmse"].as_f64().unwrap() >= 0.0);
    assert!(row["bayes_pvalue_rmse"].as_f64().unwrap() >= 0.0);
    // Design mode knows the truth, so adjacency errors are reported.
    assert!(row["elasso_adjacency_rmse"].as_f64().is_some());
    assert!(row["bayes_adjacency_rmse"].as_f64().is_some());
}

#[test]
fn oracle_check_passes_at_default_tolerance_and_fails_when_forced() {
    let dir = scratch("oracle");
    let report_dir = dir.join("report");
    let base = [
        "oracle-check",
        "--items",
        "2",
        "--n",
        "40",
        "--seed",
        "5",
        "--iterations",
        "1500",
        "--burn-in",
        "400",
    ];
    let mut args = base.to_vec();
    args.extend(["--output", report_dir.to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
    let report = json(&report_dir.join("report.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(report["coordinates"].as_array().unwrap().len(), 3);

    // An absurd tolerance must trip the dedicated exit code.
    let mut args = base.to_vec();
    args.extend(["--tolerance", "1e-9", "--floor", "0"]);
    let out = run(&args);
    assert_eq!(exit_code(&out), 3);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn oracle_check_rejects_large_instances() {
    let out = run(&["oracle-check", "--items", "9"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("2..=4"), "stderr: {}", stderr(&out));
}
