//! End-to-end tests of the `stablematch` binary: every subcommand, the file
//! formats, the exit-code contract, and dataset self-consistency.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stablematch::fixtures;
use stablematch::serialize_instance;
use stablematch_cli::output::serialize_matching;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stablematch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_table1(dir: &Path) -> PathBuf {
    let path = dir.join("table1.txt");
    fs::write(&path, serialize_instance(&fixtures::table1())).unwrap();
    path
}

/// Drops the trailing wall-time column, which is not deterministic.
fn strip_wall_ms(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map(|(head, _)| head).unwrap_or(l))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gen_is_deterministic_and_manifest_complete() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = run(&[
            "gen", "--kind", "smti", "-n", "20", "--p1", "0.5", "--p2", "0.5", "--count", "4",
            "--seed", "7", "--out", out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{res:?}");
    }
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        let left = fs::read(a.join(&name)).unwrap();
        let right = fs::read(b.join(&name)).unwrap();
        assert_eq!(left, right, "{name:?} differs between identical runs");
    }
    let manifest = fs::read_to_string(a.join("manifest.csv")).unwrap();
    assert!(manifest.starts_with("schema_version,kind,n,p1,p2,index,seed,file,error"));
    assert_eq!(manifest.lines().count(), 5);
    assert!(manifest.contains(",smti,20,0.5,0.5,"));
}

#[test]
fn gen_reports_exhausted_retries() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&[
        "gen", "--kind", "smti", "-n", "3", "--p1", "0.99", "--p2", "0.0", "--count", "2",
        "--seed", "1", "--max-retries", "10", "--out",
        dir.path().join("g").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
    let manifest = fs::read_to_string(dir.path().join("g/manifest.csv")).unwrap();
    assert!(manifest.contains("empty preference list"));
}

#[test]
fn solve_reports_stability_and_repeats_identically() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_table1(dir.path());
    let args = [
        "solve",
        inst.to_str().unwrap(),
        "--variant",
        "sml2",
        "--seed",
        "3",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let row = stdout(&first);
    assert!(row.contains(",true,true,"), "expected stable: {row}");
    let second = run(&args);
    assert_eq!(strip_wall_ms(&row), strip_wall_ms(&stdout(&second)));
}

#[test]
fn solve_trace_and_matching_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_table1(dir.path());
    let trace = dir.path().join("trace.csv");
    let matching = dir.path().join("best.txt");
    let res = run(&[
        "solve",
        inst.to_str().unwrap(),
        "--variant",
        "sml1",
        "--seed",
        "5",
        "--trace-out",
        trace.to_str().unwrap(),
        "--matching-out",
        matching.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(res.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert_eq!(report["found_stable"], serde_json::Value::Bool(true));

    let trace = fs::read_to_string(trace).unwrap();
    assert!(trace.starts_with("schema_version,step,nbp,ns,f,walked,restarted"));
    let steps = report["steps"].as_u64().unwrap() as usize;
    assert_eq!(trace.lines().count(), steps + 1);

    // The emitted matching passes check with exit 0.
    let check = run(&[
        "check",
        inst.to_str().unwrap(),
        matching.to_str().unwrap(),
    ]);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout(&check).contains("verdict: STABLE"));
}

#[test]
fn solve_rejects_variant_mode_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_table1(dir.path());
    let res = run(&[
        "solve",
        inst.to_str().unwrap(),
        "--variant",
        "ltiu",
        "--seed",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn check_lists_blocking_pairs_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_table1(dir.path());
    let matching = dir.path().join("walkthrough.txt");
    fs::write(
        &matching,
        serialize_matching(&fixtures::table1_walkthrough_matching()),
    )
    .unwrap();
    let res = run(&[
        "check",
        inst.to_str().unwrap(),
        matching.to_str().unwrap(),
        "--max-list",
        "50",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let text = stdout(&res);
    assert!(text.contains("(8, 4)"));
    assert!(text.contains("(8, 2)"));
    assert!(text.contains("verdict: UNSTABLE"));
}

#[test]
fn check_rejects_out_of_range_and_partial_matchings() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_table1(dir.path());
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1: 9\n").unwrap();
    let res = run(&["check", inst.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));

    // Singles are invalid for a strict-complete instance.
    fs::write(&bad, "1: 1\n2: -\n").unwrap();
    let res = run(&["check", inst.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn sample_degenerate_cases() {
    let dir = tempfile::tempdir().unwrap();
    // Single stable marriage: entropy 0, normalized entropy 1 by convention.
    let path = dir.path().join("tiny.txt");
    fs::write(&path, "SM 1\n1: 1\n1: 1\n").unwrap();
    let res = run(&[
        "sample",
        path.to_str().unwrap(),
        "--runs",
        "5",
        "--seed",
        "2",
    ]);
    assert!(res.status.success());
    let text = stdout(&res);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[3], "1", "lattice size");
    assert_eq!(fields[7], "0.000000", "entropy bits");
    assert_eq!(fields[8], "1.000000", "normalized entropy");
    assert_eq!(fields[9], "0.500000", "mean distance");

    // One run: entropy 0 regardless of the lattice.
    let path = write_table1(dir.path());
    let res = run(&[
        "sample",
        path.to_str().unwrap(),
        "--runs",
        "1",
        "--seed",
        "2",
    ]);
    let text = stdout(&res);
    assert!(text.lines().nth(1).unwrap().contains(",0.000000,"));
}

#[test]
fn sample_enforces_lattice_cap() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(&[
        "gen", "--kind", "sm", "-n", "12", "--count", "1", "--seed", "3", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let inst = dir.path().join("sm_n12_s3_i0000.txt");
    let res = run(&[
        "sample",
        inst.to_str().unwrap(),
        "--runs",
        "3",
        "--max-lattice-n",
        "10",
    ]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("enumeration cap"));
}

#[test]
fn sweep_outputs_are_self_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sw");
    let res = run(&[
        "sweep", "--kind", "smti", "-n", "15", "--p1", "0.2,0.5", "--p2", "0.0:1.0:0.5",
        "--instances", "4", "--seed", "11", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");

    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    let cells = fs::read_to_string(out.join("cells.csv")).unwrap();
    assert_eq!(runs.lines().count() - 1, 2 * 3 * 4);
    assert_eq!(cells.lines().count() - 1, 2 * 3);

    // Aggregates recomputed from the raw rows match the emitted ones.
    let mut rows: Vec<Vec<String>> = Vec::new();
    for line in runs.lines().skip(1) {
        rows.push(line.split(',').map(str::to_string).collect());
    }
    for cell_line in cells.lines().skip(1) {
        let f: Vec<&str> = cell_line.split(',').collect();
        let (n, p1, p2) = (f[2], f[3], f[4]);
        let members: Vec<&Vec<String>> = rows
            .iter()
            .filter(|r| r[2] == n && r[3] == p1 && r[4] == p2)
            .collect();
        assert_eq!(members.len(), 4);
        let mean_size: f64 = members
            .iter()
            .map(|r| r[12].parse::<f64>().unwrap())
            .sum::<f64>()
            / members.len() as f64;
        let emitted: f64 = f[7].parse().unwrap();
        assert!((mean_size - emitted).abs() < 1e-9);
        let pct_perfect = 100.0
            * members.iter().filter(|r| r[9] == "true").count() as f64
            / members.len() as f64;
        let emitted: f64 = f[9].parse().unwrap();
        assert!((pct_perfect - emitted).abs() < 1e-9);
    }
}

#[test]
fn sweep_rows_are_reproducible_from_recorded_seeds() {
    use stablematch::search::{run_search, SearchParams, Variant};
    use stablematch_cli::sweep::{cell_instance, Cell, SweepSpec};

    let mut spec = SweepSpec::new(Variant::Ltiu, vec![12], 99);
    spec.p1_grid = vec![0.3];
    spec.p2_grid = vec![0.4];
    spec.instances_per_cell = 3;
    let outcome = stablematch_cli::sweep::run_sweep(&spec, false).unwrap();

    for row in &outcome.runs {
        let cell = Cell {
            n: 12,
            p1: Some(0.3),
            p2: Some(0.4),
        };
        let inst = cell_instance(&spec, 0, cell, row.instance_idx).unwrap();
        let mut params = SearchParams::new(Variant::Ltiu, row.seed);
        params.p_walk = spec.p_walk;
        params.max_steps = spec.max_steps;
        let result = run_search(&inst, &params).unwrap();
        assert_eq!(result.steps_taken, row.steps);
        assert_eq!(result.found_stable, row.found_stable);
        assert_eq!(result.found_perfect, row.found_perfect);
        assert_eq!(result.best.size(), row.best_size);
    }
}

#[test]
fn sweep_empty_grid_produces_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty");
    let res = run(&[
        "sweep", "--kind", "sm", "--sizes", "", "--instances", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1, "header only: {runs}");
}

#[test]
fn sweep_svg_emission() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("svg");
    let res = run(&[
        "sweep", "--kind", "sm", "--sizes", "20,40,60", "--instances", "5", "--seed", "2",
        "--out", out.to_str().unwrap(), "--svg",
    ]);
    assert!(res.status.success());
    let svg = fs::read_to_string(out.join("steps_vs_n.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(fs::read_to_string(out.join("decay.svg")).unwrap().contains("polyline"));
}

#[test]
fn fit_round_trips_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    let decay = dir.path().join("decay.csv");
    let mut text = String::from("schema_version,n,t,mean_nbp,mean_nbp_over_n\n");
    let (a, b) = (0.25f64, 5.7f64);
    for n in [100usize, 300] {
        for t in (0..2 * n).step_by(25) {
            let y = a * (n * n) as f64 * (-b * t as f64 / n as f64).exp2();
            text.push_str(&format!("1,{n},{t},{y},{}\n", y / n as f64));
        }
    }
    fs::write(&decay, text).unwrap();
    let res = run(&[
        "fit", "--model", "blocking-decay", "--input", decay.to_str().unwrap(), "--format",
        "json",
    ]);
    assert!(res.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&res)).unwrap();
    assert!((report["param_a"].as_f64().unwrap() - a).abs() < 1e-6);
    assert!((report["param_b"].as_f64().unwrap() - b).abs() < 1e-6);

    // Too little data is a runtime error.
    let medians = dir.path().join("medians.csv");
    fs::write(&medians, "schema_version,n,median_steps\n1,100,200\n").unwrap();
    let res = run(&["fit", "--model", "tmed", "--input", medians.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    let res = run(&["solve"]);
    assert_eq!(res.status.code(), Some(2), "clap missing-arg error");
    let res = run(&["gen", "--kind", "smti", "-n", "5", "--count", "1", "--out", "/tmp/x"]);
    assert_eq!(res.status.code(), Some(2), "missing p1/p2");
    let res = run(&["sweep", "--kind", "sm", "--instances", "5", "--out", "/tmp/x"]);
    assert_eq!(res.status.code(), Some(2), "missing sizes");
}
