use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cacheveil"))
        .args(args)
        .env("CACHEVEIL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    bin(args).status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn header(p: impl AsRef<Path>) -> String {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

fn write_scenario(dir: &TempDir, body: &str) -> String {
    let p = path(dir, "scenario.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn unknown_flags_and_bad_values_exit_two() {
    assert_eq!(code(&["bounds", "--no-such-flag"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(
        code(&["--quiet", "sweep", "--method", "jpc", "--zeta", "0.6:0.5:x"]),
        2
    );
    let dir = TempDir::new().unwrap();
    let bad = write_scenario(
        &dir,
        r#"{"num_files": 4, "num_caches": 1, "cache_capacity": 5, "chunks_per_file": 1, "zipf": {"alpha": 1.0}, "request_gen": [1.0]}"#,
    );
    assert_eq!(code(&["--quiet", "--scenario", &bad, "bounds"]), 2);
    let extra = write_scenario(
        &dir,
        r#"{"num_files": 4, "num_caches": 1, "cache_capacity": 2, "chunks_per_file": 1, "zipf": {"alpha": 1.0}, "request_gen": [1.0], "colour": 3}"#,
    );
    assert_eq!(code(&["--quiet", "--scenario", &extra, "bounds"]), 2);
}

#[test]
fn infeasible_target_exits_three_and_still_reports_status() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "opt.json");
    assert_eq!(
        code(&[
            "--quiet", "--cap", "100000", "optimize", "--method", "dpc", "--zeta", "0.9", "--out",
            &out
        ]),
        3
    );
    assert_eq!(read_json(&out)["status"], "infeasible");
}

#[test]
fn enumeration_cap_exits_four() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.csv");
    assert_eq!(
        code(&[
            "--quiet",
            "--cap",
            "100",
            "enumerate",
            "--family",
            "chunk",
            "--out",
            &out
        ]),
        4
    );
    assert_eq!(
        code(&[
            "--quiet", "--cap", "100", "optimize", "--method", "jpc", "--zeta", "0.6", "--out",
            &out
        ]),
        4
    );
}

#[test]
fn optimize_evaluate_and_simulate_round_trip() {
    let dir = TempDir::new().unwrap();
    let opt = path(&dir, "opt.json");
    let policy = path(&dir, "policy.json");
    let args = [
        "--quiet",
        "optimize",
        "--method",
        "jpc",
        "--zeta",
        "0.6",
        "--out",
        &opt,
        "--policy-out",
        &policy,
    ];
    assert_eq!(code(&args), 0);
    let doc = read_json(&opt);
    assert_eq!(doc["status"], "optimal");
    let omega = doc["omega_star"].as_f64().unwrap();

    let eval = path(&dir, "eval.json");
    assert_eq!(
        code(&["--quiet", "evaluate", "--policy", &policy, "--out", &eval]),
        0
    );
    let report = read_json(&eval);
    assert!((report["omega"].as_f64().unwrap() - omega).abs() <= 1e-9);
    assert!(report["psi"].as_f64().unwrap() >= 0.6 - 1e-9);
    assert_eq!(
        header(dir.path().join("eval.decision.csv"))
            .split(',')
            .next(),
        Some("y")
    );

    let sim = path(&dir, "sim.json");
    let hist = path(&dir, "hist.csv");
    assert_eq!(
        code(&[
            "--quiet",
            "--seed",
            "9",
            "simulate",
            "--policy",
            &policy,
            "--requests",
            "20000",
            "--out",
            &sim,
            "--histogram",
            &hist
        ]),
        0
    );
    let first = fs::read(&hist).unwrap();
    assert_eq!(header(&hist), "y,count,analytic_prob");
    assert_eq!(
        code(&[
            "--quiet",
            "--seed",
            "9",
            "simulate",
            "--policy",
            &policy,
            "--requests",
            "20000",
            "--out",
            &sim,
            "--histogram",
            &hist
        ]),
        0
    );
    assert_eq!(fs::read(&hist).unwrap(), first);
}

#[test]
fn manifest_records_the_run() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "sweep.csv");
    assert_eq!(
        code(&[
            "--quiet",
            "--seed",
            "5",
            "sweep",
            "--method",
            "dpc",
            "--zeta",
            "0.57:0.65:0.02",
            "--out",
            &out
        ]),
        0
    );
    let manifest = read_json(&path(&dir, "sweep.manifest.json"));
    assert_eq!(manifest["subcommand"], "sweep");
    assert_eq!(manifest["scenario_digest"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"][0], out.as_str());
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["timestamp"].as_str().unwrap().ends_with('Z'));
    assert_eq!(manifest["parameters"]["seed"], 5);
}

#[test]
fn sweep_output_is_reproducible_with_a_header() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    for out in [&a, &b] {
        let args = [
            "--quiet",
            "sweep",
            "--method",
            "jpc",
            "--family",
            "file",
            "--zeta",
            "0.56:0.65:0.01",
            "--out",
            out,
        ];
        assert_eq!(code(&args), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        header(&a),
        "method,zeta,status,omega_star,psi_verified,hit_ratio,n_vars,n_rows,solve_iterations,solve_ms"
    );
    let text = fs::read_to_string(&a).unwrap();
    let zetas: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(zetas.len(), 10);
    assert_eq!(zetas[1], "0.57");
}

#[test]
fn recipes_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    for name in ["fig4", "fig8"] {
        let a = path(&dir, &format!("{name}_a"));
        let b = path(&dir, &format!("{name}_b"));
        assert_eq!(code(&["--quiet", "recipe", name, "--out", &a]), 0);
        assert_eq!(code(&["--quiet", "recipe", name, "--out", &b]), 0);
        let csv = format!("{name}.csv");
        let left = fs::read(Path::new(&a).join(&csv)).unwrap();
        assert_eq!(left, fs::read(Path::new(&b).join(&csv)).unwrap(), "{name}");
        assert!(!header(Path::new(&a).join(&csv)).is_empty());
        let manifest = read_json(&format!("{a}/manifest.json"));
        assert_eq!(manifest["subcommand"], "recipe");
    }
    assert_eq!(code(&["--quiet", "recipe", "no-such-recipe"]), 2);
}

#[test]
fn recipe_list_names_every_figure() {
    let out = bin(&["recipe", "--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn small_subcommands_write_headed_csv() {
    let dir = TempDir::new().unwrap();
    let rda = path(&dir, "rda.csv");
    assert_eq!(
        code(&["--quiet", "rda", "--zeta", "0.57,0.6", "--out", &rda]),
        0
    );
    assert_eq!(header(&rda), "zeta,s,omega,psi");

    let cmin = path(&dir, "cmin.csv");
    assert_eq!(
        code(&[
            "--quiet", "cmin", "--method", "jpc", "--zeta", "0.566", "--beta", "1.0", "--out",
            &cmin
        ]),
        0
    );
    let text = fs::read_to_string(&cmin).unwrap();
    assert_eq!(header(&cmin), "beta,c_min,omega_star");
    assert!(text.lines().nth(1).unwrap().starts_with("1,3,"), "{text}");

    let alpha = path(&dir, "alpha.json");
    fs::write(
        &alpha,
        r#"{"cache_capacity": 2, "alpha": [0.7, 0.6, 0.4, 0.3]}"#,
    )
    .unwrap();
    let dist = path(&dir, "dist.csv");
    assert_eq!(
        code(&["--quiet", "dpc-sample", "--alpha", &alpha, "--out", &dist]),
        0
    );
    let text = fs::read_to_string(&dist).unwrap();
    assert_eq!(header(&dist), "placement,probability");
    assert_eq!(text.lines().count(), 4);

    let enumerated = path(&dir, "enum.csv");
    let scenario = write_scenario(
        &dir,
        r#"{"num_files": 4, "num_caches": 1, "cache_capacity": 2, "chunks_per_file": 1, "zipf": {"alpha": 1.0}, "request_gen": [1.0]}"#,
    );
    assert_eq!(
        code(&[
            "--quiet",
            "--scenario",
            &scenario,
            "enumerate",
            "--family",
            "file",
            "--list",
            "--out",
            &enumerated
        ]),
        0
    );
    assert_eq!(fs::read_to_string(&enumerated).unwrap().lines().count(), 7);
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    assert_eq!(cacheveil::cli::run(["cacheveil", "--bogus"]), 2);
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bounds.json");
    assert_eq!(
        cacheveil::cli::run(["cacheveil", "--quiet", "bounds", "--out", &out]),
        0
    );
    let doc = read_json(&out);
    let text = doc.to_string();
    assert!(text.contains("0.566"), "{text}");
}
