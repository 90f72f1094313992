//! End-to-end tests of the `seconet` binary: exit codes, output files,
//! determinism, and scheduling independence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_seconet")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "seconet-cli-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

/// A scenario small enough for fast end-to-end runs.
fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("scenario.json");
    fs::write(
        &path,
        r#"{
  "growth": {
    "population_size": 400,
    "initial_links": 5,
    "joins_per_step": 20,
    "horizon": 60
  },
  "epidemic": {
    "init_prevalence_female": 0.15,
    "init_prevalence_male": 0.1
  },
  "plan": { "strategies": ["none", "degree"] },
  "seed": 3,
  "replicates": 3
}"#,
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary should execute")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    // No subcommand.
    assert_eq!(run(&[]).status.code(), Some(1));
    // Unknown flag.
    assert_eq!(run(&["generate", "--bogus"]).status.code(), Some(1));
}

#[test]
fn missing_or_malformed_config_exits_one() {
    let tmp = TempDir::new("badcfg");
    let out = run(&[
        "generate",
        "--config",
        "/nonexistent/nope.json",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = run(&[
        "generate",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown keys are rejected, not ignored.
    let unknown = tmp.path().join("unknown.json");
    fs::write(
        &unknown,
        r#"{ "epidemic": { "init_prevalence_female": 0.1, "init_prevalence_male": 0.1 }, "typo_key": 1 }"#,
    )
    .unwrap();
    let out = run(&[
        "generate",
        "--config",
        unknown.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_strategy_exits_one_and_names_the_valid_set() {
    let tmp = TempDir::new("strategy");
    let config = small_config(tmp.path());
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--strategy",
        "voodoo",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for name in ["none", "age", "ring", "degree", "betweenness", "closeness", "percolation", "eigenvector"] {
        assert!(stderr.contains(name), "stderr must name '{name}': {stderr}");
    }
}

#[test]
fn generate_writes_snapshot_and_topology() {
    let tmp = TempDir::new("generate");
    let config = small_config(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);

    let nodes = fs::read_to_string(out_dir.join("nodes.csv")).unwrap();
    assert_eq!(nodes.lines().count(), 401, "header + one row per person");
    assert!(nodes.starts_with("id,age,gender,delta,lsp,join_time\n"));

    let edges = fs::read_to_string(out_dir.join("edges.csv")).unwrap();
    assert!(edges.starts_with("female_id,male_id,created_at,expected_duration,kind\n"));
    assert!(edges.lines().count() > 1, "a grown network has links");

    let topology: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("topology.json")).unwrap()).unwrap();
    assert!(topology["average_degree"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_is_deterministic_and_audits_sessions() {
    let tmp = TempDir::new("simulate");
    let config = small_config(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out_dir in [&a, &b] {
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "7",
            "--strategy",
            "degree",
            "--scores",
            "degree",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_success(&out);
    }
    let daily_a = fs::read(a.join("daily.csv")).unwrap();
    let daily_b = fs::read(b.join("daily.csv")).unwrap();
    assert_eq!(daily_a, daily_b, "same config+seed must be byte-identical");
    assert_eq!(
        fs::read(a.join("sessions.csv")).unwrap(),
        fs::read(b.join("sessions.csv")).unwrap()
    );

    let daily = String::from_utf8(daily_a).unwrap();
    assert_eq!(daily.lines().count(), 62, "header + days 0..=60");
    assert!(daily.starts_with(
        "day,S,I,R,V,S_f,I_f,R_f,V_f,S_m,I_m,R_m,V_m,new_inf,new_inf_f,new_inf_m\n"
    ));

    let sessions = fs::read_to_string(a.join("sessions.csv")).unwrap();
    assert_eq!(sessions.lines().count(), 5, "header + four sessions");

    let scores = fs::read_to_string(a.join("scores_degree.csv")).unwrap();
    assert!(scores.starts_with("node_id,score\n"));
    assert_eq!(scores.lines().count(), 401);
}

#[test]
fn sweep_is_worker_count_independent_and_plots() {
    let tmp = TempDir::new("sweep");
    let config = small_config(tmp.path());
    let (serial, parallel) = (tmp.path().join("serial"), tmp.path().join("parallel"));
    for (out_dir, workers) in [(&serial, "1"), (&parallel, "3")] {
        let out = run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--parallel",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_success(&out);
    }
    let summary = fs::read(serial.join("summary.csv")).unwrap();
    assert_eq!(
        summary,
        fs::read(parallel.join("summary.csv")).unwrap(),
        "summary must not depend on scheduling"
    );
    // One point × two strategies × three replicates, plus the header.
    assert_eq!(String::from_utf8_lossy(&summary).lines().count(), 7);
    let errors = fs::read_to_string(serial.join("errors.csv")).unwrap();
    assert_eq!(errors, "sweep_id,seed,strategy,error\n");

    // Chart the sweep output.
    let out = run(&[
        "plot",
        "--summary",
        serial.join("summary.csv").to_str().unwrap(),
        "--x",
        "avg_degree",
        "--y",
        "cum_inc",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let svg = fs::read_to_string(tmp.path().join("cum_inc_vs_avg_degree.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>"));

    // Unknown metric names are usage errors.
    let out = run(&[
        "plot",
        "--summary",
        serial.join("summary.csv").to_str().unwrap(),
        "--x",
        "nonsense",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_configs_are_valid() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    for name in ["example.json", "sweep_density.json"] {
        let path = root.join("configs").join(name);
        let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(parsed.is_object(), "{name} must be a JSON object");
        // The library must accept them wholesale.
        seconet::ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
