//! End-to-end tests of the `dgdrf` binary: output contracts, determinism,
//! exit codes, and the figure/sweep/eval surfaces at toy sizes.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn dgdrf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgdrf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.toml");
    let mut f = fs::File::create(&path).unwrap();
    write!(
        f,
        r#"
[topology]
kind = "complete"
n = 4
scheme = "lazy_uniform"

[run]
iters = 50
samples_per_agent = 25

[features]
num_features = 10

[evaluation]
test_size = 256

[seeds]
repetitions = 2
"#
    )
    .unwrap();
    path
}

#[test]
fn run_writes_a_self_contained_directory() {
    let tmp = tempfile::tempdir().unwrap();
    write_tiny_config(tmp.path());
    let out = dgdrf(&["run", "--config", "tiny.toml", "--out", "out"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in [
        "manifest.json",
        "metrics.csv",
        "prescription.json",
        "summary.json",
        "trace_distributed_rep0.csv",
        "trace_centralized_rep1.csv",
        "featuremap_rep0.json",
        "graph_edges.csv",
        "mixing_matrix.csv",
    ] {
        assert!(tmp.path().join("out").join(file).exists(), "missing {file}");
    }
    let metrics = fs::read_to_string(tmp.path().join("out/metrics.csv")).unwrap();
    assert!(metrics.starts_with("rep,run,t,agent,metric,value\n"));
    let manifest = fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap();
    assert!(manifest.contains("config_hash"));
    assert!(manifest.contains("sigma2"));
}

#[test]
fn identical_configs_produce_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    write_tiny_config(tmp.path());
    let a = dgdrf(&["run", "--config", "tiny.toml", "--out", "a"], tmp.path());
    let b = dgdrf(&["run", "--config", "tiny.toml", "--out", "b"], tmp.path());
    assert!(a.status.success() && b.status.success());
    for file in ["metrics.csv", "summary.json", "trace_distributed_rep0.csv", "prescription.json"] {
        let left = fs::read(tmp.path().join("a").join(file)).unwrap();
        let right = fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(left, right, "{file} differs between identical runs");
    }
    // manifests differ only in the output location; the scientific hash agrees
    let hash_of = |dir: &str| -> serde_json::Value {
        let manifest = fs::read_to_string(tmp.path().join(dir).join("manifest.json")).unwrap();
        serde_json::from_str::<serde_json::Value>(&manifest).unwrap()["config_hash"].clone()
    };
    assert_eq!(hash_of("a"), hash_of("b"));
}

#[test]
fn invalid_grid_size_exits_2_and_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[topology]\nkind = \"grid\"\nn = 10\nscheme = \"metropolis\"\n").unwrap();
    let out = dgdrf(&["run", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("topology.n"), "stderr: {err}");
}

#[test]
fn print_config_canonicalizes() {
    let tmp = tempfile::tempdir().unwrap();
    write_tiny_config(tmp.path());
    let out = dgdrf(&["run", "--config", "tiny.toml", "--print-config"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[topology]"));
    assert!(text.contains("repetitions = 2"));
    // canonical output is itself a valid config
    fs::write(tmp.path().join("canon.toml"), text.as_bytes()).unwrap();
    let again = dgdrf(&["run", "--config", "canon.toml", "--print-config"], tmp.path());
    assert_eq!(text, String::from_utf8_lossy(&again.stdout));
}

#[test]
fn theory_defaults_pass_and_print_the_prescription() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dgdrf(
        &["theory", "--n", "4", "--m", "100", "--sigma2", "0", "--json", "theory.json"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("20"), "prescribed M/t missing: {text}");
    assert!(text.contains("64"), "m_min missing: {text}");
    assert!(text.contains("all lemma checks passed"));
    assert!(tmp.path().join("theory.json").exists());
}

#[test]
fn theory_out_of_regime_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dgdrf(&["theory", "--r", "0.5", "--gamma", "0.4"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("out of regime"), "stderr: {err}");
}

#[test]
fn figure_fig1_desk_writes_csv_and_stub() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dgdrf(
        &[
            "figure", "fig1", "--out", "figs", "--reps", "1", "--nm", "64", "--iters", "32",
            "--test-size", "128", "--n-values", "4", "--m-values", "4,8",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("figs/fig1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("figure,scale,topology,n,nm,num_features,rep,metric,t_star,best_value,sigma2")
    );
    // cycle + grid + single machine, 2 feature counts, 1 rep
    assert_eq!(lines.count(), 6);
    assert!(tmp.path().join("figs/fig1.gp").exists());
}

#[test]
fn figure_fig3_stopping_times_respect_the_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let iters = 32usize;
    let out = dgdrf(
        &[
            "figure", "fig3", "--out", "figs", "--reps", "1", "--nm-values", "64,128", "--iters",
            "32", "--test-size", "128", "--n-values", "4",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("figs/fig3.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let t_star: usize = line.split(',').nth(8).unwrap().parse().unwrap();
        assert!(t_star <= iters + 1, "t* {t_star} beyond budget: {line}");
    }
}

#[test]
fn figure_fig2_nm_column_is_monotone_per_series() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dgdrf(
        &[
            "figure", "fig2", "--out", "figs", "--reps", "1", "--nm-values", "64,128,256",
            "--iters", "32", "--test-size", "128", "--n-values", "4",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("figs/fig2.csv")).unwrap();
    let mut last: std::collections::HashMap<String, usize> = Default::default();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let series = format!("{}/{}", fields[2], fields[3]);
        let nm: usize = fields[4].parse().unwrap();
        if let Some(&prev) = last.get(&series) {
            assert!(nm > prev, "nm not increasing in series {series}: {line}");
        }
        last.insert(series, nm);
        rows += 1;
    }
    assert_eq!(rows, 9); // 3 series x 3 nm values x 1 rep
}

#[test]
fn figure_paper_scale_requires_a_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dgdrf(&["figure", "fig1", "--scale", "paper"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dataset.path"));
}

#[test]
fn sweep_covers_the_configured_axis() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.toml");
    fs::write(
        &cfg,
        r#"
[topology]
kind = "cycle"
n = 4

[run]
iters = 32
samples_per_agent = 16

[features]
num_features = 8

[evaluation]
test_size = 128

[seeds]
repetitions = 2

[sweep]
num_features = [4, 8]
"#,
    )
    .unwrap();
    let out = dgdrf(&["sweep", "--config", "sweep.toml", "--out", "sw"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2); // header + 2 feature counts x 2 reps
}

#[test]
fn eval_reuses_stored_traces() {
    let tmp = tempfile::tempdir().unwrap();
    write_tiny_config(tmp.path());
    let run = dgdrf(&["run", "--config", "tiny.toml", "--out", "out"], tmp.path());
    assert!(run.status.success());
    let out = dgdrf(&["eval", "--run-dir", "out"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rep 0"), "stdout: {text}");
    assert!(text.contains("rep 1"));
    // the re-evaluated optimum matches the recorded summary
    let summary = fs::read_to_string(tmp.path().join("out/summary.json")).unwrap();
    let recorded: serde_json::Value = serde_json::from_str(&summary).unwrap();
    let t_star = recorded["reps"][0]["t_star"].as_u64().unwrap();
    assert!(text.contains(&format!("t*={t_star}")), "stdout: {text}");
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    write_tiny_config(tmp.path());
    let one = dgdrf(
        &["--threads", "1", "run", "--config", "tiny.toml", "--out", "t1"],
        tmp.path(),
    );
    let two = dgdrf(
        &["--threads", "2", "run", "--config", "tiny.toml", "--out", "t2"],
        tmp.path(),
    );
    assert!(one.status.success() && two.status.success());
    for file in ["metrics.csv", "trace_distributed_rep0.csv"] {
        let left = fs::read(tmp.path().join("t1").join(file)).unwrap();
        let right = fs::read(tmp.path().join("t2").join(file)).unwrap();
        assert_eq!(left, right, "{file} depends on the worker count");
    }
}

#[test]
fn csv_dataset_round_trips_through_run() {
    let tmp = tempfile::tempdir().unwrap();
    // separable-ish toy labels so the classifier has signal
    let mut rows = String::new();
    let mut state = 0x12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
    };
    for _ in 0..700 {
        let a = next();
        let b = next();
        let label = u8::from(a + b > 0.0);
        rows.push_str(&format!("{label},{a},{b}\n"));
    }
    fs::write(tmp.path().join("toy.csv"), rows).unwrap();
    fs::write(
        tmp.path().join("csv.toml"),
        r#"
[dataset]
kind = "csv"
path = "toy.csv"
label_column = 0

[topology]
kind = "cycle"
n = 4

[run]
iters = 64
samples_per_agent = 64

[features]
num_features = 16

[evaluation]
metric = "classification_error"
test_size = 200

[seeds]
repetitions = 1
"#,
    )
    .unwrap();
    let out = dgdrf(&["run", "--config", "csv.toml", "--out", "outcsv"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(tmp.path().join("outcsv/summary.json")).unwrap();
    let recorded: serde_json::Value = serde_json::from_str(&summary).unwrap();
    let best = recorded["reps"][0]["best_value"].as_f64().unwrap();
    assert!(best < 0.5, "classifier no better than chance: {best}");
}

#[test]
fn excess_risk_on_csv_is_rejected_up_front() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("d.csv"), "1,0.5\n0,0.2\n").unwrap();
    fs::write(
        tmp.path().join("bad.toml"),
        "[dataset]\nkind = \"csv\"\npath = \"d.csv\"\n[evaluation]\nmetric = \"excess_risk\"\n",
    )
    .unwrap();
    let out = dgdrf(&["run", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("evaluation.metric"));
}
