use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use logduelli::harness::experiment::{aggregate, read_trace_series, write_aggregate_csv};
use logduelli::trace::TRACE_HEADER;

const BIN: &str = env!("CARGO_BIN_EXE_logduelli");

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .env_remove("LOGDUELLI_OUT_DIR")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const TWO_SEEDS: &str = r#"
environment = "cone_peak:d=1"
transfer = "linear"
learner = "logduelli"
T = 4096
seeds = [3, 8]
"#;

fn last_field(line: &str, idx: usize) -> f64 {
    line.split(',').nth(idx).unwrap().parse().unwrap()
}

#[test]
fn run_writes_traces_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", TWO_SEEDS);
    let out = dir.path().join("out");
    let res = cli(&["run", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["aggregate.csv", "trace_seed3.csv", "trace_seed8.csv"]
    );

    let mut finals = Vec::new();
    for seed in [3, 8] {
        let text = fs::read_to_string(out.join(format!("trace_seed{seed}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        // full trace: one row per duel
        assert_eq!(lines.len(), 4096 + 1);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        finals.push(last_field(lines.last().unwrap(), 5));
    }
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    let rows: Vec<&str> = agg.lines().collect();
    assert_eq!(rows[0], "t,mean_cum_regret,std_cum_regret,replications");
    assert_eq!(rows.len(), 17);
    let last = rows.last().unwrap();
    assert_eq!(last_field(last, 0), 4096.0);
    assert!((last_field(last, 1) - (finals[0] + finals[1]) / 2.0).abs() < 1e-9);
    assert_eq!(last_field(last, 3), 2.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", TWO_SEEDS);
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        assert!(
            cli(&["run", &cfg, "--out", out.to_str().unwrap()], dir.path())
                .status
                .success()
        );
    }
    for f in ["trace_seed3.csv", "trace_seed8.csv", "aggregate.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn aggregate_is_recomputable_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", TWO_SEEDS);
    let out = dir.path().join("out");
    assert!(
        cli(&["run", &cfg, "--out", out.to_str().unwrap()], dir.path())
            .status
            .success()
    );
    let series: Vec<_> = [3, 8]
        .iter()
        .map(|s| read_trace_series(&out.join(format!("trace_seed{s}.csv"))).unwrap())
        .collect();
    let mut buf = Vec::new();
    write_aggregate_csv(&aggregate(&series, 4096).unwrap(), &mut buf).unwrap();
    assert_eq!(buf, fs::read(out.join("aggregate.csv")).unwrap());
}

#[test]
fn seed_offset_and_checkpoint_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "big.toml",
        "environment = \"cone_peak:d=1\"\ntransfer = \"linear\"\nlearner = \"uniform\"\nT = 131072\nseeds = [0]\n",
    );
    let out = dir.path().join("out");
    let res = cli(
        &[
            "run",
            &cfg,
            "--seed-offset",
            "5",
            "--out",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(res.status.success());
    let text = fs::read_to_string(out.join("trace_seed5.csv")).unwrap();
    // above 2^16 only the 16 checkpoints are kept
    assert_eq!(text.lines().count(), 17);
    assert_eq!(last_field(text.lines().last().unwrap(), 0), 131072.0);

    let full = dir.path().join("full");
    let res = cli(
        &["run", &cfg, "--full-trace", "--out", full.to_str().unwrap()],
        dir.path(),
    );
    assert!(res.status.success());
    let text = fs::read_to_string(full.join("trace_seed0.csv")).unwrap();
    assert_eq!(text.lines().count(), 131072 + 1);
}

#[test]
fn output_directory_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "exp.toml", TWO_SEEDS);
    let res = Command::new(BIN)
        .args(["run", &cfg])
        .current_dir(dir.path())
        .env("LOGDUELLI_OUT_DIR", dir.path().join("from_env"))
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(dir.path().join("from_env/aggregate.csv").exists());

    assert!(cli(&["run", &cfg], dir.path()).status.success());
    assert!(dir.path().join("out/aggregate.csv").exists());

    let cfg = write_config(
        dir.path(),
        "with_out.toml",
        &format!("{TWO_SEEDS}output = \"configured\"\n"),
    );
    assert!(cli(&["run", &cfg], dir.path()).status.success());
    assert!(dir.path().join("configured/aggregate.csv").exists());
}

#[test]
fn bad_configs_fail_with_named_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (TWO_SEEDS.replace("T = 4096", "T = 1"), "T"),
        (
            TWO_SEEDS.replace("\"logduelli\"", "\"zooming\""),
            "grid_etc",
        ),
        (format!("{TWO_SEEDS}colour = \"blue\"\n"), "colour"),
        ("T = = 3".to_string(), "bad.toml"),
    ];
    for (body, needle) in cases {
        let cfg = write_config(dir.path(), "bad.toml", &body);
        let res = cli(&["run", &cfg], dir.path());
        assert_eq!(res.status.code(), Some(2));
        let err = String::from_utf8_lossy(&res.stderr);
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn validate_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["validate", "foo"], dir.path());
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    for s in [
        "transfer",
        "sti",
        "concentration",
        "no_elim",
        "shrink",
        "memory",
        "all",
    ] {
        assert!(err.contains(s), "{err}");
    }

    let res = cli(&["validate", "transfer"], dir.path());
    assert!(res.status.success());
    let out = String::from_utf8_lossy(&res.stdout);
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 4);
}

#[test]
fn sweep_writes_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.toml",
        "environment = \"cone_peak:d=1\"\ntransfer = \"linear\"\nlearner = \"uniform\"\nseeds = [1]\nhorizons = [1024, 2048, 4096, 8192]\nreplications = 3\n",
    );
    let out = dir.path().join("s");
    let res = cli(&["sweep", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 5);
    assert!(rows.starts_with("T,log2_T,replications,mean_regret,std_regret,mean_log2_regret\n"));
    let fit = fs::read_to_string(out.join("sweep_fit.csv")).unwrap();
    let exponent = last_field(fit.lines().nth(1).unwrap(), 1);
    assert!((exponent - 1.0).abs() < 0.05, "{exponent}");

    // `run` on an experiment config is not a sweep
    let cfg = write_config(dir.path(), "exp.toml", TWO_SEEDS);
    assert_eq!(cli(&["sweep", &cfg], dir.path()).status.code(), Some(2));
}
