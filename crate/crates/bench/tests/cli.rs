use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"
[problem]
kind = "sphere"
sizes = [[4]]
seeds = [1, 2]

[solver]
algorithms = ["rgd", "irgdr"]
schedules = ["capped"]
nu = [0.1]

[stop]
grad_tol = 1e-6
max_iters = 3000

[output]
audit = true
timing = false
"#;

/// REG with a perturbation radius ten times past ν/L on diag(1, 0, 0).
const ADVERSARIAL: &str = r#"
[problem]
kind = "sphere"
sizes = [[3]]
seeds = [0]
diagonal = [1.0, 0.0, 0.0]

[solver]
algorithms = ["reg"]
schedules = ["capped"]
rho = [0.5]
reg_nu = 0.1
lipschitz = 2.0

[stop]
grad_tol = 1e-8
max_iters = 200

[output]
audit = true
timing = false
"#;

fn bench() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_irgd-bench"));
    cmd.env_remove("IRGD_OUT_DIR");
    cmd
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, out: &Path) -> Output {
    bench().arg("run").arg(config).arg("--out").arg(out).output().unwrap()
}

#[test]
fn run_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    let o = run(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "summary.csv",
        "table.csv",
        "table.txt",
        "manifest.json",
        "traces/trace_0000.csv",
        "traces/trace_0000.audit.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("4 runs, 0 failed"));
}

#[test]
fn out_dir_env_sets_the_default_root() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let root = dir.path().join("root");
    let o = bench()
        .env("IRGD_OUT_DIR", &root)
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(root.join("small").join("summary.csv").is_file());
}

#[test]
fn config_problems_exit_1() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.toml", "[problem\n".to_string()),
        ("unknown.toml", SMALL.replace("[stop]", "[stop]\ncolour = 3")),
        (
            "empty.toml",
            SMALL.replace(r#"algorithms = ["rgd", "irgdr"]"#, "algorithms = []"),
        ),
        ("negative.toml", SMALL.replace("grad_tol = 1e-6", "grad_tol = -1.0")),
    ];
    for (name, text) in cases {
        let cfg = write_config(dir.path(), name, &text);
        let o = run(&cfg, &dir.path().join(name));
        assert_eq!(code(&o), 1, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn missing_files_exit_3() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir.path().join("nope.toml"), &dir.path().join("out"));
    assert_eq!(code(&o), 3);

    let o = bench().arg("rate").arg(dir.path().join("nope.csv")).output().unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn malformed_trace_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(dir.path(), "trace_0000.csv", "k,t,f\n0,1,2\n");
    let o = bench().arg("rate").arg(&bad).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn rate_reports_both_models() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&cfg, &out)), 0);
    let o = bench()
        .arg("rate")
        .arg(out.join("traces/trace_0000.csv"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout).to_lowercase();
    assert!(text.contains("linear") || text.contains("inconclusive"), "{text}");
}

#[test]
fn audit_passes_clean_runs_and_flags_adversarial_ones() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&cfg, &out)), 0);
    for i in 0..4 {
        let trace = out.join(format!("traces/trace_{i:04}.csv"));
        let o = bench().arg("audit").arg(&trace).arg(&cfg).output().unwrap();
        assert_eq!(code(&o), 0, "run {i}: {}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    }

    let adv = write_config(dir.path(), "adv.toml", ADVERSARIAL);
    let adv_out = dir.path().join("adv");
    assert_eq!(code(&run(&adv, &adv_out)), 0);
    let o = bench()
        .arg("audit")
        .arg(adv_out.join("traces/trace_0000.csv"))
        .arg(&adv)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn audit_without_sidecar_is_unavailable() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "small.toml",
        &SMALL.replace("audit = true", "audit = false"),
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run(&cfg, &out)), 0);
    let trace = out.join("traces/trace_0001.csv");
    assert!(!out.join("traces/trace_0001.audit.csv").exists());
    let o = bench().arg("audit").arg(&trace).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("audit"));
}

#[test]
fn audit_needs_a_run_index() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&cfg, &out)), 0);
    let renamed = dir.path().join("renamed.csv");
    fs::copy(out.join("traces/trace_0002.csv"), &renamed).unwrap();
    let o = bench().arg("audit").arg(&renamed).arg(&cfg).output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bench()
        .arg("audit")
        .arg(&renamed)
        .arg(&cfg)
        .args(["--run", "9"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn plot_overlays_traces() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out");
    assert_eq!(code(&run(&cfg, &out)), 0);
    let svg = dir.path().join("overlay.svg");
    let o = bench()
        .arg("plot")
        .arg(out.join("traces/trace_0000.csv"))
        .arg(out.join("traces/trace_0001.csv"))
        .arg("--out")
        .arg(&svg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let paths = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("series"))
        .count();
    assert_eq!(paths, 2);
}

#[test]
fn gen_fixtures_writes_idx_and_golden() {
    let dir = TempDir::new().unwrap();
    let o = bench()
        .arg("gen-fixtures")
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for f in [
        "fixtures/two_images.idx",
        "fixtures/bad_magic.idx",
        "golden/config.toml",
        "golden/summary.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
}
