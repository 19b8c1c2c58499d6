//! Test fixtures: hand-made IDX files and a golden experiment.

use std::path::Path;

use riemann_inexact::idx::{encode_idx_images, IdxImages};

use crate::config::ExperimentConfig;
use crate::experiment::{run_experiment, ExperimentError};
use crate::trace_io::write_bytes;

/// The config behind the committed golden artifacts.
pub const GOLDEN_CONFIG: &str = r#"# Small sphere grid whose artifacts are committed as golden files.
[problem]
kind = "sphere"
sizes = [[5]]
seeds = [7]

[solver]
algorithms = ["rgd", "irgdr", "reg"]
schedules = ["armijo", "capped"]
nu = [0.2]
rho = [1e-3]

[stop]
grad_tol = 1e-6
max_iters = 2000

[output]
audit = true
timing = false
threads = 1
"#;

/// Two 2x2 images.
pub fn two_images() -> IdxImages {
    IdxImages {
        count: 2,
        rows: 2,
        cols: 2,
        pixels: vec![0x00, 0x33, 0x66, 0xff, 0xff, 0x00, 0xcc, 0x99],
    }
}

/// `(file name, bytes)` for every IDX fixture.
pub fn idx_fixtures() -> Vec<(&'static str, Vec<u8>)> {
    let good = encode_idx_images(&two_images());
    let mut bad_magic = good.clone();
    bad_magic[3] = 0x01;
    let truncated = good[..20].to_vec();
    let labels = vec![0, 0, 0x08, 0x01, 0, 0, 0, 3, 7, 2, 1];
    vec![
        ("two_images.idx", good),
        ("bad_magic.idx", bad_magic),
        ("truncated.idx", truncated),
        ("labels.idx", labels),
    ]
}

/// Writes `fixtures/*.idx` and `golden/` (config plus a full run) under `out`.
pub fn gen_fixtures(out: &Path) -> Result<(), ExperimentError> {
    for (name, bytes) in idx_fixtures() {
        write_bytes(&out.join("fixtures").join(name), &bytes)?;
    }
    let golden = out.join("golden");
    write_bytes(&golden.join("config.toml"), GOLDEN_CONFIG.as_bytes())?;
    let cfg = ExperimentConfig::from_toml_str(GOLDEN_CONFIG)?;
    run_experiment(&cfg, &golden)?;
    Ok(())
}
