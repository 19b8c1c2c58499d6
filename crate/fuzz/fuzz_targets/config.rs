#![no_main]

use irgd_bench::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_toml_str(text) {
        let cells = cfg.problem.sizes.len()
            * cfg.problem.seeds.len()
            * cfg.solver.algorithms.len()
            * cfg.solver.schedules.len()
            * (cfg.solver.nu.len() + cfg.solver.rho.len()).max(1);
        if cells <= 10_000 {
            let grid = cfg.expand();
            for spec in &grid {
                let _ = cfg.run_digest(spec);
            }
        }
        let _ = cfg.digest();
    }
});
