//! Scenario-driven front end for `fieldlab`.
//!
//! A run reads a TOML scenario, executes one computation on a worker pool
//! and writes a CSV of results plus a JSON summary that echoes the fully
//! defaulted configuration.

pub mod output;
pub mod runner;
pub mod scenario;

use std::path::{Path, PathBuf};

use fieldlab::parallel::Executor;

pub use runner::{execute, Outcome};
pub use scenario::{parse_scenario, parse_scenario_for, ConfigError, RunKind, Scenario};

/// Exit code for configuration and geometry errors.
pub const EXIT_CONFIG: i32 = 1;

/// Where to write results and how many workers to use.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub run: Option<RunKind>,
    pub scenario: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Command line or environment; overrides `output.workers`.
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

/// Load, run and write outputs; returns the process exit code.
pub fn run(inv: &Invocation) -> i32 {
    let text = match &inv.scenario {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
        None => String::new(),
    };
    let mut scenario = match parse_scenario_for(&text, inv.run) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(seed) = inv.seed {
        scenario.seed = seed;
    }
    let workers = inv.workers.or(scenario.output.workers).unwrap_or(0);
    let pool = match Executor::new(workers) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = pool.install(|| execute(&scenario));
    let code = outcome.exit_code();
    let dir = inv
        .out_dir
        .clone()
        .or_else(|| scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = output::write_outputs(&dir, &scenario, &outcome, code) {
        eprintln!("error: cannot write results to {}: {e}", dir.display());
        return EXIT_CONFIG;
    }
    report(&dir, &scenario, &outcome, code);
    code
}

fn report(dir: &Path, s: &Scenario, out: &Outcome, code: i32) {
    for f in &out.fits {
        eprintln!(
            "{} exponent {:.4} ± {:.4} (95% CI [{:.4}, {:.4}], R² {:.4})",
            f.quantity.as_str(),
            f.exponent,
            f.std_error,
            f.ci_low,
            f.ci_high,
            f.r_squared
        );
    }
    for c in &out.checks {
        let status = if c.passed { "ok" } else { "FAILED" };
        eprintln!("check {}: {:.3e} ({} {:.1e}) {status}", c.name, c.value, c.sense, c.tolerance);
    }
    if let Some(e) = &out.error {
        eprintln!("error: {e}");
    }
    eprintln!(
        "{} run: {} rows written to {} (exit {code})",
        s.run_kind(),
        out.rows.len(),
        dir.join(&s.output.csv).display()
    );
}
