//! Runs every verification criterion at full size and prints one line each.
//! `TRACELAB_QUICK=1` switches to the reduced configuration.

use tracelab::verify::{run_verification, VerifyConfig};

fn main() {
    let quick = std::env::var("TRACELAB_QUICK").map_or(false, |v| v == "1");
    let cfg = VerifyConfig::new(quick);
    println!("acceptance: seed {}, quick {}", cfg.seed, cfg.quick);
    let report = run_verification(&cfg);
    for c in &report.criteria {
        println!("{}", c.summary_line());
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} passed, {failed} failed", report.criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
