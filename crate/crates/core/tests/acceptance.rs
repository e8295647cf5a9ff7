//! Acceptance gate: runs every criterion of the desk profile and prints one
//! line per criterion. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use qinv::verify::{desk_profile, run_criterion, Status};

fn main() -> ExitCode {
    qinv::cli::configure_threads();
    let start = Instant::now();
    let mut failed = Vec::new();
    for criterion in desk_profile() {
        match run_criterion(&criterion) {
            Ok(outcome) => {
                let label = match outcome.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Inconclusive => "INCONCLUSIVE",
                };
                let checks: Vec<String> =
                    outcome.reports.iter().map(|r| format!("{}={}", r.check_id, r.status)).collect();
                println!("criterion {}: {label} {} [{}]", outcome.number, outcome.title, checks.join(", "));
                for report in &outcome.reports {
                    for w in &report.witnesses {
                        let at = w.exponent.as_deref().map(|e| format!(" at q^{e}")).unwrap_or_default();
                        println!("    {}: {} ({}){at}", report.check_id, w.instance, w.detail);
                    }
                }
                if outcome.status != Status::Pass {
                    failed.push(outcome.number);
                }
            }
            Err(e) => {
                println!("criterion {}: FAIL {} (error: {e})", criterion.number, criterion.title);
                failed.push(criterion.number);
            }
        }
    }
    println!(
        "acceptance: {} criteria, {} not passing, {:.1}s",
        desk_profile().len(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: not passing {failed:?}");
        ExitCode::FAILURE
    }
}
