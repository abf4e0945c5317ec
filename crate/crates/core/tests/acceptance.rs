//! Acceptance gate: every criterion at full size, one PASS/FAIL line each.
//!
//! All comparisons are exact rationals with zero tolerance. Runs without the
//! libtest harness so the lines are never captured.

use std::process::ExitCode;
use std::time::Instant;

use bamboo_garden::verify::{Harness, Suite, VerifyParams};

fn main() -> ExitCode {
    let harness = Harness::new(VerifyParams::full());
    let mut failed = Vec::new();
    for &criterion in Suite::All.criteria() {
        let started = Instant::now();
        let result = harness.check(criterion).expect("criterion runs");
        println!("{result} [{:.1}s]", started.elapsed().as_secs_f64());
        for v in &result.examples {
            println!("    {}", serde_json::to_string(v).unwrap());
        }
        if !result.passed {
            failed.push(criterion);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
