//! f fast and sqrt(f) + 1 slow bamboo push Reduce-Fastest(1) towards 3.
//!
//! cargo run --release --example rf1_counterexample -- [f]

use bamboo_garden::constructions::rf1_fast_slow;
use bamboo_garden::rational::to_f64;
use bamboo_garden::{backlog, int, run, GameVariant, Result};

fn main() -> Result<()> {
    let sizes: Vec<u64> = match std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        Some(f) => vec![f],
        None => vec![4, 100, 2500, 10_000],
    };
    for f in sizes {
        let c = rf1_fast_slow(f)?;
        let strategy = c.target.clone().expect("targets reduce-fastest:1");
        let trace = run(&c.rates, GameVariant::Flush, &strategy, c.critical_horizon)?;
        let report = backlog(&trace)?;
        println!(
            "f={f:>6}: {} bamboo, backlog {:.6} at step {} (predicted {:.6}, gap to 3 {:.6})",
            c.rates.len(),
            to_f64(&report.max_intermediate),
            report.argmax_step,
            to_f64(&c.predicted_backlog_lower_bound),
            to_f64(&(int(3) - &report.max_intermediate)),
        );
        assert!(report.max_intermediate >= c.predicted_backlog_lower_bound);
    }
    Ok(())
}
