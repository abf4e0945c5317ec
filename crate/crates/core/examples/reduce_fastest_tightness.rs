//! Reduce-Fastest(x) on n equal bamboo reaches x + (n-1)/n, just under the
//! x + 1 ceiling, which sits well below the earlier published bound.
//!
//! cargo run --release --example reduce_fastest_tightness -- [n]

use bamboo_garden::analysis::{audit_reduce_fastest, bilo_reference_bound};
use bamboo_garden::constructions::uniform;
use bamboo_garden::rational::to_f64;
use bamboo_garden::{backlog, int, rat, run, GameVariant, Result, StrategyRef};

fn main() -> Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000);
    println!("{:>6} {:>12} {:>8} {:>10} {:>8}", "x", "observed", "x+1", "reference", "windows");
    for x in [int(2), rat(5, 2), int(3), int(4)] {
        let c = uniform(n, &x)?;
        let trace = run(&c.rates, GameVariant::Flush, &StrategyRef::reduce_fastest(x.clone())?, c.critical_horizon)?;
        let observed = backlog(&trace)?.max_intermediate;
        let audit = audit_reduce_fastest(&trace, &x);
        println!(
            "{:>6} {:>12.6} {:>8.3} {:>10.4} {:>8}",
            x.to_string(),
            to_f64(&observed),
            to_f64(&(&x + int(1))),
            to_f64(&bilo_reference_bound(&x)?),
            audit.windows_audited
        );
        assert_eq!(observed, c.predicted_backlog_lower_bound);
        assert!(audit.violations.is_empty());
    }
    Ok(())
}
