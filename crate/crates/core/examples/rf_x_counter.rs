//! 900 bamboo at 1/1000 and 140 at 1/1400 defeat Reduce-Fastest(x) for
//! every x in [1, 101/100]: some bamboo passes 29/14 > 2.01.
//!
//! cargo run --release --example rf_x_counter

use bamboo_garden::constructions::rf_x_counter;
use bamboo_garden::rational::to_f64;
use bamboo_garden::{backlog, int, rat, run, GameVariant, Result, StrategyRef};

fn main() -> Result<()> {
    let c = rf_x_counter();
    for x in [int(1), rat(201, 200), rat(101, 100)] {
        let trace = run(&c.rates, GameVariant::Flush, &StrategyRef::reduce_fastest(x.clone())?, c.critical_horizon)?;
        let report = backlog(&trace)?;
        println!(
            "x={x:>7}: backlog {} ({:.4}) first at step {}, bamboo {}",
            report.max_intermediate,
            to_f64(&report.max_intermediate),
            report.argmax_step,
            report.argmax_original_index
        );
        assert!(report.max_intermediate >= c.predicted_backlog_lower_bound);
    }
    Ok(())
}
