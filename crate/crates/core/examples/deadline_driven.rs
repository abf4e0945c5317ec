//! Deadline-Driven as a scheduler: requests at height 1, deadlines at
//! height 2, served earliest first, in both the flushing and the unit
//! removal game.
//!
//! cargo run --release --example deadline_driven

use bamboo_garden::analysis::audit_dds;
use bamboo_garden::constructions::two_bamboo;
use bamboo_garden::sampling::{random_subunit_rates, rng};
use bamboo_garden::{backlog, int, rat, run, GameVariant, Result, StrategyRef};

fn main() -> Result<()> {
    let c = two_bamboo(&rat(1, 100))?;
    let trace = run(&c.rates, GameVariant::Flush, &StrategyRef::DeadlineDriven, 10_000)?;
    let audit = audit_dds(&trace);
    for done in audit.completions.iter().filter(|d| d.index == 1).take(3) {
        println!(
            "slow cup served at step {} with height {} (deadline {})",
            done.step, done.height, done.deadline
        );
    }
    let b = backlog(&trace)?.max_intermediate;
    println!("two-bamboo:1/100 backlog {b}, lower bound {}", c.predicted_backlog_lower_bound);
    assert!(b >= c.predicted_backlog_lower_bound && b < int(2));

    let mut r = rng(9);
    for variant in [GameVariant::Flush, GameVariant::UnitRemove] {
        let mut worst = int(0);
        for _ in 0..50 {
            let rates = random_subunit_rates(&mut r, 12);
            let trace = run(&rates, variant, &StrategyRef::DeadlineDriven, 5000)?;
            let audit = audit_dds(&trace);
            assert!(audit.violations.is_empty());
            worst = worst.max(backlog(&trace)?.max_intermediate);
        }
        println!("{variant}: 50 random gardens, worst backlog {worst}, no overflow");
    }
    Ok(())
}
