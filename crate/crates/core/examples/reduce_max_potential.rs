//! Reduce-Max on a random garden: the volume and potential ledger, and the
//! invariant check over a long run.
//!
//! cargo run --release --example reduce_max_potential -- [seed] [n] [horizon]

use bamboo_garden::analysis::{check_reduce_max_invariant, ledgers};
use bamboo_garden::sampling::{random_rates, rng};
use bamboo_garden::{backlog, int, run, GameVariant, Result, StrategyRef, Trace};

fn main() -> Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let seed = args.first().copied().unwrap_or(1);
    let n = args.get(1).copied().unwrap_or(6) as usize;
    let horizon = args.get(2).copied().unwrap_or(10_000);

    let rates = random_rates(&mut rng(seed), n);
    println!("rates, fastest first: {:?}", rates.rates().iter().map(ToString::to_string).collect::<Vec<_>>());

    let short = run(&rates, GameVariant::Flush, &StrategyRef::ReduceMax, 5)?;
    for l in ledgers(&short)? {
        let phi: Vec<String> = l.potential.iter().map(ToString::to_string).collect();
        println!("t={} potential by prefix {:?}", l.step, phi);
    }

    let trace: Trace = run(&rates, GameVariant::Flush, &StrategyRef::ReduceMax, horizon)?;
    let log = check_reduce_max_invariant(&trace);
    let b = backlog(&trace)?.max_intermediate;
    println!(
        "{horizon} steps: backlog {b}, bound 4 - h1 = {}, {} violations",
        int(4) - rates.fastest(),
        log.total
    );
    assert!(log.is_empty());
    Ok(())
}
