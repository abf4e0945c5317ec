//! p processors via the single-processor game with rates divided by p.
//!
//! cargo run --release --example multiproc_reduction -- [p]

use bamboo_garden::multiproc::{run_reduction, MultiprocConfig};
use bamboo_garden::rational::to_f64;
use bamboo_garden::sampling::{random_multiproc_rates, rng};
use bamboo_garden::{int, Result, StrategyRef};

fn main() -> Result<()> {
    let p: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let config = MultiprocConfig::new(p, random_multiproc_rates(&mut rng(4), 4 * p, p))?;
    for strategy in [
        StrategyRef::DeadlineDriven,
        StrategyRef::ReduceMax,
        StrategyRef::reduce_fastest(int(2))?,
    ] {
        let mt = run_reduction(&config, &strategy, 3000)?;
        let multi = mt.backlog().max_intermediate;
        let single = mt.reduced_backlog()?.max_intermediate;
        println!(
            "{strategy:<20} p={p}: backlog {:.4}, reduced game {:.4}",
            to_f64(&multi),
            to_f64(&single)
        );
        assert!(multi <= single + int(1));
    }

    // Each multiprocessor step is p consecutive single-processor steps.
    let mt = run_reduction(&config, &StrategyRef::DeadlineDriven, 5)?;
    println!("cups cut in the first steps: {:?}", mt.choices());
    Ok(())
}
