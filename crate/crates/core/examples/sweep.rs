//! A parameter sweep written as CSV, the same table `bamboo sweep` prints.
//!
//! cargo run --release --example sweep > sweep.csv

use bamboo_garden::engine::GameVariant;
use bamboo_garden::experiment::{write_sweep_csv, Family, StrategyTemplate, SweepGrid};
use bamboo_garden::{int, rat, Result};

fn main() -> Result<()> {
    let grid = SweepGrid {
        family: Family::Uniform,
        n: vec![10, 100, 1000],
        x: vec![int(2), rat(5, 2), int(3)],
        f: vec![],
        eps: vec![],
        strategies: vec![
            StrategyTemplate::ReduceFastestAtX,
            "deadline-driven".parse()?,
            "reduce-max".parse()?,
        ],
        variant: GameVariant::Flush,
        horizon: None,
        seed: 0,
        count: 1,
    };
    let rows = grid.run()?;
    write_sweep_csv(std::io::stdout().lock(), &rows)?;
    assert!(rows.iter().all(|r| r.within_theorem_bound));
    Ok(())
}
