//! Step the game by hand, then drive it with a closure strategy.
//!
//! cargo run --example exact_engine

use bamboo_garden::reference::replay;
use bamboo_garden::{
    backlog, new_game, rat, run_with, step, GameVariant, GardenView, RateVector, Result,
};

fn main() -> Result<()> {
    let rates = RateVector::from_ratios(&[(1, 2), (1, 3), (1, 6)])?;

    let mut state = new_game(&rates, GameVariant::Flush);
    for choice in [None, Some(0), Some(1), Some(0)] {
        let (next, record) = step(&rates, &state, choice)?;
        println!("{}", serde_json::to_string(&record)?);
        state = next;
    }

    // Heights reach strategies as integer numerators over a common denominator.
    let mut round_robin = |view: &GardenView<'_>| Some(view.step as usize % view.intermediate.len());
    let trace = run_with(&rates, GameVariant::UnitRemove, &mut round_robin, 30)?;
    let report = backlog(&trace)?;
    println!(
        "round robin, unit removal: backlog {} at step {}",
        report.max_intermediate, report.argmax_step
    );

    let exact = replay(&rates, GameVariant::UnitRemove, trace.choices())?;
    assert!(trace.records().eq(exact));
    assert!(report.max_intermediate >= rat(1, 2));
    Ok(())
}
