//! The `bamboo` command line.
//!
//! Exit status: 0 on success, 1 when a run breaks a bound it is guaranteed
//! to respect, 2 on bad input.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::constructions::ConstructionSpec;
use crate::engine::GameVariant;
use crate::error::{Error, Result};
use crate::experiment::{
    simulate, write_artifacts, write_construction, write_rates_csv, write_sweep_csv, ExperimentSpec,
    Family, RatesSource, StrategyTemplate, SweepGrid,
};
use crate::rational::{format_rational, to_f64, Rational};
use crate::strategy::StrategyRef;
use crate::verify::{cut_slowest, Harness, Suite, VerifyParams};

#[derive(Debug, Parser)]
#[command(name = "bamboo", version, about = "Exact bamboo garden trimming games and their backlog bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one game and report its backlog.
    Simulate(SimulateArgs),
    /// Run a grid of games and write one CSV row per cell.
    Sweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Write the rates of an adversarial construction.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Inline list ("1/2,1/2"), a CSV file, or random:<n>.
    #[arg(long, required_unless_present = "construction", conflicts_with = "construction")]
    pub rates: Option<RatesSource>,
    /// two-bamboo:<eps>, uniform:<n>:<x>, rf1-fast-slow:<f> or rf-x-counter.
    #[arg(long)]
    pub construction: Option<ConstructionSpec>,
    /// reduce-max, reduce-fastest:<x> or deadline-driven.
    #[arg(long)]
    pub strategy: StrategyRef,
    /// flush or unit.
    #[arg(long, default_value = "flush")]
    pub variant: GameVariant,
    /// Defaults to the construction's critical horizon, else 10000.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub processors: u64,
    /// Directory for trace.jsonl and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// uniform, two-bamboo, rf1-fast-slow, rf-x-counter or random.
    #[arg(long)]
    pub family: Family,
    /// Strategies; reduce-fastest:x takes x from the grid.
    #[arg(long, value_delimiter = ',', required = true)]
    pub strategy: Vec<StrategyTemplate>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<Rational>,
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<Rational>,
    #[arg(long, default_value = "flush")]
    pub variant: GameVariant,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: Option<u64>,
    /// Random vectors per n, for the random family.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// reduce-max, reduce-fastest, deadline-driven, multiproc, oracle or all.
    pub suite: Suite,
    /// Small instance families, for smoke tests.
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_broken_strategy: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub name: ConstructionSpec,
    /// CSV path; a JSON sidecar is written next to it. Stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    main_from(std::env::args_os())
}

pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means a bound was broken.
fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Construct(a) => cmd_construct(a),
    }
}

/// `println!` that tolerates a closed stdout, as when piped into `head`.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    }};
}

fn approx(r: &Rational) -> String {
    format!("{} (~{:.6})", format_rational(r), to_f64(r))
}

fn cmd_simulate(a: SimulateArgs) -> Result<bool> {
    let source = match (a.rates, a.construction) {
        (Some(r), _) => r,
        (None, Some(c)) => RatesSource::Construction(c),
        (None, None) => unreachable!("clap requires one of --rates and --construction"),
    };
    let spec = ExperimentSpec {
        source,
        strategy: a.strategy,
        variant: a.variant,
        horizon: a.horizon,
        processors: a.processors as usize,
        seed: a.seed,
    };
    let (report, trace) = simulate(&spec)?;
    say!("backlog {}", approx(&report.backlog));
    if let Some(s) = &report.single {
        say!(
            "reached at step {} by bamboo {} (input position {})",
            s.argmax_step, s.argmax_index, s.argmax_original_index
        );
    }
    if let Some(m) = &report.multiproc {
        say!("reached at step {} by cup {}", m.argmax_step, m.argmax_index);
    }
    if let Some(b) = &report.predicted_lower_bound {
        say!("construction lower bound {}", approx(b));
    }
    match &report.theorem_bound {
        Some(b) if report.bound_violated => say!("theorem bound {} VIOLATED", approx(b)),
        Some(b) => say!("theorem bound {} respected", approx(b)),
        None => say!("no theorem bound applies"),
    }
    if let Some(dir) = &a.out {
        write_artifacts(dir, &report, &trace)?;
        say!("wrote {}", dir.display());
    }
    Ok(!report.bound_violated)
}

fn cmd_sweep(a: SweepArgs) -> Result<bool> {
    let grid = SweepGrid {
        family: a.family,
        n: a.n,
        x: a.x,
        f: a.f,
        eps: a.eps,
        strategies: a.strategy,
        variant: a.variant,
        horizon: a.horizon,
        seed: a.seed,
        count: a.count,
    };
    let rows = grid.run()?;
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            write_sweep_csv(BufWriter::new(file), &rows)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_sweep_csv(io::stdout().lock(), &rows)?,
    }
    Ok(rows.iter().all(|r| r.within_theorem_bound))
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let mut params = if a.quick {
        VerifyParams::quick()
    } else {
        VerifyParams::full()
    };
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    let mut harness = Harness::new(params);
    if a.inject_broken_strategy {
        harness = harness.with_override(cut_slowest);
    }
    let mut results = Vec::new();
    for &criterion in a.suite.criteria() {
        let r = harness.check(criterion)?;
        say!("{r}");
        for v in &r.examples {
            say!("    {}", serde_json::to_string(v)?);
        }
        results.push(r);
    }
    if let Some(path) = &a.json {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &results)?;
    }
    Ok(results.iter().all(|r| r.passed))
}

fn cmd_construct(a: ConstructArgs) -> Result<bool> {
    let c = a.name.build()?;
    match &a.out {
        Some(path) => {
            let sidecar = write_construction(path, &c)?;
            say!(
                "{}: {} rates, lower bound {}, critical horizon {}",
                c.name,
                c.rates.len(),
                approx(&c.predicted_backlog_lower_bound),
                c.critical_horizon
            );
            say!("wrote {} and {}", path.display(), sidecar.display());
        }
        None => {
            let mut out = io::stdout().lock();
            write_rates_csv(&mut out, &c.rates.in_original_order())?;
            out.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_from(["bamboo", "verify", "bogus-name"]), ExitCode::from(2));
        assert_eq!(
            main_from(["bamboo", "simulate", "--rates", "1/2", "--strategy", "reduce-max", "--horizon", "0"]),
            ExitCode::from(2)
        );
        assert_eq!(main_from(["bamboo", "construct", "uniform:0:2"]), ExitCode::from(2));
    }
}
