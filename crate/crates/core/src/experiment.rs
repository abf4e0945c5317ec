//! Experiments as data: rate sources, single simulations, parameter sweeps,
//! and the files they read and write.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::bilo_reference_bound;
use crate::constructions::{Construction, ConstructionSpec};
use crate::engine::GameVariant;
use crate::error::{Error, Result};
use crate::multiproc::{run_reduction, MultiprocBacklog, MultiprocConfig, MultiprocTrace};
use crate::rates::RateVector;
use crate::rational::{self, format_rational, int, parse_rational, Rational};
use crate::run::run;
use crate::sampling::{random_multiproc_rates, random_rates, rng};
use crate::strategy::StrategyRef;
use crate::trace::{backlog, BacklogReport, Trace};

/// Where a garden's rates come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatesSource {
    /// Comma-separated rationals, in order.
    Inline(Vec<Rational>),
    /// CSV with one rate per row, optionally under a `rate` header.
    File(PathBuf),
    /// `n` seeded random rates summing to the processor count.
    Random(usize),
    Construction(ConstructionSpec),
}

impl FromStr for RatesSource {
    type Err = Error;

    /// `random:<n>`, a path to an existing file, or an inline list.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("random:") {
            let n = n
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::parse("rates", s, e))?;
            return Ok(RatesSource::Random(n));
        }
        if Path::new(s).is_file() {
            return Ok(RatesSource::File(s.into()));
        }
        match s.split(',').map(parse_rational).collect::<Result<Vec<_>>>() {
            Ok(rates) => Ok(RatesSource::Inline(rates)),
            Err(_) if s.ends_with(".csv") || s.contains(std::path::MAIN_SEPARATOR) && !s.contains(',') => {
                Err(Error::parse("rates", s, "no such file"))
            }
            Err(e) => Err(e),
        }
    }
}

/// Rates in the caller's order, plus the construction they came from.
pub fn load_rates(
    source: &RatesSource,
    processors: usize,
    seed: u64,
) -> Result<(Vec<Rational>, Option<Construction>)> {
    match source {
        RatesSource::Inline(rates) => Ok((rates.clone(), None)),
        RatesSource::File(path) => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            Ok((read_rates_csv(file)?, None))
        }
        RatesSource::Random(n) => {
            let mut r = rng(seed);
            let rates = if processors <= 1 {
                random_rates(&mut r, *n).in_original_order()
            } else {
                if *n < processors {
                    return Err(Error::OutOfDomain {
                        what: "random garden size",
                        constraint: "at least the processor count",
                        value: n.to_string(),
                    });
                }
                random_multiproc_rates(&mut r, *n, processors)
            };
            Ok((rates, None))
        }
        RatesSource::Construction(spec) => {
            let c = spec.build()?;
            Ok((c.rates.in_original_order(), Some(c)))
        }
    }
}

pub fn read_rates_csv<R: Read>(input: R) -> Result<Vec<Rational>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input);
    let mut rates = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        let Some(cell) = row.get(0).filter(|c| !c.is_empty()) else {
            continue;
        };
        if k == 0 && cell.eq_ignore_ascii_case("rate") {
            continue;
        }
        rates.push(parse_rational(cell)?);
    }
    if rates.is_empty() {
        return Err(Error::EmptyGarden);
    }
    Ok(rates)
}

pub fn write_rates_csv<W: Write>(out: W, rates: &[Rational]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rate"])?;
    for r in rates {
        w.write_record([format_rational(r)])?;
    }
    w.flush().map_err(|e| Error::io("<rates output>", e))?;
    Ok(())
}

/// Strict upper bound the strategy is guaranteed to respect, if any.
///
/// Single processor: Reduce-Max stays below `4 - h_1`, Reduce-Fastest(x)
/// below `x + 1` for `x >= 2`, Deadline-Driven below 2. Through the
/// `p`-processor reduction each bound grows by one, with Reduce-Max
/// quoted as 5.
pub fn theorem_bound(strategy: &StrategyRef, fastest: &Rational, processors: usize) -> Option<Rational> {
    let single = processors <= 1;
    match strategy {
        StrategyRef::ReduceMax if single => Some(int(4) - fastest),
        StrategyRef::ReduceMax => Some(int(5)),
        StrategyRef::ReduceFastest(x) if *x >= int(2) => {
            Some(x + int(if single { 1 } else { 2 }))
        }
        StrategyRef::ReduceFastest(_) => None,
        StrategyRef::DeadlineDriven => Some(int(if single { 2 } else { 3 })),
    }
}

/// Everything needed to run one game.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub source: RatesSource,
    pub strategy: StrategyRef,
    pub variant: GameVariant,
    /// Defaults to the construction's critical horizon, else 10000.
    pub horizon: Option<u64>,
    pub processors: usize,
    pub seed: u64,
}

pub const DEFAULT_HORIZON: u64 = 10_000;

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub strategy: String,
    pub variant: GameVariant,
    pub processors: usize,
    pub horizon: u64,
    pub bamboo: usize,
    /// In the index order the trace uses: fastest first for one processor,
    /// as given for several.
    #[serde(with = "rational::serde_str_vec")]
    pub rates: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
    #[serde(with = "rational::serde_str")]
    pub backlog: Rational,
    pub backlog_approx: f64,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rational")]
    pub theorem_bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rational")]
    pub predicted_lower_bound: Option<Rational>,
    /// True when a theorem bound applies and the run reached it.
    pub bound_violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single: Option<BacklogReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiproc: Option<MultiprocBacklog>,
}

fn opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug)]
pub enum RunTrace {
    Single(Trace),
    Multiproc(MultiprocTrace),
}

impl RunTrace {
    /// JSON lines, one step each; multiprocessor steps carry `cut_indices`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        match self {
            RunTrace::Single(t) => t.write_jsonl(out),
            RunTrace::Multiproc(t) => {
                for rec in t.records()? {
                    serde_json::to_writer(&mut out, &rec)?;
                    out.write_all(b"\n").map_err(|e| Error::io("<trace output>", e))?;
                }
                Ok(())
            }
        }
    }
}

pub fn simulate(spec: &ExperimentSpec) -> Result<(SimulationReport, RunTrace)> {
    if spec.processors == 0 {
        return Err(Error::ZeroProcessors);
    }
    let (rates, construction) = load_rates(&spec.source, spec.processors, spec.seed)?;
    let horizon = spec
        .horizon
        .or(construction.as_ref().map(|c| c.critical_horizon))
        .unwrap_or(DEFAULT_HORIZON);
    let bamboo = rates.len();
    let (backlog_value, fastest, single, multi, trace, rates) = if spec.processors == 1 {
        let rv = RateVector::new(rates)?;
        let trace = run(&rv, spec.variant, &spec.strategy, horizon)?;
        let report = backlog(&trace)?;
        (
            report.max_intermediate.clone(),
            rv.fastest().clone(),
            Some(report),
            None,
            RunTrace::Single(trace),
            rv.rates().to_vec(),
        )
    } else {
        if spec.variant != GameVariant::Flush {
            return Err(Error::OutOfDomain {
                what: "variant",
                constraint: "flush when processors > 1",
                value: spec.variant.to_string(),
            });
        }
        let config = MultiprocConfig::new(spec.processors, rates)?;
        let mt = run_reduction(&config, &spec.strategy, horizon)?;
        let b = mt.backlog();
        let fastest = config.rates().iter().max().cloned().unwrap_or_default();
        let rates = config.rates().to_vec();
        (b.max_intermediate.clone(), fastest, None, Some(b), RunTrace::Multiproc(mt), rates)
    };
    let bound = theorem_bound(&spec.strategy, &fastest, spec.processors);
    let report = SimulationReport {
        strategy: spec.strategy.to_string(),
        variant: spec.variant,
        processors: spec.processors,
        horizon,
        bamboo,
        rates,
        construction: construction.as_ref().map(|c| c.name.clone()),
        backlog_approx: rational::to_f64(&backlog_value),
        bound_violated: bound.as_ref().is_some_and(|b| backlog_value >= *b),
        backlog: backlog_value,
        theorem_bound: bound,
        predicted_lower_bound: construction.map(|c| c.predicted_backlog_lower_bound),
        single,
        multiproc: multi,
    };
    Ok((report, trace))
}

/// Write `trace.jsonl` and `report.json` into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, report: &SimulationReport, trace: &RunTrace) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let trace_path = dir.join("trace.jsonl");
    let file = File::create(&trace_path).map_err(|e| Error::io(&trace_path, e))?;
    let mut out = BufWriter::new(file);
    trace.write_jsonl(&mut out)?;
    out.flush().map_err(|e| Error::io(&trace_path, e))?;
    let report_path = dir.join("report.json");
    let file = File::create(&report_path).map_err(|e| Error::io(&report_path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), report)?;
    Ok(())
}

/// Read a single-processor trace back from JSON lines.
pub fn read_trace(path: &Path, rates: RateVector, variant: GameVariant) -> Result<Trace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Trace::read_jsonl(rates, variant, BufReader::new(file))
}

/// Strategy grammar extended with `reduce-fastest:x`, bound per grid cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyTemplate {
    Fixed(StrategyRef),
    ReduceFastestAtX,
}

impl FromStr for StrategyTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "reduce-fastest:x" {
            Ok(StrategyTemplate::ReduceFastestAtX)
        } else {
            s.parse().map(StrategyTemplate::Fixed)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Uniform,
    TwoBamboo,
    Rf1FastSlow,
    RfXCounter,
    Random,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => Family::Uniform,
            "two-bamboo" => Family::TwoBamboo,
            "rf1-fast-slow" => Family::Rf1FastSlow,
            "rf-x-counter" => Family::RfXCounter,
            "random" => Family::Random,
            _ => {
                return Err(Error::parse(
                    "family",
                    s,
                    "expected uniform, two-bamboo, rf1-fast-slow, rf-x-counter or random",
                ))
            }
        })
    }
}

/// Cartesian grid of games. `x` feeds both `uniform` and `reduce-fastest:x`.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub family: Family,
    pub n: Vec<u64>,
    pub x: Vec<Rational>,
    pub f: Vec<u64>,
    pub eps: Vec<Rational>,
    pub strategies: Vec<StrategyTemplate>,
    pub variant: GameVariant,
    /// Defaults to each construction's critical horizon, else 10000.
    pub horizon: Option<u64>,
    pub seed: u64,
    /// Random vectors per `n`, for the random family.
    pub count: usize,
}

#[derive(Clone, Debug)]
struct Cell {
    params: String,
    rates: RateVector,
    construction: Option<Construction>,
    strategy: StrategyRef,
    horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub params: String,
    pub strategy: String,
    pub variant: String,
    pub horizon: u64,
    pub observed_backlog: String,
    pub observed_backlog_approx: f64,
    pub theorem_bound: String,
    pub reference_bound: String,
    pub construction_lower_bound: String,
    pub within_theorem_bound: bool,
}

impl SweepGrid {
    fn cells(&self) -> Result<Vec<Cell>> {
        let mut gardens: Vec<(String, Option<Rational>, RateVector, Option<Construction>)> = Vec::new();
        let mut push = |params: String, x: Option<Rational>, c: Construction| {
            gardens.push((params, x, c.rates.clone(), Some(c)));
        };
        match self.family {
            Family::Uniform => {
                for &n in &self.n {
                    for x in &self.x {
                        let c = crate::constructions::uniform(n, x)?;
                        push(format!("n={n} x={}", format_rational(x)), Some(x.clone()), c);
                    }
                }
            }
            Family::TwoBamboo => {
                for eps in &self.eps {
                    let c = crate::constructions::two_bamboo(eps)?;
                    push(format!("eps={}", format_rational(eps)), None, c);
                }
            }
            Family::Rf1FastSlow => {
                for &f in &self.f {
                    push(format!("f={f}"), None, crate::constructions::rf1_fast_slow(f)?);
                }
            }
            Family::RfXCounter => push(String::new(), None, crate::constructions::rf_x_counter()),
            Family::Random => {
                let mut r = rng(self.seed);
                for &n in &self.n {
                    for k in 0..self.count {
                        let rv = random_rates(&mut r, n as usize);
                        gardens.push((format!("n={n} k={k}"), None, rv, None));
                    }
                }
            }
        }
        let mut cells = Vec::new();
        for (params, x, rates, construction) in gardens {
            let horizon = self
                .horizon
                .or(construction.as_ref().map(|c| c.critical_horizon))
                .unwrap_or(DEFAULT_HORIZON);
            for template in &self.strategies {
                let strategies: Vec<(String, StrategyRef)> = match (template, &x) {
                    (StrategyTemplate::Fixed(s), _) => vec![(params.clone(), s.clone())],
                    (StrategyTemplate::ReduceFastestAtX, Some(x)) => {
                        vec![(params.clone(), StrategyRef::reduce_fastest(x.clone())?)]
                    }
                    (StrategyTemplate::ReduceFastestAtX, None) => self
                        .x
                        .iter()
                        .map(|x| {
                            let p = format!("{params} x={}", format_rational(x));
                            Ok((p.trim().to_string(), StrategyRef::reduce_fastest(x.clone())?))
                        })
                        .collect::<Result<_>>()?,
                };
                for (params, strategy) in strategies {
                    cells.push(Cell {
                        params,
                        rates: rates.clone(),
                        construction: construction.clone(),
                        strategy,
                        horizon,
                    });
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(cells)
    }

    /// One row per cell, in grid order; cells run in parallel.
    pub fn run(&self) -> Result<Vec<SweepRow>> {
        let family = match self.family {
            Family::Uniform => "uniform",
            Family::TwoBamboo => "two-bamboo",
            Family::Rf1FastSlow => "rf1-fast-slow",
            Family::RfXCounter => "rf-x-counter",
            Family::Random => "random",
        };
        let opt = |v: Option<Rational>| v.map(|r| format_rational(&r)).unwrap_or_default();
        self.cells()?
            .into_par_iter()
            .map(|cell| {
                let trace = run(&cell.rates, self.variant, &cell.strategy, cell.horizon)?;
                let observed = backlog(&trace)?.max_intermediate;
                let bound = theorem_bound(&cell.strategy, cell.rates.fastest(), 1);
                let reference = match cell.strategy.threshold() {
                    Some(x) if *x > int(1) => Some(bilo_reference_bound(x)?),
                    _ => None,
                };
                Ok(SweepRow {
                    family: family.to_string(),
                    params: cell.params,
                    strategy: cell.strategy.to_string(),
                    variant: self.variant.to_string(),
                    horizon: cell.horizon,
                    observed_backlog_approx: rational::to_f64(&observed),
                    within_theorem_bound: bound.as_ref().is_none_or(|b| observed < *b),
                    observed_backlog: format_rational(&observed),
                    theorem_bound: opt(bound),
                    reference_bound: opt(reference),
                    construction_lower_bound: opt(cell.construction.map(|c| c.predicted_backlog_lower_bound)),
                })
            })
            .collect()
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<sweep output>", e))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionSidecar {
    pub name: String,
    pub bamboo: usize,
    #[serde(with = "rational::serde_str")]
    pub predicted_backlog_lower_bound: Rational,
    pub critical_horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_strategy: Option<String>,
}

impl From<&Construction> for ConstructionSidecar {
    fn from(c: &Construction) -> Self {
        ConstructionSidecar {
            name: c.name.clone(),
            bamboo: c.rates.len(),
            predicted_backlog_lower_bound: c.predicted_backlog_lower_bound.clone(),
            critical_horizon: c.critical_horizon,
            target_strategy: c.target.as_ref().map(|s| s.to_string()),
        }
    }
}

/// Write the rates CSV at `path` and the JSON sidecar next to it.
pub fn write_construction(path: &Path, c: &Construction) -> Result<PathBuf> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_rates_csv(BufWriter::new(file), &c.rates.in_original_order())?;
    let sidecar = path.with_extension("json");
    let file = File::create(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &ConstructionSidecar::from(c))?;
    Ok(sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rates_source_grammar() {
        assert_eq!(
            "1/2,1/2".parse::<RatesSource>().unwrap(),
            RatesSource::Inline(vec![rat(1, 2), rat(1, 2)])
        );
        assert_eq!("random:7".parse::<RatesSource>().unwrap(), RatesSource::Random(7));
        assert!("no/such/file.csv".parse::<RatesSource>().is_err());
        assert!("1/2,x".parse::<RatesSource>().is_err());
    }

    #[test]
    fn rates_csv_round_trip() {
        let rates = vec![rat(1, 3), rat(1, 2), rat(1, 6)];
        let mut buf = Vec::new();
        write_rates_csv(&mut buf, &rates).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "rate\n1/3\n1/2\n1/6\n");
        assert_eq!(read_rates_csv(buf.as_slice()).unwrap(), rates);
        assert_eq!(read_rates_csv("1/4\n# c\n3/4\n".as_bytes()).unwrap(), vec![rat(1, 4), rat(3, 4)]);
        assert!(matches!(read_rates_csv("rate\n".as_bytes()), Err(Error::EmptyGarden)));
    }

    #[test]
    fn simulate_two_halves_one_step() {
        let spec = ExperimentSpec {
            source: "1/2,1/2".parse().unwrap(),
            strategy: StrategyRef::ReduceMax,
            variant: GameVariant::Flush,
            horizon: Some(1),
            processors: 1,
            seed: 0,
        };
        let (report, _) = simulate(&spec).unwrap();
        assert_eq!(report.backlog, rat(1, 2));
        assert_eq!(report.theorem_bound, Some(rat(7, 2)));
        assert!(!report.bound_violated);
    }

    #[test]
    fn simulate_rf_x_counter() {
        let spec = ExperimentSpec {
            source: RatesSource::Construction(ConstructionSpec::RfXCounter),
            strategy: "reduce-fastest:1/1".parse().unwrap(),
            variant: GameVariant::Flush,
            horizon: Some(3000),
            processors: 1,
            seed: 0,
        };
        let (report, _) = simulate(&spec).unwrap();
        assert!(report.backlog >= rat(29, 14));
        assert_eq!(report.theorem_bound, None);
    }

    #[test]
    fn simulate_multiproc() {
        let spec = ExperimentSpec {
            source: RatesSource::Random(8),
            strategy: StrategyRef::DeadlineDriven,
            variant: GameVariant::Flush,
            horizon: Some(400),
            processors: 2,
            seed: 3,
        };
        let (report, trace) = simulate(&spec).unwrap();
        assert!(report.backlog < int(3));
        assert_eq!(report.theorem_bound, Some(int(3)));
        let mut out = Vec::new();
        trace.write_jsonl(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 400);
    }

    #[test]
    fn sweep_uniform_x() {
        let grid = SweepGrid {
            family: Family::Uniform,
            n: vec![1000],
            x: vec![int(2), int(3), int(4)],
            f: vec![],
            eps: vec![],
            strategies: vec![StrategyTemplate::ReduceFastestAtX],
            variant: GameVariant::Flush,
            horizon: None,
            seed: 0,
            count: 1,
        };
        let rows = grid.run().unwrap();
        assert_eq!(rows.len(), 3);
        for (row, x) in rows.iter().zip([2, 3, 4]) {
            let observed = parse_rational(&row.observed_backlog).unwrap();
            assert!(observed >= int(x + 1) - rat(1, 1000) && observed < int(x + 1));
            assert!(row.within_theorem_bound);
            assert_eq!(row.theorem_bound, format_rational(&int(x + 1)));
        }
        assert_eq!(rows[0].reference_bound, "19/6");
    }

    #[test]
    fn sweep_two_bamboo_dds() {
        let grid = SweepGrid {
            family: Family::TwoBamboo,
            n: vec![],
            x: vec![],
            f: vec![],
            eps: vec![rat(1, 10), rat(1, 100)],
            strategies: vec![StrategyTemplate::Fixed(StrategyRef::DeadlineDriven)],
            variant: GameVariant::Flush,
            horizon: Some(10_000),
            seed: 0,
            count: 1,
        };
        let rows = grid.run().unwrap();
        for (row, eps) in rows.iter().zip([rat(1, 10), rat(1, 100)]) {
            let observed = parse_rational(&row.observed_backlog).unwrap();
            assert!(observed >= int(2) - int(2) * eps && observed < int(2));
        }
        let mut out = Vec::new();
        write_sweep_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("family,params,strategy,variant,horizon,observed_backlog,"));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let grid = SweepGrid {
            family: Family::Uniform,
            n: vec![10],
            x: vec![],
            f: vec![],
            eps: vec![],
            strategies: vec![StrategyTemplate::Fixed(StrategyRef::ReduceMax)],
            variant: GameVariant::Flush,
            horizon: None,
            seed: 0,
            count: 1,
        };
        assert!(matches!(grid.run(), Err(Error::EmptyGrid)));
    }
}
