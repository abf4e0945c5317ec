//! Verification suites: each criterion runs a family of games and checks
//! the bound the corresponding strategy guarantees, exactly.
//!
//! Instances run in parallel; results are gathered in a fixed order so the
//! reports are deterministic.

use std::sync::OnceLock;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    audit_dds, audit_reduce_fastest, bilo_reference_bound, check_reduce_max_invariant, Violation,
};
use crate::constructions::{rf1_fast_slow, rf_x_counter, two_bamboo, uniform, Construction};
use crate::engine::GameVariant;
use crate::error::{Error, Result};
use crate::multiproc::{run_reduction, MultiprocConfig};
use crate::rates::RateVector;
use crate::rational::{format_rational, int, rat, to_f64, Rational};
use crate::reference::run_naive;
use crate::run::{run, run_with};
use crate::sampling::{random_multiproc_rates, random_subunit_rates, random_suite, rng};
use crate::strategy::{GardenView, StrategyRef};
use crate::trace::{backlog, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ReduceMax,
    ReduceFastest,
    DeadlineDriven,
    Multiproc,
    Oracle,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "reduce-max",
        "reduce-fastest",
        "deadline-driven",
        "multiproc",
        "oracle",
        "all",
    ];

    pub fn criteria(self) -> &'static [Criterion] {
        use Criterion::*;
        match self {
            Suite::ReduceMax => &[C1],
            Suite::ReduceFastest => &[C2, C3, C4, C5, C7, C9],
            Suite::DeadlineDriven => &[C6],
            Suite::Multiproc => &[C8],
            Suite::Oracle => &[C10],
            Suite::All => &[C1, C2, C3, C4, C5, C6, C7, C8, C9, C10],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "reduce-max" => Suite::ReduceMax,
            "reduce-fastest" => Suite::ReduceFastest,
            "deadline-driven" => Suite::DeadlineDriven,
            "multiproc" => Suite::Multiproc,
            "oracle" => Suite::Oracle,
            "all" => Suite::All,
            _ => return Err(Error::UnknownSuite(s.to_string())),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Suite::NAMES
            .iter()
            .position(|n| n.parse::<Suite>().ok() == Some(*self))
            .expect("every suite is named");
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Criterion {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
}

impl Criterion {
    pub fn title(self) -> &'static str {
        match self {
            Criterion::C1 => "reduce-max potential invariant",
            Criterion::C2 => "reduce-fastest(2) stays below 3 and reaches 2999/1000",
            Criterion::C3 => "reduce-fastest(x) on uniform(1000, x) lands in [x+1-1/1000, x+1)",
            Criterion::C4 => "reduce-fastest(1) is pushed towards 3 by fast and slow bamboo",
            Criterion::C5 => "reduce-fastest(x <= 101/100) is pushed to 29/14",
            Criterion::C6 => "deadline-driven never overflows",
            Criterion::C7 => "reduce-fastest waiting windows respect fill rates",
            Criterion::C8 => "multiprocessor reduction bounds",
            Criterion::C9 => "reference bound at x = 2 is 19/6",
            Criterion::C10 => "naive engine reproduces the fast engine",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Sizes of the instance families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyParams {
    pub seed: u64,
    pub random_count: usize,
    pub max_n: usize,
    pub horizon: u64,
    /// Cap on construction horizons; each runs `max(critical, horizon)` steps up to this.
    pub construction_horizon_cap: u64,
    pub multiproc_configs: usize,
    pub multiproc_horizon: u64,
    pub oracle_instances: usize,
    pub oracle_max_n: usize,
    pub oracle_max_horizon: u64,
    /// Include the 10101-bamboo construction.
    pub large_constructions: bool,
}

impl VerifyParams {
    pub fn full() -> Self {
        VerifyParams {
            seed: 2024,
            random_count: 200,
            max_n: 50,
            horizon: 10_000,
            construction_horizon_cap: u64::MAX,
            multiproc_configs: 20,
            multiproc_horizon: 2000,
            oracle_instances: 100,
            oracle_max_n: 10,
            oracle_max_horizon: 1000,
            large_constructions: true,
        }
    }

    /// A few seconds' worth, for smoke tests. Criteria that need long runs
    /// to reach their lower bounds still get them.
    pub fn quick() -> Self {
        VerifyParams {
            random_count: 10,
            max_n: 20,
            horizon: 1000,
            construction_horizon_cap: 5000,
            multiproc_configs: 3,
            multiproc_horizon: 300,
            oracle_instances: 5,
            oracle_max_horizon: 200,
            large_constructions: false,
            ..Self::full()
        }
    }
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// A few of the violations found, if any.
    pub examples: Vec<Violation>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} {}: {}", self.criterion, self.title, self.detail)
    }
}

/// Strategy substituted for every single-processor run except the oracle comparison.
pub type Override = fn(&GardenView<'_>) -> Option<usize>;

/// Cut the slowest bamboo every step; breaks every bound.
pub fn cut_slowest(view: &GardenView<'_>) -> Option<usize> {
    view.intermediate.len().checked_sub(1)
}

pub struct Harness {
    params: VerifyParams,
    strategy_override: Option<Override>,
    rf_runs: OnceLock<Vec<RfRun>>,
}

struct RfRun {
    label: String,
    x: Rational,
    backlog: Rational,
    audit_total: u64,
    first_violation: Option<Violation>,
    windows: u64,
    uniform_n: Option<u64>,
}

const EXAMPLES: usize = 3;

impl Harness {
    pub fn new(params: VerifyParams) -> Self {
        Harness {
            params,
            strategy_override: None,
            rf_runs: OnceLock::new(),
        }
    }

    pub fn with_override(mut self, strategy: Override) -> Self {
        self.strategy_override = Some(strategy);
        self
    }

    pub fn params(&self) -> &VerifyParams {
        &self.params
    }

    pub fn run_suite(&self, suite: Suite) -> Result<Vec<CriterionResult>> {
        suite.criteria().iter().map(|&c| self.check(c)).collect()
    }

    pub fn check(&self, criterion: Criterion) -> Result<CriterionResult> {
        let (passed, detail, examples) = match criterion {
            Criterion::C1 => self.reduce_max_invariant()?,
            Criterion::C2 => self.rf_two()?,
            Criterion::C3 => self.rf_uniform()?,
            Criterion::C4 => self.rf_one()?,
            Criterion::C5 => self.rf_counter()?,
            Criterion::C6 => self.dds()?,
            Criterion::C7 => self.rf_windows()?,
            Criterion::C8 => self.multiproc()?,
            Criterion::C9 => reference_bound()?,
            Criterion::C10 => self.oracle()?,
        };
        Ok(CriterionResult {
            criterion,
            title: criterion.title(),
            passed,
            detail,
            examples,
        })
    }

    fn drive(
        &self,
        rates: &RateVector,
        variant: GameVariant,
        strategy: &StrategyRef,
        horizon: u64,
    ) -> Result<Trace> {
        match self.strategy_override {
            Some(mut f) => run_with(rates, variant, &mut f, horizon),
            None => run(rates, variant, strategy, horizon),
        }
    }

    fn random_suite(&self) -> Vec<RateVector> {
        random_suite(self.params.seed, self.params.random_count, 2..=self.params.max_n)
    }

    fn constructions(&self) -> Vec<Construction> {
        let mut out = vec![
            two_bamboo(&rat(1, 100)).expect("valid"),
            two_bamboo(&rat(1, 10)).expect("valid"),
            uniform(100, &int(2)).expect("valid"),
            uniform(1000, &int(2)).expect("valid"),
            rf1_fast_slow(4).expect("valid"),
            rf_x_counter(),
        ];
        if self.params.large_constructions {
            out.push(rf1_fast_slow(10_000).expect("valid"));
        }
        out
    }

    fn construction_horizon(&self, c: &Construction) -> u64 {
        c.critical_horizon
            .max(self.params.horizon)
            .min(self.params.construction_horizon_cap.max(c.critical_horizon))
    }

    fn reduce_max_invariant(&self) -> Result<(bool, String, Vec<Violation>)> {
        let suite = self.random_suite();
        let results = suite
            .par_iter()
            .map(|rv| {
                let trace = self.drive(rv, GameVariant::Flush, &StrategyRef::ReduceMax, self.params.horizon)?;
                let log = check_reduce_max_invariant(&trace);
                let b = backlog(&trace)?.max_intermediate;
                Ok((log, b))
            })
            .collect::<Result<Vec<_>>>()?;
        let total: u64 = results.iter().map(|(l, _)| l.total).sum();
        let worst = results.iter().map(|(_, b)| b).max().cloned().unwrap_or_default();
        let examples = results
            .iter()
            .flat_map(|(l, _)| l.recorded.iter().cloned())
            .take(EXAMPLES)
            .collect();
        let detail = format!(
            "{} vectors x {} steps, {total} violations, largest backlog {:.4}",
            suite.len(),
            self.params.horizon,
            to_f64(&worst)
        );
        Ok((total == 0, detail, examples))
    }

    fn rf_runs(&self) -> Result<&[RfRun]> {
        if let Some(runs) = self.rf_runs.get() {
            return Ok(runs);
        }
        let mut jobs: Vec<(String, RateVector, Rational, u64, Option<u64>)> = Vec::new();
        for (k, rv) in self.random_suite().into_iter().enumerate() {
            jobs.push((format!("random #{k}"), rv, int(2), self.params.horizon, None));
        }
        for c in self.constructions() {
            let h = self.construction_horizon(&c);
            jobs.push((c.name.clone(), c.rates, int(2), h, None));
        }
        for x in [2, 3, 4] {
            let c = uniform(1000, &int(x)).expect("valid");
            jobs.push((c.name.clone(), c.rates, int(x), c.critical_horizon, Some(1000)));
        }
        let runs = jobs
            .into_par_iter()
            .map(|(label, rv, x, horizon, uniform_n)| {
                let strategy = StrategyRef::ReduceFastest(x.clone());
                let trace = self.drive(&rv, GameVariant::Flush, &strategy, horizon)?;
                let audit = audit_reduce_fastest(&trace, &x);
                Ok(RfRun {
                    label,
                    backlog: backlog(&trace)?.max_intermediate,
                    audit_total: audit.violations.total,
                    first_violation: audit.violations.recorded.first().cloned(),
                    windows: audit.windows_audited,
                    x,
                    uniform_n,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.rf_runs.get_or_init(|| runs))
    }

    fn rf_two(&self) -> Result<(bool, String, Vec<Violation>)> {
        let runs = self.rf_runs()?;
        let at_two: Vec<&RfRun> = runs.iter().filter(|r| r.x == int(2) && r.uniform_n.is_none()).collect();
        let tall: Vec<&str> = at_two
            .iter()
            .filter(|r| r.backlog >= int(3))
            .map(|r| r.label.as_str())
            .collect();
        let worst = at_two.iter().map(|r| &r.backlog).max().cloned().unwrap_or_default();
        let lower = runs
            .iter()
            .find(|r| r.uniform_n == Some(1000) && r.x == int(2))
            .expect("uniform(1000, 2) is always run");
        let target = rat(2999, 1000);
        let passed = tall.is_empty() && lower.backlog >= target;
        let detail = format!(
            "{} traces, largest backlog {} ({:.4}), {} at or above 3; uniform(1000, 2) reached {} (need >= 2999/1000)",
            at_two.len(),
            format_rational(&worst),
            to_f64(&worst),
            tall.len(),
            format_rational(&lower.backlog),
        );
        Ok((passed, detail, Vec::new()))
    }

    fn rf_uniform(&self) -> Result<(bool, String, Vec<Violation>)> {
        let runs = self.rf_runs()?;
        let mut passed = true;
        let mut parts = Vec::new();
        for r in runs.iter().filter(|r| r.uniform_n.is_some()) {
            let top = &r.x + int(1);
            let ok = r.backlog >= &top - rat(1, 1000) && r.backlog < top;
            passed &= ok;
            parts.push(format!("x={} -> {}", format_rational(&r.x), format_rational(&r.backlog)));
        }
        Ok((passed, parts.join(", "), Vec::new()))
    }

    fn rf_windows(&self) -> Result<(bool, String, Vec<Violation>)> {
        let runs = self.rf_runs()?;
        let total: u64 = runs.iter().map(|r| r.audit_total).sum();
        let windows: u64 = runs.iter().map(|r| r.windows).sum();
        let examples = runs
            .iter()
            .filter_map(|r| r.first_violation.clone())
            .take(EXAMPLES)
            .collect();
        let bad: Vec<&str> = runs
            .iter()
            .filter(|r| r.audit_total > 0)
            .map(|r| r.label.as_str())
            .take(EXAMPLES)
            .collect();
        let mut detail = format!("{} traces, {windows} windows, {total} violations", runs.len());
        if !bad.is_empty() {
            detail += &format!(" (first in {})", bad.join(", "));
        }
        Ok((total == 0, detail, examples))
    }

    fn rf_one(&self) -> Result<(bool, String, Vec<Violation>)> {
        let f = if self.params.large_constructions { 10_000 } else { 100 };
        let c = rf1_fast_slow(f)?;
        let trace = self.drive(&c.rates, GameVariant::Flush, &StrategyRef::ReduceFastest(int(1)), c.critical_horizon)?;
        let b = backlog(&trace)?.max_intermediate;
        let passed = b >= c.predicted_backlog_lower_bound;
        let detail = format!(
            "{} over {} steps reached {} ({:.4}), need >= {}",
            c.name,
            c.critical_horizon,
            format_rational(&b),
            to_f64(&b),
            format_rational(&c.predicted_backlog_lower_bound)
        );
        Ok((passed, detail, Vec::new()))
    }

    fn rf_counter(&self) -> Result<(bool, String, Vec<Violation>)> {
        let c = rf_x_counter();
        let xs = [int(1), rat(201, 200), rat(101, 100)];
        let results = xs
            .par_iter()
            .map(|x| {
                let s = StrategyRef::ReduceFastest(x.clone());
                let trace = self.drive(&c.rates, GameVariant::Flush, &s, c.critical_horizon)?;
                Ok(backlog(&trace)?.max_intermediate)
            })
            .collect::<Result<Vec<_>>>()?;
        let passed = results.iter().all(|b| *b >= c.predicted_backlog_lower_bound);
        let parts: Vec<String> = xs
            .iter()
            .zip(&results)
            .map(|(x, b)| format!("x={} -> {}", format_rational(x), format_rational(b)))
            .collect();
        Ok((passed, format!("{} (need >= 29/14)", parts.join(", ")), Vec::new()))
    }

    fn dds(&self) -> Result<(bool, String, Vec<Violation>)> {
        let mut jobs: Vec<(String, RateVector, u64)> = Vec::new();
        for (k, rv) in self.random_suite().into_iter().enumerate() {
            jobs.push((format!("random #{k}"), rv, self.params.horizon));
        }
        for c in self.constructions() {
            let h = self.construction_horizon(&c);
            jobs.push((c.name, c.rates, h));
        }
        let jobs: Vec<_> = jobs
            .into_iter()
            .flat_map(|(l, rv, h)| {
                [GameVariant::Flush, GameVariant::UnitRemove]
                    .map(|v| (format!("{l} ({v})"), rv.clone(), h, v))
            })
            .collect();
        let results = jobs
            .par_iter()
            .map(|(_, rv, h, v)| {
                let trace = self.drive(rv, *v, &StrategyRef::DeadlineDriven, *h)?;
                let audit = audit_dds(&trace);
                Ok((audit.overflows.len(), audit.violations, backlog(&trace)?.max_intermediate))
            })
            .collect::<Result<Vec<_>>>()?;
        let overflows: usize = results.iter().map(|r| r.0).sum();
        let violations: u64 = results.iter().map(|r| r.1.total).sum();
        let examples = results
            .iter()
            .flat_map(|r| r.1.recorded.iter().cloned())
            .take(EXAMPLES)
            .collect();
        let two = jobs
            .iter()
            .position(|j| j.0 == "two-bamboo:1/100 (flush)")
            .expect("two-bamboo:1/100 is always run");
        let b = &results[two].2;
        let in_range = *b >= rat(49, 25) && *b < int(2);
        let detail = format!(
            "{} traces, {overflows} overflows, {violations} audit violations; two-bamboo:1/100 reached {} (need [49/25, 2))",
            jobs.len(),
            format_rational(b)
        );
        Ok((violations == 0 && in_range, detail, examples))
    }

    fn multiproc(&self) -> Result<(bool, String, Vec<Violation>)> {
        let mut configs = Vec::new();
        for p in [2usize, 4] {
            let mut r = rng(self.params.seed ^ (p as u64 * 0x9e37));
            for _ in 0..self.params.multiproc_configs {
                let n = r.gen_range(p + 1..=10 * p);
                let rates = random_multiproc_rates(&mut r, n, p);
                configs.push(MultiprocConfig::new(p, rates)?);
            }
        }
        let strategies = [
            (StrategyRef::DeadlineDriven, int(3)),
            (StrategyRef::ReduceMax, int(5)),
            (StrategyRef::ReduceFastest(int(2)), int(4)),
        ];
        let jobs: Vec<_> = configs
            .iter()
            .flat_map(|c| strategies.iter().map(move |s| (c, s)))
            .collect();
        let results = jobs
            .par_iter()
            .map(|(config, (s, cap))| {
                let mt = run_reduction(config, s, self.params.multiproc_horizon)?;
                let multi = mt.backlog().max_intermediate;
                let single = mt.reduced_backlog()?.max_intermediate;
                Ok((multi < *cap, multi <= single + int(1), multi))
            })
            .collect::<Result<Vec<_>>>()?;
        let over_cap = results.iter().filter(|r| !r.0).count();
        let over_gap = results.iter().filter(|r| !r.1).count();
        let mut worst = [int(0), int(0), int(0)];
        for (k, r) in results.iter().enumerate() {
            let w = &mut worst[k % strategies.len()];
            if r.2 > *w {
                *w = r.2.clone();
            }
        }
        let detail = format!(
            "{} runs of {} steps; largest backlogs dds {:.4} (< 3), reduce-max {:.4} (< 5), reduce-fastest:2 {:.4} (< 4); {over_cap} above cap, {over_gap} more than 1 above the reduced game",
            results.len(),
            self.params.multiproc_horizon,
            to_f64(&worst[0]),
            to_f64(&worst[1]),
            to_f64(&worst[2]),
        );
        Ok((over_cap == 0 && over_gap == 0, detail, Vec::new()))
    }

    fn oracle(&self) -> Result<(bool, String, Vec<Violation>)> {
        let strategies = [
            StrategyRef::ReduceMax,
            StrategyRef::ReduceFastest(int(1)),
            StrategyRef::ReduceFastest(int(2)),
            StrategyRef::DeadlineDriven,
        ];
        let mut jobs = Vec::new();
        for (s_idx, s) in strategies.iter().enumerate() {
            for k in 0..self.params.oracle_instances {
                let mut r = rng(self.params.seed.wrapping_add((s_idx * 100_000 + k) as u64));
                let n = r.gen_range(1..=self.params.oracle_max_n);
                let horizon = r.gen_range(1..=self.params.oracle_max_horizon);
                let variant = if r.gen_bool(0.5) {
                    GameVariant::Flush
                } else {
                    GameVariant::UnitRemove
                };
                jobs.push((s.clone(), random_subunit_rates(&mut r, n), variant, horizon));
            }
        }
        let mismatches = jobs
            .par_iter()
            .map(|(s, rv, v, h)| {
                let fast: Vec<_> = run(rv, *v, s, *h)?.records().collect();
                let naive = run_naive(rv, *v, s, *h)?;
                Ok(usize::from(fast != naive))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        let detail = format!(
            "{} instances across {} strategies, {mismatches} mismatches",
            jobs.len(),
            strategies.len()
        );
        Ok((mismatches == 0, detail, Vec::new()))
    }
}

fn reference_bound() -> Result<(bool, String, Vec<Violation>)> {
    let b = bilo_reference_bound(&int(2))?;
    let passed = b == rat(19, 6) && b >= rat(5, 2);
    Ok((passed, format!("bound at 2 is {}", format_rational(&b)), Vec::new()))
}
