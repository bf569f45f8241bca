//! Empirical checks of the transfer-function properties and of the
//! learner's concentration, no-elimination, shrinking-region and space
//! guarantees. Every sample size and threshold is fixed here.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::env::{parse_reward, DuelOracle, Environment, TransferFunction};
use crate::error::{Error, Result};
use crate::geometry::{radius, Cube, Point};
use crate::learner::{
    empirical_gap_with, run_observed, CubeVisit, ExplorationObserver, Schedule, VisitOutcome,
};
use crate::rng::{RandomStream, AUXILIARY_STREAM, ENVIRONMENT_STREAM, LEARNER_STREAM};
use crate::trace::TraceMode;

pub const LIPSCHITZ_PAIRS: usize = 100_000;
pub const LIPSCHITZ_TOL: f64 = 1e-9;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const STI_TRIPLES: usize = 10_000;
pub const STI_TOL: f64 = 1e-12;

pub const CONCENTRATION_HORIZON: u64 = 1 << 14;
pub const CONCENTRATION_DELTA: f64 = 0.05;
pub const CONCENTRATION_REPS: u64 = 500;
pub const CONCENTRATION_MIN_PASS: u64 = 490;

pub const ELIMINATION_HORIZON: u64 = 1 << 14;
pub const ELIMINATION_DELTA: f64 = 0.05;
pub const ELIMINATION_SEEDS: u64 = 200;
pub const ELIMINATION_MIN_SURVIVE: u64 = 190;
/// Allowed fraction of runs with a shrinking-region violation (`2δ`).
pub const SHRINK_MAX_FRACTION: f64 = 2.0 * ELIMINATION_DELTA;

pub const MEMORY_HORIZONS: [u64; 3] = [1 << 12, 1 << 16, 1 << 20];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One measured statistic compared against a fixed threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(
        suite: &'static str,
        name: impl Into<String>,
        statistic: f64,
        relation: Relation,
        threshold: f64,
    ) -> Self {
        let passed = match relation {
            Relation::AtMost => statistic <= threshold,
            Relation::AtLeast => statistic >= threshold,
        };
        Self {
            suite,
            name: name.into(),
            statistic,
            threshold,
            relation,
            passed,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        write!(
            f,
            "[{}] {}/{}: {} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.statistic,
            op,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Transfer,
    Sti,
    Concentration,
    NoElim,
    Shrink,
    Memory,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "transfer" => Suite::Transfer,
            "sti" => Suite::Sti,
            "concentration" => Suite::Concentration,
            "no_elim" => Suite::NoElim,
            "shrink" => Suite::Shrink,
            "memory" => Suite::Memory,
            "all" => Suite::All,
            other => return Err(Error::UnknownSuite(other.to_string())),
        })
    }
}

/// Runs a suite and collects its checks.
pub fn validate(suite: Suite) -> ValidationReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Transfer | Suite::All) {
        checks.extend(transfer_checks());
    }
    if matches!(suite, Suite::Sti | Suite::All) {
        checks.extend(sti_checks());
    }
    if matches!(suite, Suite::Concentration | Suite::All) {
        checks.extend(concentration_checks());
    }
    match suite {
        Suite::NoElim => checks.push(elimination_study().no_elim_check()),
        Suite::Shrink => checks.push(elimination_study().shrink_check()),
        Suite::All => {
            let study = elimination_study();
            checks.push(study.no_elim_check());
            checks.push(study.shrink_check());
        }
        _ => {}
    }
    if matches!(suite, Suite::Memory | Suite::All) {
        checks.extend(memory_checks());
    }
    ValidationReport { checks }
}

fn standard_transfers() -> [(&'static str, TransferFunction); 3] {
    [
        ("logistic", TransferFunction::logistic()),
        (
            "probit(1)",
            TransferFunction::probit(1.0).expect("sigma = 1 is valid"),
        ),
        ("linear", TransferFunction::linear()),
    ]
}

/// Largest difference quotient over `LIPSCHITZ_PAIRS` adjacent grid pairs and
/// as many random pairs in `[-1, 1]`.
pub fn estimate_lipschitz(t: &TransferFunction, rng: &mut RandomStream) -> f64 {
    let step = 2.0 / LIPSCHITZ_PAIRS as f64;
    let mut worst: f64 = 0.0;
    let mut prev = t.eval(-1.0);
    for k in 1..=LIPSCHITZ_PAIRS {
        let z = -1.0 + k as f64 * step;
        let v = t.eval(z);
        worst = worst.max((v - prev).abs() / step);
        prev = v;
    }
    for _ in 0..LIPSCHITZ_PAIRS {
        let a = 2.0 * rng.next_f64() - 1.0;
        let b = 2.0 * rng.next_f64() - 1.0;
        if a != b {
            worst = worst.max((t.eval(a) - t.eval(b)).abs() / (a - b).abs());
        }
    }
    worst
}

/// Three Lipschitz-constant checks plus one symmetry check.
pub fn transfer_checks() -> Vec<Check> {
    let mut rng = RandomStream::new(0, AUXILIARY_STREAM);
    let mut checks: Vec<Check> = standard_transfers()
        .iter()
        .map(|(name, t)| {
            let est = estimate_lipschitz(t, &mut rng);
            Check::new(
                "transfer",
                format!("lipschitz {name}"),
                est,
                Relation::AtMost,
                t.gamma() + LIPSCHITZ_TOL,
            )
            .with_detail(format!("gamma = {}", t.gamma()))
        })
        .collect();

    let mut links: Vec<TransferFunction> = standard_transfers().iter().map(|(_, t)| *t).collect();
    links.push(TransferFunction::polynomial(0.5, 1.0).expect("valid polynomial"));
    links.push(TransferFunction::polynomial(0.5, 2.0).expect("valid polynomial"));
    let worst = links
        .iter()
        .flat_map(|t| {
            (0..=2000).map(move |k| {
                let z = -1.0 + k as f64 / 1000.0;
                (t.eval(-z) - (1.0 - t.eval(z))).abs()
            })
        })
        .fold(0.0, f64::max);
    checks.push(
        Check::new(
            "transfer",
            "symmetry",
            worst,
            Relation::AtMost,
            SYMMETRY_TOL,
        )
        .with_detail("max |rho(-z) - (1 - rho(z))| over all links"),
    );
    checks
}

/// Counts of stochastic-triangle-inequality violations over random triples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StiCounts {
    /// Triples sorted so that `f(x) ≥ f(z) ≥ f(y)`.
    pub ordered: usize,
    /// The same triples in sampling order; informational only.
    pub unordered: usize,
}

pub fn sti_violations(env: &Environment, triples: usize, rng: &mut RandomStream) -> StiCounts {
    let d = env.dim();
    let mut counts = StiCounts {
        ordered: 0,
        unordered: 0,
    };
    let excess = |x: &Point, z: &Point, y: &Point| env.gap(x, y) - env.gap(x, z) - env.gap(z, y);
    for _ in 0..triples {
        let mut arms = [
            Point::sample_unit(d, rng),
            Point::sample_unit(d, rng),
            Point::sample_unit(d, rng),
        ];
        if excess(&arms[0], &arms[1], &arms[2]) > STI_TOL {
            counts.unordered += 1;
        }
        arms.sort_by(|a, b| env.reward().value(b).total_cmp(&env.reward().value(a)));
        if excess(&arms[0], &arms[1], &arms[2]) > STI_TOL {
            counts.ordered += 1;
        }
    }
    counts
}

/// Zero ordered violations required per link.
pub fn sti_checks() -> Vec<Check> {
    let reward = parse_reward("cone_peak:d=2").expect("preset id is valid");
    standard_transfers()
        .iter()
        .enumerate()
        .map(|(i, (name, t))| {
            let env = Environment::new(reward.clone(), *t);
            let mut rng = RandomStream::new(i as u64, AUXILIARY_STREAM);
            let counts = sti_violations(&env, STI_TRIPLES, &mut rng);
            Check::new(
                "sti",
                format!("ordered triples {name}"),
                counts.ordered as f64,
                Relation::AtMost,
                0.0,
            )
            .with_detail(format!(
                "{STI_TRIPLES} triples; unordered violations {}",
                counts.unordered
            ))
        })
        .collect()
}

/// A fixed (environment, cube, reference) triple for the concentration check.
#[derive(Clone, Debug)]
pub struct ConcentrationCase {
    pub label: &'static str,
    pub env: Environment,
    pub cube: Cube,
    pub reference: Point,
}

pub fn concentration_cases() -> Vec<ConcentrationCase> {
    let cone1 = Environment::new(
        parse_reward("cone_peak:d=1").expect("preset id is valid"),
        TransferFunction::linear(),
    );
    let cone2 = Environment::new(
        parse_reward("cone_peak:d=2").expect("preset id is valid"),
        TransferFunction::logistic(),
    );
    let p = |c: &[f64]| Point::new(c.to_vec()).expect("literal point");
    let c = |h: u32, i: &[u64]| Cube::new(h, i.to_vec()).expect("literal cube");
    vec![
        ConcentrationCase {
            label: "linear d=1 h=1 cube 1:0",
            env: cone1.clone(),
            cube: c(1, &[0]),
            reference: p(&[0.7]),
        },
        ConcentrationCase {
            label: "linear d=1 h=2 optimal cube 2:1",
            env: cone1.clone(),
            cube: c(2, &[1]),
            reference: p(&[0.7]),
        },
        ConcentrationCase {
            label: "linear d=1 h=3 cube 3:5",
            env: cone1,
            cube: c(3, &[5]),
            reference: p(&[0.2]),
        },
        ConcentrationCase {
            label: "logistic d=2 h=2 cube 2:1.1",
            env: cone2,
            cube: c(2, &[1, 1]),
            reference: p(&[0.9, 0.1]),
        },
    ]
}

/// Number of repetitions in which `|Δ̂ − Δ(x, ref)| ≤ r_h (1 + Γ)` held for
/// every sampled `x`.
pub fn concentration_hits(case: &ConcentrationCase, schedule: &Schedule, reps: u64) -> u64 {
    let h = case.cube.depth();
    let n = schedule.sample_size(h);
    let bound = radius(h) * (1.0 + case.env.gamma());
    (0..reps)
        .into_par_iter()
        .filter(|&rep| {
            let mut oracle =
                DuelOracle::new(case.env.clone(), RandomStream::new(rep, ENVIRONMENT_STREAM));
            let mut rng = RandomStream::new(rep, LEARNER_STREAM);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let est = empirical_gap_with(
                &case.cube,
                &case.reference,
                n,
                &mut oracle,
                &mut rng,
                |x, _| {
                    let g = case.env.gap(x, &case.reference);
                    lo = lo.min(g);
                    hi = hi.max(g);
                },
            );
            (est.value - lo).abs().max((est.value - hi).abs()) <= bound
        })
        .count() as u64
}

pub fn concentration_checks() -> Vec<Check> {
    let schedule = Schedule::new(CONCENTRATION_HORIZON, Some(CONCENTRATION_DELTA), 0)
        .expect("fixed schedule is valid");
    concentration_cases()
        .iter()
        .map(|case| {
            let hits = concentration_hits(case, &schedule, CONCENTRATION_REPS);
            Check::new(
                "concentration",
                case.label,
                hits as f64,
                Relation::AtLeast,
                CONCENTRATION_MIN_PASS as f64,
            )
            .with_detail(format!(
                "n_h = {}, out of {CONCENTRATION_REPS}",
                schedule.sample_size(case.cube.depth())
            ))
        })
        .collect()
}

/// Per-run observer for the elimination and shrinking-region checks.
#[derive(Clone, Debug)]
pub struct EliminationProbe {
    optimum: Point,
    gamma: f64,
    pub optimum_eliminated: bool,
    pub shrink_violations: u64,
    pub sampled_visits: u64,
    pub eliminations: u64,
}

impl EliminationProbe {
    pub fn new(env: &Environment) -> Self {
        Self {
            optimum: env.optimum().clone(),
            gamma: env.gamma(),
            optimum_eliminated: false,
            shrink_violations: 0,
            sampled_visits: 0,
            eliminations: 0,
        }
    }
}

impl ExplorationObserver for EliminationProbe {
    fn on_visit(&mut self, visit: &CubeVisit<'_>) {
        if visit.outcome == VisitOutcome::Skipped {
            return;
        }
        self.sampled_visits += 1;
        let bound = 4.0 * radius(visit.depth - 1) * (1.0 + self.gamma);
        if visit.max_sampled_optimality_gap > bound {
            self.shrink_violations += 1;
        }
        if visit.outcome == VisitOutcome::Eliminated {
            self.eliminations += 1;
            if visit.cube.owns(&self.optimum).unwrap_or(false) {
                self.optimum_eliminated = true;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminationStudy {
    pub runs: u64,
    pub optimum_survived: u64,
    pub runs_with_shrink_violation: u64,
    pub eliminations: u64,
    pub sampled_visits: u64,
}

impl EliminationStudy {
    pub fn shrink_violation_fraction(&self) -> f64 {
        self.runs_with_shrink_violation as f64 / self.runs as f64
    }

    pub fn no_elim_check(&self) -> Check {
        Check::new(
            "no_elim",
            "runs where the optimal cube survives",
            self.optimum_survived as f64,
            Relation::AtLeast,
            ELIMINATION_MIN_SURVIVE as f64,
        )
        .with_detail(format!(
            "{} runs, {} eliminations in total",
            self.runs, self.eliminations
        ))
    }

    pub fn shrink_check(&self) -> Check {
        Check::new(
            "shrink",
            "fraction of runs with a violation",
            self.shrink_violation_fraction(),
            Relation::AtMost,
            SHRINK_MAX_FRACTION,
        )
        .with_detail(format!("{} sampled cube visits", self.sampled_visits))
    }
}

/// `cone_peak:d=1`, linear link, `T = 2^14`, `δ = 0.05`, seeds `0..200`.
pub fn elimination_study() -> EliminationStudy {
    let env = Environment::new(
        parse_reward("cone_peak:d=1").expect("preset id is valid"),
        TransferFunction::linear(),
    );
    let schedule = Schedule::new(
        ELIMINATION_HORIZON,
        Some(ELIMINATION_DELTA),
        env.dim() as u32,
    )
    .expect("fixed schedule is valid");
    let probes: Vec<EliminationProbe> = (0..ELIMINATION_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut probe = EliminationProbe::new(&env);
            let mut oracle =
                DuelOracle::new(env.clone(), RandomStream::new(seed, ENVIRONMENT_STREAM));
            let mut rng = RandomStream::new(seed, LEARNER_STREAM);
            run_observed(
                &schedule,
                &mut oracle,
                &mut rng,
                TraceMode::Checkpoints,
                &mut probe,
            )
            .expect("fixed run is valid");
            probe
        })
        .collect();
    EliminationStudy {
        runs: probes.len() as u64,
        optimum_survived: probes.iter().filter(|p| !p.optimum_eliminated).count() as u64,
        runs_with_shrink_violation: probes.iter().filter(|p| p.shrink_violations > 0).count()
            as u64,
        eliminations: probes.iter().map(|p| p.eliminations).sum(),
        sampled_visits: probes.iter().map(|p| p.sampled_visits).sum(),
    }
}

/// `(T, B, max live depth)` for a `cone_peak:d=1` linear run with `d_z = 0`.
pub fn measured_depth(horizon: u64) -> (u64, u32, u32) {
    let env = Environment::new(
        parse_reward("cone_peak:d=1").expect("preset id is valid"),
        TransferFunction::linear(),
    );
    let schedule = Schedule::new(horizon, None, 0).expect("fixed schedule is valid");
    let mut oracle = DuelOracle::new(env, RandomStream::new(0, ENVIRONMENT_STREAM));
    let mut rng = RandomStream::new(0, LEARNER_STREAM);
    let trace = run_observed(
        &schedule,
        &mut oracle,
        &mut rng,
        TraceMode::Checkpoints,
        &mut (),
    )
    .expect("fixed run is valid");
    (horizon, schedule.rounds(), trace.frames.max_stack_depth)
}

pub fn memory_checks() -> Vec<Check> {
    let depths: Vec<(u64, u32, u32)> = MEMORY_HORIZONS.iter().map(|&t| measured_depth(t)).collect();
    let mut checks: Vec<Check> = depths
        .iter()
        .map(|&(t, b, depth)| {
            Check::new(
                "memory",
                format!("max depth T=2^{}", t.trailing_zeros()),
                depth as f64,
                Relation::AtMost,
                b as f64,
            )
        })
        .collect();
    let (first, last) = (depths[0], depths[depths.len() - 1]);
    checks.push(
        Check::new(
            "memory",
            "depth growth 2^12 -> 2^20",
            last.2 as f64 - first.2 as f64,
            Relation::AtMost,
            last.1 as f64 - first.1 as f64,
        )
        .with_detail("bounded by the growth of B"),
    );
    checks
}
