//! Log-DuelLi: round-based recursive cube exploration against a fixed
//! reference arm, with elimination, candidate updates and a cleanup phase.
//!
//! Round `m` walks the dyadic tree depth first from the `2^d` depth-1 cubes.
//! Every visited cube at depth `h` duels `n_h` uniform samples against the
//! previous round's candidate. Cubes at depth `m` may replace the candidate;
//! shallower cubes are either eliminated or refined into their children. Only
//! the current root-to-leaf path is alive at any moment, so the live state is
//! bounded by the number of rounds.

mod schedule;

use std::sync::Arc;

pub use schedule::{make_schedule, Schedule};

use crate::env::DuelOracle;
use crate::error::Result;
use crate::geometry::{radius, root_cubes, Cube, Point};
use crate::rng::RandomStream;
#[cfg(test)]
use crate::trace::memory_stats;
use crate::trace::{FrameStats, RegretTrace, TraceMode, TraceRecorder};

/// Fixed-size part of one recursion frame, used for the memory proxy.
pub const FRAME_BYTES_PROXY: u64 = (std::mem::size_of::<Cube>()
    + 2 * std::mem::size_of::<u32>()
    + std::mem::size_of::<f64>()) as u64;

/// Empirical gap of a cube against a reference arm.
#[derive(Clone, Debug, PartialEq)]
pub struct GapEstimate {
    /// `(1/n) Σ 1{x_i ≻ ref} − 1/2`, in `[-1/2, 1/2]`.
    pub value: f64,
    /// The first sampled arm.
    pub witness: Point,
}

/// Samples `n` uniform arms from `cube`, duels each against `reference`, and
/// calls `each(arm, won)` after every duel.
pub fn empirical_gap_with<F>(
    cube: &Cube,
    reference: &Point,
    n: u64,
    oracle: &mut DuelOracle,
    rng: &mut RandomStream,
    mut each: F,
) -> GapEstimate
where
    F: FnMut(&Point, bool),
{
    assert!(n >= 1, "empirical gap needs at least one duel");
    let mut arm = cube.sample_uniform(rng);
    let witness = arm.clone();
    let mut wins = 0u64;
    for i in 0..n {
        if i > 0 {
            cube.sample_into(rng, &mut arm);
        }
        let won = oracle.duel(&arm, reference);
        wins += won as u64;
        each(&arm, won);
    }
    GapEstimate {
        value: wins as f64 / n as f64 - 0.5,
        witness,
    }
}

/// [`empirical_gap_with`] without a per-duel callback.
pub fn empirical_gap(
    cube: &Cube,
    reference: &Point,
    n: u64,
    oracle: &mut DuelOracle,
    rng: &mut RandomStream,
) -> GapEstimate {
    empirical_gap_with(cube, reference, n, oracle, rng, |_, _| {})
}

/// Elimination rule: drop the cube when it trails the reference estimate by
/// more than `2 r_h (1 + Γ)`.
pub fn should_eliminate(ref_gap_est: f64, cube_gap_est: f64, h: u32, gamma: f64) -> bool {
    ref_gap_est - cube_gap_est > 2.0 * radius(h) * (1.0 + gamma)
}

/// Learner state carried across cubes and rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundState {
    pub round: u32,
    /// Reference arm `X^{m-1}` every duel of the round is played against.
    pub ref_arm: Point,
    pub ref_gap_est: f64,
    /// Candidate `X^m` for the next round.
    pub best_arm: Point,
    pub best_gap_est: f64,
    /// Duels consumed so far.
    pub t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VisitOutcome {
    /// Not enough budget left; nothing was sampled.
    Skipped,
    /// Depth `h = m`; `improved` when the candidate was replaced.
    Leaf {
        improved: bool,
    },
    Refined,
    Eliminated,
}

/// What the learner saw when it visited a cube.
#[derive(Clone, Copy, Debug)]
pub struct CubeVisit<'a> {
    pub round: u32,
    pub depth: u32,
    pub cube: &'a Cube,
    pub reference: &'a Point,
    pub ref_gap_est: f64,
    /// `None` when skipped.
    pub estimate: Option<f64>,
    /// Largest true `Δ(x⋆, x)` over the arms sampled in the cube.
    pub max_sampled_optimality_gap: f64,
    pub outcome: VisitOutcome,
}

/// Hooks for the validation suite; the default methods do nothing.
pub trait ExplorationObserver {
    fn on_visit(&mut self, _visit: &CubeVisit<'_>) {}
    fn on_round_end(&mut self, _state: &RoundState) {}
}

impl ExplorationObserver for () {}

/// Runs Log-DuelLi for exactly `schedule.horizon()` duels.
pub fn run(
    schedule: &Schedule,
    oracle: &mut DuelOracle,
    rng: &mut RandomStream,
    mode: TraceMode,
) -> Result<RegretTrace> {
    run_observed(schedule, oracle, rng, mode, &mut ())
}

/// [`run`] with an observer notified of every cube visit.
pub fn run_observed<O: ExplorationObserver>(
    schedule: &Schedule,
    oracle: &mut DuelOracle,
    rng: &mut RandomStream,
    mode: TraceMode,
    observer: &mut O,
) -> Result<RegretTrace> {
    let d = oracle.env().dim();
    let roots = root_cubes(d)?;
    let initial = Point::sample_unit(d, rng);
    let mut explorer = Explorer {
        schedule,
        gamma: oracle.env().gamma(),
        oracle,
        rng,
        recorder: TraceRecorder::new(schedule.horizon(), mode),
        state: RoundState {
            round: 0,
            ref_arm: initial.clone(),
            ref_gap_est: 0.0,
            best_arm: initial,
            best_gap_est: 0.0,
            t: 0,
        },
        frames: FrameStats::default(),
        live: 0,
        observer,
    };

    for m in 1..=schedule.rounds() {
        let st = &mut explorer.state;
        st.round = m;
        st.ref_arm = st.best_arm.clone();
        st.ref_gap_est = st.best_gap_est;
        for cube in &roots {
            explorer.round_func(m, 1, cube);
        }
        explorer.observer.on_round_end(&explorer.state);
    }
    explorer.cleanup();

    let Explorer {
        recorder,
        mut frames,
        state,
        ..
    } = explorer;
    frames.live_frame_bytes_proxy = frames.max_stack_depth as u64 * FRAME_BYTES_PROXY;
    Ok(recorder.finish(frames, Some(state.best_arm)))
}

struct Explorer<'a, O> {
    schedule: &'a Schedule,
    gamma: f64,
    oracle: &'a mut DuelOracle,
    rng: &'a mut RandomStream,
    recorder: TraceRecorder,
    state: RoundState,
    frames: FrameStats,
    live: u32,
    observer: &'a mut O,
}

impl<O: ExplorationObserver> Explorer<'_, O> {
    fn round_func(&mut self, m: u32, h: u32, cube: &Cube) {
        self.live += 1;
        self.frames.frames_allocated += 1;
        self.frames.max_stack_depth = self.frames.max_stack_depth.max(self.live);
        self.visit(m, h, cube);
        self.live -= 1;
    }

    fn visit(&mut self, m: u32, h: u32, cube: &Cube) {
        let n = self.schedule.sample_size(h);
        if n > self.recorder.remaining() {
            self.observer.on_visit(&CubeVisit {
                round: m,
                depth: h,
                cube,
                reference: &self.state.ref_arm,
                ref_gap_est: self.state.ref_gap_est,
                estimate: None,
                max_sampled_optimality_gap: 0.0,
                outcome: VisitOutcome::Skipped,
            });
            return;
        }

        let label: Option<Arc<str>> = self.recorder.wants_any(n).then(|| Arc::from(cube.label()));
        let env = self.oracle.env().clone();
        let ref_regret = env.optimality_gap(&self.state.ref_arm);
        let recorder = &mut self.recorder;
        let mut worst: f64 = 0.0;
        let est = empirical_gap_with(
            cube,
            &self.state.ref_arm,
            n,
            self.oracle,
            self.rng,
            |arm, _| {
                let gap = env.optimality_gap(arm);
                worst = worst.max(gap);
                recorder.push(m, h, label.as_ref(), gap + ref_regret);
            },
        );
        self.state.t = self.recorder.duels();

        let outcome = if h == m {
            let improved = est.value > self.state.best_gap_est;
            if improved {
                self.state.best_gap_est = est.value;
                self.state.best_arm = est.witness;
            }
            VisitOutcome::Leaf { improved }
        } else if should_eliminate(self.state.ref_gap_est, est.value, h, self.gamma) {
            VisitOutcome::Eliminated
        } else {
            VisitOutcome::Refined
        };

        self.observer.on_visit(&CubeVisit {
            round: m,
            depth: h,
            cube,
            reference: &self.state.ref_arm,
            ref_gap_est: self.state.ref_gap_est,
            estimate: Some(est.value),
            max_sampled_optimality_gap: worst,
            outcome,
        });

        if outcome == VisitOutcome::Refined {
            for child in cube.children_iter() {
                self.round_func(m, h + 1, &child);
            }
        }
    }

    /// Plays `(X^B, X^B)` until the horizon is used up.
    fn cleanup(&mut self) {
        let arm = self.state.best_arm.clone();
        let regret = 2.0 * self.oracle.env().optimality_gap(&arm);
        while self.recorder.remaining() > 0 {
            self.oracle.duel(&arm, &arm);
            self.recorder.push(0, 0, None, regret);
        }
        self.state.t = self.recorder.duels();
    }
}
