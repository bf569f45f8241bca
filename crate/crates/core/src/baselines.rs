//! Reference learners that share the oracle interface and the exact-budget
//! contract of Log-DuelLi.

use crate::env::DuelOracle;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::RandomStream;
use crate::trace::{FrameStats, RegretTrace, TraceMode, TraceRecorder};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaselineKind {
    /// Two fresh uniform arms every step.
    UniformRandom,
    /// Fixed `K^d` grid, explore-then-commit.
    GridEtc {
        per_axis: u32,
        explore_fraction: f64,
    },
}

impl BaselineKind {
    pub fn grid_etc(per_axis: u32, explore_fraction: f64) -> Result<Self> {
        if per_axis < 2 {
            return Err(Error::param("K", format!("must be >= 2, got {per_axis}")));
        }
        if !(explore_fraction > 0.0 && explore_fraction < 1.0) {
            return Err(Error::param(
                "phi",
                format!("must lie in (0, 1), got {explore_fraction}"),
            ));
        }
        Ok(BaselineKind::GridEtc {
            per_axis,
            explore_fraction,
        })
    }

    pub fn run(
        &self,
        horizon: u64,
        oracle: &mut DuelOracle,
        rng: &mut RandomStream,
        mode: TraceMode,
    ) -> Result<RegretTrace> {
        match *self {
            BaselineKind::UniformRandom => run_uniform(horizon, oracle, rng, mode),
            BaselineKind::GridEtc {
                per_axis,
                explore_fraction,
            } => run_grid_etc(horizon, per_axis, explore_fraction, oracle, rng, mode),
        }
    }
}

/// Duels two independent uniform arms at every step.
pub fn run_uniform(
    horizon: u64,
    oracle: &mut DuelOracle,
    rng: &mut RandomStream,
    mode: TraceMode,
) -> Result<RegretTrace> {
    if horizon < 1 {
        return Err(Error::field("T", "must be >= 1"));
    }
    let d = oracle.env().dim();
    let mut rec = TraceRecorder::new(horizon, mode);
    for _ in 0..horizon {
        let x = Point::sample_unit(d, rng);
        let y = Point::sample_unit(d, rng);
        oracle.duel(&x, &y);
        let regret = oracle.env().regret(&x, &y);
        rec.push(0, 0, None, regret);
    }
    Ok(rec.finish(FrameStats::default(), None))
}

/// Cell centres `(i + 1/2)/K` of a `K^d` grid, lexicographic order.
pub fn grid_arms(d: usize, per_axis: u32) -> Result<Vec<Point>> {
    crate::geometry::check_dim(d)?;
    let k = per_axis as usize;
    let count = k
        .checked_pow(d as u32)
        .ok_or_else(|| Error::param("K", "grid too large"))?;
    (0..count)
        .map(|flat| {
            let mut coords = vec![0.0; d];
            let mut rest = flat;
            for axis in (0..d).rev() {
                coords[axis] = ((rest % k) as f64 + 0.5) / k as f64;
                rest /= k;
            }
            Point::new(coords)
        })
        .collect()
}

/// Explore-then-commit on a fixed grid.
///
/// Every grid arm duels the first grid arm `⌊φT / K^d⌋` times; the arm with
/// the highest win rate (first on ties) then duels itself for the rest of
/// the horizon.
pub fn run_grid_etc(
    horizon: u64,
    per_axis: u32,
    explore_fraction: f64,
    oracle: &mut DuelOracle,
    _rng: &mut RandomStream,
    mode: TraceMode,
) -> Result<RegretTrace> {
    BaselineKind::grid_etc(per_axis, explore_fraction)?;
    let arms = grid_arms(oracle.env().dim(), per_axis)?;
    let per_arm = (explore_fraction * horizon as f64).floor() as u64 / arms.len() as u64;
    if per_arm == 0 {
        return Err(Error::param(
            "phi",
            format!(
                "exploration budget {explore_fraction}·{horizon} cannot give each of {} grid arms a duel",
                arms.len()
            ),
        ));
    }

    let mut rec = TraceRecorder::new(horizon, mode);
    let reference = &arms[0];
    let ref_regret = oracle.env().optimality_gap(reference);
    let mut best = (0usize, 0u64);
    for (i, arm) in arms.iter().enumerate() {
        let regret = oracle.env().optimality_gap(arm) + ref_regret;
        let mut wins = 0;
        for _ in 0..per_arm {
            wins += oracle.duel(arm, reference) as u64;
            rec.push(0, 0, None, regret);
        }
        if wins > best.1 {
            best = (i, wins);
        }
    }

    let chosen = arms[best.0].clone();
    let regret = 2.0 * oracle.env().optimality_gap(&chosen);
    while rec.remaining() > 0 {
        oracle.duel(&chosen, &chosen);
        rec.push(0, 0, None, regret);
    }
    Ok(rec.finish(FrameStats::default(), Some(chosen)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Environment, RewardFunction, TransferFunction};
    use crate::rng::{ENVIRONMENT_STREAM, LEARNER_STREAM};

    fn oracle(opt: f64, seed: u64) -> DuelOracle {
        let env = Environment::new(
            RewardFunction::cone_peak(Point::splat(1, opt).unwrap()),
            TransferFunction::linear(),
        );
        DuelOracle::new(env, RandomStream::new(seed, ENVIRONMENT_STREAM))
    }

    #[test]
    fn grid_points() {
        let arms = grid_arms(1, 2).unwrap();
        assert_eq!(
            arms,
            vec![
                Point::splat(1, 0.25).unwrap(),
                Point::splat(1, 0.75).unwrap()
            ]
        );
        let arms = grid_arms(2, 3).unwrap();
        assert_eq!(arms.len(), 9);
        assert_eq!(arms[1].coords(), &[1.0 / 6.0, 0.5]);
    }

    #[test]
    fn uniform_budget_and_determinism() {
        let mut o = oracle(0.3, 1);
        let mut r = RandomStream::new(1, LEARNER_STREAM);
        let a = run_uniform(500, &mut o, &mut r, TraceMode::Full).unwrap();
        assert_eq!(a.records.len(), 500);
        assert_eq!(o.duel_count(), 500);
        let mut o2 = oracle(0.3, 1);
        let mut r2 = RandomStream::new(1, LEARNER_STREAM);
        assert_eq!(
            a,
            run_uniform(500, &mut o2, &mut r2, TraceMode::Full).unwrap()
        );
    }

    #[test]
    fn grid_etc_commits_to_best_arm() {
        let mut hits = 0;
        for seed in 0..100 {
            let mut o = oracle(0.75, seed);
            let mut r = RandomStream::new(seed, LEARNER_STREAM);
            let tr = run_grid_etc(10_000, 2, 0.5, &mut o, &mut r, TraceMode::Full).unwrap();
            assert_eq!(tr.total_duels, 10_000);
            assert_eq!(o.duel_count(), 10_000);
            if tr.final_arm.as_ref().unwrap().coords() == [0.75] {
                hits += 1;
            }
            // committed phase is flat at 2Δ(x⋆, chosen)
            let chosen = tr.final_arm.unwrap();
            let flat = 2.0 * o.env().optimality_gap(&chosen);
            assert!(tr.records[5_000..].iter().all(|r| r.regret == flat));
        }
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn grid_etc_rejects_tiny_budgets() {
        let mut o = oracle(0.3, 0);
        let mut r = RandomStream::new(0, LEARNER_STREAM);
        assert!(run_grid_etc(10, 16, 0.5, &mut o, &mut r, TraceMode::Full).is_err());
        assert!(BaselineKind::grid_etc(1, 0.5).is_err());
        assert!(BaselineKind::grid_etc(4, 1.0).is_err());
    }
}
