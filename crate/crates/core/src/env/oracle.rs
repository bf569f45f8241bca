use crate::env::{RewardFunction, TransferFunction};
use crate::geometry::Point;
use crate::rng::RandomStream;

/// Immutable preference model: `P(x ≻ y) = ρ(f(x) − f(y))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    reward: RewardFunction,
    transfer: TransferFunction,
    peak: f64,
}

impl Environment {
    pub fn new(reward: RewardFunction, transfer: TransferFunction) -> Self {
        let peak = reward.value(reward.optimum());
        Self {
            reward,
            transfer,
            peak,
        }
    }

    pub fn reward(&self) -> &RewardFunction {
        &self.reward
    }

    pub fn transfer(&self) -> &TransferFunction {
        &self.transfer
    }

    pub fn dim(&self) -> usize {
        self.reward.dim()
    }

    pub fn optimum(&self) -> &Point {
        self.reward.optimum()
    }

    pub fn gamma(&self) -> f64 {
        self.transfer.gamma()
    }

    /// `Δ(x, y) = P(x ≻ y) − 1/2`.
    #[inline]
    pub fn gap(&self, x: &Point, y: &Point) -> f64 {
        self.transfer
            .eval(self.reward.value(x) - self.reward.value(y))
            - 0.5
    }

    /// `Δ(x⋆, x)`; never negative.
    #[inline]
    pub fn optimality_gap(&self, x: &Point) -> f64 {
        self.transfer.eval(self.peak - self.reward.value(x)) - 0.5
    }

    /// Instantaneous regret of the duel `(x, y)`: `Δ(x⋆, x) + Δ(x⋆, y)`.
    #[inline]
    pub fn regret(&self, x: &Point, y: &Point) -> f64 {
        self.optimality_gap(x) + self.optimality_gap(y)
    }

    /// `P(x ≻ y)`.
    #[inline]
    pub fn win_probability(&self, x: &Point, y: &Point) -> f64 {
        self.transfer
            .eval(self.reward.value(x) - self.reward.value(y))
    }
}

/// Answers duels with Bernoulli outcomes drawn from its own stream.
#[derive(Clone, Debug)]
pub struct DuelOracle {
    env: Environment,
    rng: RandomStream,
    duel_count: u64,
}

impl DuelOracle {
    pub fn new(env: Environment, rng: RandomStream) -> Self {
        Self {
            env,
            rng,
            duel_count: 0,
        }
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn duel_count(&self) -> u64 {
        self.duel_count
    }

    /// True gap; does not touch the random stream.
    pub fn gap(&self, x: &Point, y: &Point) -> f64 {
        self.env.gap(x, y)
    }

    /// `true` when `x` wins. One draw per call.
    pub fn duel(&mut self, x: &Point, y: &Point) -> bool {
        let p = self.env.win_probability(x, y);
        self.duel_count += 1;
        self.rng.bernoulli(p)
    }
}
