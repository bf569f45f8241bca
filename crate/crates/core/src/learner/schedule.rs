use crate::error::{Error, Result};
use crate::geometry::radius;

/// Horizon-dependent constants of a run: number of rounds and the per-depth
/// sample sizes `n_h = ⌈16 ln(T/δ) / r_h²⌉`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    horizon: u64,
    delta: f64,
    zooming_dim: u32,
    rounds: u32,
    log_term: f64,
}

impl Schedule {
    /// `delta = None` selects `1/T`.
    pub fn new(horizon: u64, delta: Option<f64>, zooming_dim: u32) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::field("T", format!("must be >= 2, got {horizon}")));
        }
        let delta = delta.unwrap_or(1.0 / horizon as f64);
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::field(
                "delta",
                format!("must lie in (0, 1), got {delta}"),
            ));
        }
        let rounds = ((horizon as f64).log2() / (zooming_dim as f64 + 2.0)).ceil() as u32 + 1;
        Ok(Self {
            horizon,
            delta,
            zooming_dim,
            rounds,
            log_term: (horizon as f64 / delta).ln(),
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn zooming_dim(&self) -> u32 {
        self.zooming_dim
    }

    /// Number of rounds `B = ⌈log2 T / (d_z + 2)⌉ + 1`.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// Duels spent on one cube at depth `h`; saturates at `u64::MAX`.
    pub fn sample_size(&self, h: u32) -> u64 {
        let r = radius(h);
        (16.0 * self.log_term / (r * r)).ceil() as u64
    }

    /// `(h, n_h)` for `h = 1..=B`.
    pub fn sample_sizes(&self) -> Vec<(u32, u64)> {
        (1..=self.rounds)
            .map(|h| (h, self.sample_size(h)))
            .collect()
    }

    /// Half-width `sqrt(16 ln(T/δ) / n_h)` of the depth-`h` confidence band;
    /// at most `r_h` by construction.
    pub fn confidence_width(&self, h: u32) -> f64 {
        (16.0 * self.log_term / self.sample_size(h) as f64).sqrt()
    }
}

/// Convenience constructor mirroring [`Schedule::new`] with an explicit `δ`.
pub fn make_schedule(horizon: u64, delta: f64, zooming_dim: u32) -> Result<Schedule> {
    Schedule::new(horizon, Some(delta), zooming_dim)
}
