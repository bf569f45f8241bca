//! Per-duel regret records shared by every learner.

use std::io::{self, Write};
use std::sync::Arc;

use crate::geometry::Point;

/// CSV header of a trace file.
pub const TRACE_HEADER: &str = "t,round,depth,cube_id,r_t,cum_regret";

/// Placeholder cube id for duels that are not tied to a cube (cleanup,
/// baselines).
pub const NO_CUBE: &str = "-";

/// Which duels end up in [`RegretTrace::records`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    /// Every duel.
    Full,
    /// Only the duels at [`checkpoints`].
    Checkpoints,
}

/// `t = k·T/16` for `k = 1..=16`, deduplicated and never zero.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=16u64).map(|k| (k * horizon / 16).max(1)).collect();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    /// 1-based duel index.
    pub t: u64,
    /// Round of the learner, 0 outside the round structure.
    pub round: u32,
    /// Cube depth, 0 outside the round structure.
    pub depth: u32,
    pub cube: Option<Arc<str>>,
    /// `Δ(x⋆, x_t) + Δ(x⋆, y_t)`.
    pub regret: f64,
    pub cum_regret: f64,
}

/// Recursion bookkeeping of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameStats {
    pub max_stack_depth: u32,
    pub frames_allocated: u64,
    pub live_frame_bytes_proxy: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    pub horizon: u64,
    pub mode: TraceMode,
    pub records: Vec<TraceRecord>,
    pub frames: FrameStats,
    /// Duels actually played; equals `horizon` for every finished run.
    pub total_duels: u64,
    pub cum_regret: f64,
    /// The arm a learner settled on, when it has one.
    pub final_arm: Option<Point>,
}

impl RegretTrace {
    /// Writes the trace as CSV with a header row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.t,
                r.round,
                r.depth,
                r.cube.as_deref().unwrap_or(NO_CUBE),
                r.regret,
                r.cum_regret
            )?;
        }
        Ok(())
    }

    /// Cumulative regret after duel `t`, if that duel was recorded.
    pub fn cum_regret_at(&self, t: u64) -> Option<f64> {
        self.records
            .binary_search_by_key(&t, |r| r.t)
            .ok()
            .map(|i| self.records[i].cum_regret)
    }
}

/// Recursion statistics of a finished run.
pub fn memory_stats(trace: &RegretTrace) -> FrameStats {
    trace.frames
}

/// Accumulates regret duel by duel and keeps the records the mode asks for.
#[derive(Debug)]
pub struct TraceRecorder {
    horizon: u64,
    mode: TraceMode,
    checkpoints: Vec<u64>,
    next_checkpoint: usize,
    t: u64,
    cum: f64,
    records: Vec<TraceRecord>,
}

impl TraceRecorder {
    pub fn new(horizon: u64, mode: TraceMode) -> Self {
        let records = match mode {
            TraceMode::Full => Vec::with_capacity(horizon.min(1 << 22) as usize),
            TraceMode::Checkpoints => Vec::with_capacity(16),
        };
        Self {
            horizon,
            mode,
            checkpoints: checkpoints(horizon),
            next_checkpoint: 0,
            t: 0,
            cum: 0.0,
            records,
        }
    }

    pub fn duels(&self) -> u64 {
        self.t
    }

    pub fn remaining(&self) -> u64 {
        self.horizon - self.t
    }

    pub fn cum_regret(&self) -> f64 {
        self.cum
    }

    /// Whether any of the next `n` duels will be kept.
    pub fn wants_any(&self, n: u64) -> bool {
        match self.mode {
            TraceMode::Full => n > 0,
            TraceMode::Checkpoints => self
                .checkpoints
                .get(self.next_checkpoint)
                .is_some_and(|&c| c <= self.t + n),
        }
    }

    /// Records one duel.
    #[inline]
    pub fn push(&mut self, round: u32, depth: u32, cube: Option<&Arc<str>>, regret: f64) {
        debug_assert!(self.t < self.horizon, "duel budget exceeded");
        debug_assert!(regret >= 0.0);
        self.t += 1;
        self.cum += regret;
        let keep = match self.mode {
            TraceMode::Full => true,
            TraceMode::Checkpoints => {
                if self.checkpoints.get(self.next_checkpoint) == Some(&self.t) {
                    self.next_checkpoint += 1;
                    true
                } else {
                    false
                }
            }
        };
        if keep {
            self.records.push(TraceRecord {
                t: self.t,
                round,
                depth,
                cube: cube.cloned(),
                regret,
                cum_regret: self.cum,
            });
        }
    }

    pub fn finish(self, frames: FrameStats, final_arm: Option<Point>) -> RegretTrace {
        RegretTrace {
            horizon: self.horizon,
            mode: self.mode,
            records: self.records,
            frames,
            total_duels: self.t,
            cum_regret: self.cum,
            final_arm,
        }
    }
}
