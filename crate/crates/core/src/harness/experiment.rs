//! Seeded replications, aggregate statistics and CSV output.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::env::DuelOracle;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, LearnerSpec, SweepConfig};
use crate::learner::{self, Schedule};
use crate::rng::{RandomStream, ENVIRONMENT_STREAM, LEARNER_STREAM};
use crate::trace::{checkpoints, RegretTrace, TraceMode, TRACE_HEADER};

/// Horizons up to this size record every duel by default.
pub const FULL_TRACE_LIMIT: u64 = 1 << 16;

pub const AGGREGATE_HEADER: &str = "t,mean_cum_regret,std_cum_regret,replications";
pub const SWEEP_HEADER: &str = "T,log2_T,replications,mean_regret,std_regret,mean_log2_regret";

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed_offset: u64,
    pub full_trace: bool,
}

/// One learner run on fresh oracle and learner streams derived from `seed`.
pub fn run_replication(
    cfg: &ExperimentConfig,
    horizon: u64,
    seed: u64,
    mode: TraceMode,
) -> Result<RegretTrace> {
    let mut oracle = DuelOracle::new(cfg.env.clone(), RandomStream::new(seed, ENVIRONMENT_STREAM));
    let mut rng = RandomStream::new(seed, LEARNER_STREAM);
    match cfg.learner {
        LearnerSpec::LogDuelLi => {
            let schedule = Schedule::new(horizon, cfg.delta, cfg.zooming_dim_or_default())?;
            learner::run(&schedule, &mut oracle, &mut rng, mode)
        }
        LearnerSpec::Baseline(kind) => kind.run(horizon, &mut oracle, &mut rng, mode),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub t: u64,
    pub mean: f64,
    pub std: f64,
    pub replications: usize,
}

/// Sample mean and standard deviation (`n − 1` denominator; 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates `(t, cum_regret)` series at the 16 checkpoints of `horizon`.
/// Series must contain every checkpoint.
pub fn aggregate(series: &[Vec<(u64, f64)>], horizon: u64) -> Result<Vec<AggregateRow>> {
    checkpoints(horizon)
        .into_iter()
        .map(|t| {
            let values = series
                .iter()
                .map(|s| {
                    s.binary_search_by_key(&t, |&(u, _)| u)
                        .map(|i| s[i].1)
                        .map_err(|_| Error::field("trace", format!("checkpoint t={t} missing")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean, std) = mean_std(&values);
            Ok(AggregateRow {
                t,
                mean,
                std,
                replications: values.len(),
            })
        })
        .collect()
}

fn trace_series(trace: &RegretTrace) -> Vec<(u64, f64)> {
    trace.records.iter().map(|r| (r.t, r.cum_regret)).collect()
}

/// Reads the `(t, cum_regret)` columns back from a trace CSV.
pub fn read_trace_series(path: &Path) -> Result<Vec<(u64, f64)>> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let bad = |line: usize| Error::Parse {
        path: path.to_path_buf(),
        message: format!("malformed trace row at line {line}"),
    };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if i == 0 {
            if line != TRACE_HEADER {
                return Err(bad(1));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(bad(i + 1));
        }
        let t = cols[0].parse().map_err(|_| bad(i + 1))?;
        let cum = cols[5].parse().map_err(|_| bad(i + 1))?;
        out.push((t, cum));
    }
    Ok(out)
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.t, r.mean, r.std, r.replications)?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Output directory: command line, then config, then `fallback`.
pub fn resolve_out_dir(opts: &RunOptions, cfg: &ExperimentConfig, fallback: &Path) -> PathBuf {
    opts.out_dir
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| fallback.to_path_buf())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_regret: f64,
    pub max_stack_depth: u32,
    pub trace_path: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary {
    pub seeds: Vec<SeedSummary>,
    pub aggregate: Vec<AggregateRow>,
    pub aggregate_path: PathBuf,
    pub mean_final_regret: f64,
    pub max_stack_depth: u32,
}

/// Runs every seed, writes `trace_seed<k>.csv` per seed and `aggregate.csv`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<ExperimentSummary> {
    cfg.validate()?;
    ensure_dir(out_dir)?;
    let mode = if opts.full_trace || cfg.full_trace || cfg.horizon <= FULL_TRACE_LIMIT {
        TraceMode::Full
    } else {
        TraceMode::Checkpoints
    };
    let seeds: Vec<u64> = cfg.seeds.iter().map(|s| s + opts.seed_offset).collect();
    let traces = seeds
        .par_iter()
        .map(|&seed| run_replication(cfg, cfg.horizon, seed, mode))
        .collect::<Result<Vec<_>>>()?;

    let mut per_seed = Vec::with_capacity(seeds.len());
    for (&seed, trace) in seeds.iter().zip(&traces) {
        let path = out_dir.join(format!("trace_seed{seed}.csv"));
        write_file(&path, |w| trace.write_csv(w))?;
        per_seed.push(SeedSummary {
            seed,
            final_regret: trace.cum_regret,
            max_stack_depth: trace.frames.max_stack_depth,
            trace_path: path,
        });
    }

    let series: Vec<_> = traces.iter().map(trace_series).collect();
    let rows = aggregate(&series, cfg.horizon)?;
    let aggregate_path = out_dir.join("aggregate.csv");
    write_file(&aggregate_path, |w| write_aggregate_csv(&rows, w))?;

    let mean_final_regret = rows.last().map_or(0.0, |r| r.mean);
    Ok(ExperimentSummary {
        max_stack_depth: per_seed
            .iter()
            .map(|s| s.max_stack_depth)
            .max()
            .unwrap_or(0),
        seeds: per_seed,
        aggregate: rows,
        aggregate_path,
        mean_final_regret,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub horizon: u64,
    pub replications: usize,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub mean_log2_regret: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub learner: String,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of mean `log2 R(T)` against `log2 T`.
    pub exponent: f64,
    pub intercept: f64,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, a)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Runs the sweep without touching the filesystem.
pub fn sweep(cfg: &SweepConfig, seed_offset: u64) -> Result<SweepSummary> {
    cfg.validate()?;
    let seeds: Vec<u64> = cfg.seeds().into_iter().map(|s| s + seed_offset).collect();
    let jobs: Vec<(u64, u64)> = cfg
        .horizons
        .iter()
        .flat_map(|&h| seeds.iter().map(move |&s| (h, s)))
        .collect();
    let finals = jobs
        .par_iter()
        .map(|&(h, s)| {
            run_replication(&cfg.base, h, s, TraceMode::Checkpoints).map(|t| t.cum_regret)
        })
        .collect::<Result<Vec<f64>>>()?;

    let rows: Vec<SweepRow> = cfg
        .horizons
        .iter()
        .zip(finals.chunks(seeds.len()))
        .map(|(&horizon, regrets)| {
            let (mean, std) = mean_std(regrets);
            let logs: Vec<f64> = regrets.iter().map(|r| r.log2()).collect();
            SweepRow {
                horizon,
                replications: regrets.len(),
                mean_regret: mean,
                std_regret: std,
                mean_log2_regret: mean_std(&logs).0,
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (r.horizon as f64).log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_log2_regret).collect();
    let (exponent, intercept) = fit_line(&xs, &ys);
    Ok(SweepSummary {
        learner: cfg.base.learner.to_string(),
        rows,
        exponent,
        intercept,
    })
}

/// Runs the sweep and writes `sweep.csv` and `sweep_fit.csv` into `out_dir`.
pub fn run_sweep(cfg: &SweepConfig, out_dir: &Path, opts: &RunOptions) -> Result<SweepSummary> {
    let summary = sweep(cfg, opts.seed_offset)?;
    ensure_dir(out_dir)?;
    write_file(&out_dir.join("sweep.csv"), |w| {
        writeln!(w, "{SWEEP_HEADER}")?;
        for r in &summary.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.horizon,
                (r.horizon as f64).log2(),
                r.replications,
                r.mean_regret,
                r.std_regret,
                r.mean_log2_regret
            )?;
        }
        Ok(())
    })?;
    write_file(&out_dir.join("sweep_fit.csv"), |w| {
        writeln!(w, "learner,exponent,intercept")?;
        writeln!(
            w,
            "{},{},{}",
            summary.learner, summary.exponent, summary.intercept
        )
    })?;
    Ok(summary)
}
