use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use logduelli::harness::{
    self, experiment::resolve_out_dir, load_config, Config, RunOptions, Suite, OUT_DIR_ENV,
};

#[derive(Parser)]
#[command(
    name = "logduelli",
    version,
    about = "Lipschitz dueling bandit simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Added to every configured seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed_offset: u64,

    /// Write every duel to the trace files, whatever the horizon.
    #[arg(long, global = true)]
    full_trace: bool,

    /// Output directory (overrides the config's `output`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Fallback output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "out", hide = true)]
    default_out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: a trace CSV per seed plus aggregate.csv.
    Run { config: PathBuf },
    /// Run a horizon sweep and fit the regret exponent.
    Sweep { config: PathBuf },
    /// Run a validation suite: transfer, sti, concentration, no_elim, shrink, memory, all.
    Validate { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> logduelli::Result<bool> {
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        seed_offset: cli.seed_offset,
        full_trace: cli.full_trace,
    };
    match &cli.command {
        Command::Run { config } => {
            let cfg = match load_config(config)? {
                Config::Experiment(cfg) => cfg,
                Config::Sweep(s) => s.base,
            };
            let out = resolve_out_dir(&opts, &cfg, &cli.default_out);
            let summary = harness::run_experiment(&cfg, &out, &opts)?;
            for s in &summary.seeds {
                println!(
                    "seed {}: R(T) = {:.3}, max stack depth {}, trace {}",
                    s.seed,
                    s.final_regret,
                    s.max_stack_depth,
                    s.trace_path.display()
                );
            }
            println!(
                "mean R(T) = {:.3}, max stack depth {}, aggregate {}",
                summary.mean_final_regret,
                summary.max_stack_depth,
                summary.aggregate_path.display()
            );
            Ok(true)
        }
        Command::Sweep { config } => {
            let Config::Sweep(cfg) = load_config(config)? else {
                return Err(logduelli::Error::Validation {
                    field: "horizons".into(),
                    reason: "a sweep config needs a `horizons` list".into(),
                });
            };
            let out = resolve_out_dir(&opts, &cfg.base, &cli.default_out);
            let summary = harness::run_sweep(&cfg, &out, &opts)?;
            for r in &summary.rows {
                println!(
                    "T = {:>9}: mean R = {:.3} (sd {:.3}), mean log2 R = {:.4}",
                    r.horizon, r.mean_regret, r.std_regret, r.mean_log2_regret
                );
            }
            println!(
                "{} regret exponent: {:.4}",
                summary.learner, summary.exponent
            );
            Ok(true)
        }
        Command::Validate { suite } => {
            let suite: Suite = suite.parse()?;
            let report = harness::validate(suite);
            println!("{report}");
            Ok(report.passed())
        }
    }
}
