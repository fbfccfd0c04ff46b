use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ansatz_rl::harness::{self, Algorithm, MatrixConfig, RunConfig};
use ansatz_rl::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Train and evaluate circuit-building agents and their QAOA-family baselines.
#[derive(Parser)]
#[command(name = "ansatz-rl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `rl.workers`.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory; defaults to a subdirectory of `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Qaoa1,
    Qaoa2,
    Maqaoa,
    Qaoaplus,
    Linear,
}

impl From<Baseline> for Algorithm {
    fn from(b: Baseline) -> Self {
        match b {
            Baseline::Qaoa1 => Algorithm::Qaoa1,
            Baseline::Qaoa2 => Algorithm::Qaoa2,
            Baseline::Maqaoa => Algorithm::Maqaoa,
            Baseline::Qaoaplus => Algorithm::Qaoaplus,
            Baseline::Linear => Algorithm::Linear,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the agent and write the run directory.
    Train(Common),
    /// Evaluate a fixed ansatz over several random initializations.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        algorithm: Baseline,
    },
    /// Enumerate the energy spectrum of the configured instance.
    BruteForce(Common),
    /// Run every cell of a matrix configuration and tabulate the results.
    Matrix {
        #[command(flatten)]
        common: Common,
        /// Skip cells that already have a report.json.
        #[arg(long)]
        resume: bool,
    },
    /// Re-score a saved circuit without re-optimizing it.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        circuit: PathBuf,
    },
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(w) = self.workers {
            cfg.rl.workers = w;
        }
    }

    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        self.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, base: &Path, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| base.join(default))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(c) => {
            let cfg = c.load()?;
            let out = c.out_dir(&cfg.output_dir, "train");
            let r = harness::run_train(&cfg, &out)?;
            println!(
                "best reward {:.4}, A.R. {:.4} (exact {:.4}) -> {}",
                r.best_reward,
                r.approx_ratio.clamped,
                r.exact_approx_ratio.clamped,
                out.display()
            );
        }
        Command::Baseline { common, algorithm } => {
            let cfg = common.load()?;
            let alg = Algorithm::from(algorithm);
            let out = common.out_dir(&cfg.output_dir, &format!("baseline-{alg}"));
            let r = harness::run_baseline(&cfg, alg, &out)?;
            println!("{alg}: mean A.R. {:.4} over {} runs -> {}", r.approx_ratio, r.n_runs, out.display());
        }
        Command::BruteForce(c) => {
            let cfg = c.load()?;
            let out = c.out_dir(&cfg.output_dir, "brute-force");
            let r = harness::run_brute_force(&cfg, &out)?;
            println!("e_min {} e_max {} degenerate {} -> {}", r.e_min, r.e_max, r.degenerate, out.display());
        }
        Command::Matrix { common, resume } => {
            let mut m = MatrixConfig::load(&common.config)?;
            common.apply(&mut m.base);
            let out = common.out_dir(&m.base.output_dir, "matrix");
            let rows = harness::run_matrix(&m, &out, resume)?;
            println!("{} cells -> {}", rows.len(), out.join("table.csv").display());
        }
        Command::Eval { common, circuit } => {
            let cfg = common.load()?;
            let out = common.out_dir(&cfg.output_dir, "eval");
            let r = harness::run_eval(&cfg, &circuit, &out)?;
            println!("estimate {:.4}, A.R. {:.4} -> {}", r.estimate, r.approx_ratio.clamped, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}
