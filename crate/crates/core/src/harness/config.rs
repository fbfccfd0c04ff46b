//! TOML run and matrix configurations.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::{EnvConfig, PpoConfig, RewardConfig, StateMode, TrainConfig, MAX_TRAIN_QUBITS};
use crate::error::{Error, Result};
use crate::optimizer::Cobyla;
use crate::problems::{ProblemInstance, ProblemKind, Topology, DEFAULT_PENALTY};
use crate::qsim::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub topology: Topology,
    pub n: usize,
    pub seed: u64,
    pub penalty: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            kind: ProblemKind::MaxCut,
            topology: Topology::ThreeRegular,
            n: 8,
            seed: 0,
            penalty: DEFAULT_PENALTY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    pub workers: usize,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub max_episode_steps_factor: usize,
    pub patience: u32,
}

impl Default for RlConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let r = RewardConfig::default();
        RlConfig {
            epochs: t.epochs,
            steps_per_epoch: t.steps_per_epoch,
            workers: t.workers,
            beta: r.beta,
            gamma: r.gamma,
            lambda: r.gae_lambda,
            max_episode_steps_factor: t.env.max_steps_factor,
            patience: t.env.patience,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let c = Cobyla::default();
        OptimizerConfig { max_iterations: c.max_iterations, rho_begin: c.rho_begin, rho_end: c.rho_end }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub rl: RlConfig,
    pub optimizer: OptimizerConfig,
    pub shots: u64,
    /// Independent optimizations averaged by baseline evaluations.
    pub eval_runs: usize,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: ProblemConfig::default(),
            rl: RlConfig::default(),
            optimizer: OptimizerConfig::default(),
            shots: 1000,
            eval_runs: 10,
            output_dir: PathBuf::from("runs"),
            master_seed: 0,
        }
    }
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: RunConfig = read_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.problem.n;
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!("problem.n must lie in 2..={MAX_QUBITS}, got {n}")));
        }
        if self.shots == 0 || self.eval_runs == 0 {
            return Err(Error::Config("shots and eval_runs must be positive".into()));
        }
        if let Topology::ErdosRenyi(p) = self.problem.topology {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
            }
        }
        if self.problem.kind.is_constrained() && !(self.problem.penalty > 1.0) {
            return Err(Error::Config(format!("penalty must exceed 1, got {}", self.problem.penalty)));
        }
        self.minimizer()?;
        self.train_config().validate()
    }

    pub fn minimizer(&self) -> Result<Cobyla> {
        let o = self.optimizer;
        Cobyla::new(o.max_iterations, o.rho_begin, o.rho_end)
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        let p = &self.problem;
        ProblemInstance::generate(p.topology, p.n, p.kind, p.penalty, p.seed)
    }

    /// Agent settings; the register-size cap is checked separately by the trainer.
    pub fn train_config(&self) -> TrainConfig {
        let rl = &self.rl;
        TrainConfig {
            epochs: rl.epochs,
            steps_per_epoch: rl.steps_per_epoch,
            workers: rl.workers,
            env: EnvConfig {
                reward: RewardConfig { beta: rl.beta, gamma: rl.gamma, gae_lambda: rl.lambda },
                n_shots: self.shots,
                max_steps_factor: rl.max_episode_steps_factor,
                patience: rl.patience,
                max_iterations: self.optimizer.max_iterations,
                rho_begin: self.optimizer.rho_begin,
                rho_end: self.optimizer.rho_end,
                state_mode: StateMode::Sampled,
            },
            ppo: PpoConfig::default(),
        }
    }

    pub fn check_trainable(&self) -> Result<()> {
        if self.problem.n > MAX_TRAIN_QUBITS {
            return Err(Error::Config(format!(
                "training is limited to {MAX_TRAIN_QUBITS} qubits, got {}",
                self.problem.n
            )));
        }
        Ok(())
    }
}

/// Cartesian product of problems, topologies, sizes and algorithms over a base config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    #[serde(default)]
    pub base: RunConfig,
    pub problems: Vec<ProblemKind>,
    pub topologies: Vec<Topology>,
    pub sizes: Vec<usize>,
    pub algorithms: Vec<super::Algorithm>,
}

impl MatrixConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: MatrixConfig = read_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.topologies.is_empty() || self.sizes.is_empty() || self.algorithms.is_empty() {
            return Err(Error::Config("matrix axes must all be non-empty".into()));
        }
        for cell in self.cells() {
            cell.config.validate()?;
            if cell.algorithm == super::Algorithm::Rlvqc {
                cell.config.check_trainable()?;
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<MatrixCell> {
        let mut out = Vec::new();
        for &kind in &self.problems {
            for &topology in &self.topologies {
                for &n in &self.sizes {
                    for &algorithm in &self.algorithms {
                        let mut config = self.base.clone();
                        config.problem.kind = kind;
                        config.problem.topology = topology;
                        config.problem.n = n;
                        out.push(MatrixCell { config, algorithm });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub config: RunConfig,
    pub algorithm: super::Algorithm,
}

impl MatrixCell {
    pub fn dir_name(&self) -> String {
        let p = &self.config.problem;
        format!("{}_{}_n{}_{}", p.kind, p.topology, p.n, self.algorithm)
    }
}
