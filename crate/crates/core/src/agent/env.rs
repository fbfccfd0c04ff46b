//! Circuit-construction environment: one action appends one gate.

use serde::{Deserialize, Serialize};

use crate::ansatz::{circuit_depth_basis, ActionSpace, Circuit};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_circuit, Cobyla, OptimizationResult};
use crate::problems::ProblemInstance;
use crate::qsim;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    /// Depth penalty per basis-gate layer.
    pub beta: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig { beta: 0.015, gamma: 0.99, gae_lambda: 0.97 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::Config(format!("beta must be non-negative, got {}", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::Config(format!("gae_lambda must lie in [0, 1], got {}", self.gae_lambda)));
        }
        Ok(())
    }
}

/// How observations are produced. `Exact` is meant for tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateMode {
    #[default]
    Sampled,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub reward: RewardConfig,
    pub n_shots: u64,
    /// Episodes end after `max_steps_factor · n` actions.
    pub max_steps_factor: usize,
    pub patience: u32,
    pub max_iterations: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub state_mode: StateMode,
}

impl Default for EnvConfig {
    fn default() -> Self {
        let c = Cobyla::default();
        EnvConfig {
            reward: RewardConfig::default(),
            n_shots: 1000,
            max_steps_factor: 2,
            patience: 3,
            max_iterations: c.max_iterations,
            rho_begin: c.rho_begin,
            rho_end: c.rho_end,
            state_mode: StateMode::Sampled,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.reward.validate()?;
        self.minimizer()?;
        if self.n_shots == 0 {
            return Err(Error::Config("n_shots must be at least 1".into()));
        }
        if self.max_steps_factor == 0 || self.patience == 0 {
            return Err(Error::Config("episode cap factor and patience must be at least 1".into()));
        }
        Ok(())
    }

    pub fn minimizer(&self) -> Result<Cobyla> {
        Cobyla::new(self.max_iterations, self.rho_begin, self.rho_end)
    }
}

/// Energy estimate, basis depth and reward of an optimized circuit.
///
/// The estimate uses fresh shots drawn with `derive(step_seed, 1)`, so a logged step can
/// be re-scored exactly from its circuit and seed.
pub fn score_circuit(
    circuit: &Circuit,
    inst: &ProblemInstance,
    cfg: &EnvConfig,
    step_seed: u64,
) -> Result<(f64, usize, f64)> {
    let dist = qsim::sample_shots(circuit, cfg.n_shots, seed::derive(step_seed, 1))?;
    let expectation = qsim::estimate_expectation(&dist, &inst.ham)?;
    let depth = circuit_depth_basis(circuit);
    Ok((expectation, depth, -expectation - cfg.reward.beta * depth as f64))
}

/// A reward strictly below the episode best costs one unit of patience; anything else
/// restores one, up to `cap`.
pub fn next_patience(patience: u32, reward: f64, best_in_episode: f64, cap: u32) -> u32 {
    if reward < best_in_episode {
        patience.saturating_sub(1)
    } else {
        (patience + 1).min(cap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: Vec<f64>,
    pub reward: f64,
    pub expectation: f64,
    pub depth: usize,
    pub done: bool,
    pub patience: u32,
    pub optimization: OptimizationResult,
}

#[derive(Debug, Clone)]
pub struct Environment<'a> {
    inst: &'a ProblemInstance,
    cfg: EnvConfig,
    minimizer: Cobyla,
    actions: ActionSpace,
    circuit: Circuit,
    state: Vec<f64>,
    steps: usize,
    patience: u32,
    best_reward: f64,
    done: bool,
}

impl<'a> Environment<'a> {
    pub fn new(inst: &'a ProblemInstance, cfg: EnvConfig, reset_seed: u64) -> Result<Self> {
        cfg.validate()?;
        let n = inst.n_qubits();
        let mut env = Environment {
            inst,
            minimizer: cfg.minimizer()?,
            cfg,
            actions: ActionSpace::new(n)?,
            circuit: Circuit::hadamard_layer(n)?,
            state: Vec::new(),
            steps: 0,
            patience: 0,
            best_reward: f64::NEG_INFINITY,
            done: false,
        };
        env.reset(reset_seed)?;
        Ok(env)
    }

    /// Back to a single Hadamard layer.
    pub fn reset(&mut self, seed: u64) -> Result<&[f64]> {
        self.circuit = Circuit::hadamard_layer(self.inst.n_qubits())?;
        self.state = self.observe(seed)?;
        self.steps = 0;
        self.patience = self.cfg.patience;
        self.best_reward = f64::NEG_INFINITY;
        self.done = false;
        Ok(&self.state)
    }

    fn observe(&self, seed: u64) -> Result<Vec<f64>> {
        match self.cfg.state_mode {
            StateMode::Exact => qsim::exact_probabilities(&self.circuit),
            StateMode::Sampled => Ok(qsim::sample_shots(&self.circuit, self.cfg.n_shots, seed)?.frequencies()),
        }
    }

    pub fn step(&mut self, action: usize, step_seed: u64) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::InvalidInput("step on a finished episode; call reset".into()));
        }
        if action >= self.actions.len() {
            return Err(Error::InvalidInput(format!(
                "action {action} outside an action space of {}",
                self.actions.len()
            )));
        }
        self.actions.apply(&mut self.circuit, action)?;
        let optimization = optimize_circuit(
            &mut self.circuit,
            self.inst,
            self.cfg.n_shots,
            seed::derive(step_seed, 0),
            &self.minimizer,
        )?;
        let (expectation, depth, reward) = score_circuit(&self.circuit, self.inst, &self.cfg, step_seed)?;
        self.state = self.observe(seed::derive(step_seed, 2))?;
        self.steps += 1;

        self.patience = next_patience(self.patience, reward, self.best_reward, self.cfg.patience);
        self.best_reward = self.best_reward.max(reward);
        self.done = self.steps >= self.max_steps() || self.patience == 0;
        Ok(StepOutcome {
            state: self.state.clone(),
            reward,
            expectation,
            depth,
            done: self.done,
            patience: self.patience,
            optimization,
        })
    }

    pub fn max_steps(&self) -> usize {
        self.cfg.max_steps_factor * self.inst.n_qubits()
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn patience(&self) -> u32 {
        self.patience
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn action_space(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.inst
    }
}
