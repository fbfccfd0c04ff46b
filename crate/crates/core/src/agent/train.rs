//! Epoch loop: parallel rollouts with a frozen model, then one PPO update.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;
use crate::seed;

use super::env::{EnvConfig, Environment};
use super::ppo::{compute_returns_and_advantages, normalize_advantages, Batch, PpoConfig, PpoModel, UpdateDiagnostics};

/// Largest register the agent is trained on; observations have `2^n` entries.
pub const MAX_TRAIN_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    pub workers: usize,
    pub env: EnvConfig,
    pub ppo: PpoConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 64,
            steps_per_epoch: 384,
            workers: 6,
            env: EnvConfig::default(),
            ppo: PpoConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.steps_per_epoch == 0 || self.workers == 0 {
            return Err(Error::Config("epochs, steps_per_epoch and workers must be positive".into()));
        }
        if self.workers > self.steps_per_epoch {
            return Err(Error::Config(format!(
                "{} workers cannot share {} steps per epoch",
                self.workers, self.steps_per_epoch
            )));
        }
        self.env.validate()?;
        self.ppo.validate()
    }

    /// Steps collected by worker `w` in every epoch.
    pub fn worker_steps(&self, w: usize) -> usize {
        self.steps_per_epoch / self.workers + usize::from(w < self.steps_per_epoch % self.workers)
    }
}

/// One logged environment step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub epoch: usize,
    pub worker: usize,
    /// Episode counter of the worker.
    pub episode: usize,
    pub episode_step: usize,
    pub action: usize,
    pub reward: f64,
    pub expectation: f64,
    pub depth: usize,
    pub step_seed: u64,
    pub patience: u32,
    pub done: bool,
    pub value: f64,
    pub log_prob: f64,
    pub optimizer_calls: usize,
    /// Circuit after the step, parameters included.
    pub circuit: Circuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub steps: usize,
    pub episodes_finished: usize,
    /// Mean undiscounted return of episodes that finished during the epoch.
    pub mean_episode_return: Option<f64>,
    pub mean_reward: f64,
    pub max_reward: f64,
    pub best_reward: f64,
    pub update: UpdateDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub best_circuit: Circuit,
    pub best_reward: f64,
    pub history: Vec<EpochMetrics>,
    pub steps: Vec<StepRecord>,
}

struct Worker<'a> {
    id: usize,
    env: Environment<'a>,
    rng: ChaCha8Rng,
    master: u64,
    episode: usize,
    step_counter: u64,
    episode_return: f64,
}

struct Rollout {
    records: Vec<StepRecord>,
    batch: Batch,
    finished_returns: Vec<f64>,
}

impl<'a> Worker<'a> {
    fn reset_seed(master: u64, worker: usize, episode: usize) -> u64 {
        seed::derive_path(master, &[3, worker as u64, episode as u64])
    }

    fn collect(&mut self, model: &PpoModel, epoch: usize, n_steps: usize, gamma: f64, lambda: f64) -> Result<Rollout> {
        let mut out = Rollout { records: Vec::with_capacity(n_steps), batch: Batch::default(), finished_returns: Vec::new() };
        let mut rewards = Vec::new();
        let mut values = Vec::new();
        let finish = |out: &mut Rollout, rewards: &mut Vec<f64>, values: &mut Vec<f64>, bootstrap: f64| {
            let (ret, adv) = compute_returns_and_advantages(rewards, values, bootstrap, gamma, lambda);
            out.batch.returns.extend(ret);
            out.batch.advantages.extend(adv);
            rewards.clear();
            values.clear();
        };
        for _ in 0..n_steps {
            let state = self.env.state().to_vec();
            let dist = model.policy_forward(&state)?;
            let value = model.value_forward(&state)?;
            let action = dist.sample(&mut self.rng);
            let log_prob = dist.log_prob(action);
            let step_seed = seed::derive_path(self.master, &[2, self.id as u64, self.step_counter]);
            self.step_counter += 1;
            let res = self.env.step(action, step_seed)?;

            out.batch.observations.push(state);
            out.batch.actions.push(action);
            out.batch.old_log_probs.push(log_prob);
            rewards.push(res.reward);
            values.push(value);
            self.episode_return += res.reward;
            out.records.push(StepRecord {
                epoch,
                worker: self.id,
                episode: self.episode,
                episode_step: self.env.steps(),
                action,
                reward: res.reward,
                expectation: res.expectation,
                depth: res.depth,
                step_seed,
                patience: res.patience,
                done: res.done,
                value,
                log_prob,
                optimizer_calls: res.optimization.function_calls,
                circuit: self.env.circuit().clone(),
            });
            if res.done {
                finish(&mut out, &mut rewards, &mut values, 0.0);
                out.finished_returns.push(self.episode_return);
                self.episode_return = 0.0;
                self.episode += 1;
                self.env.reset(Self::reset_seed(self.master, self.id, self.episode))?;
            }
        }
        if !rewards.is_empty() {
            // cut at the epoch boundary: the episode continues next epoch
            let bootstrap = model.value_forward(self.env.state())?;
            finish(&mut out, &mut rewards, &mut values, bootstrap);
        }
        Ok(out)
    }
}

/// Trains an agent on one instance.
///
/// Seeds are derived from `master_seed` per worker and per step, so the run is
/// reproducible for any fixed worker count; each worker's trajectory is independent of
/// thread scheduling. `on_epoch` sees the steps and metrics of every finished epoch.
pub fn train_with<F>(inst: &ProblemInstance, cfg: &TrainConfig, master_seed: u64, mut on_epoch: F) -> Result<TrainOutcome>
where
    F: FnMut(&[StepRecord], &EpochMetrics) -> Result<()>,
{
    cfg.validate()?;
    let n = inst.n_qubits();
    if n > MAX_TRAIN_QUBITS {
        return Err(Error::Config(format!("training is limited to {MAX_TRAIN_QUBITS} qubits, got {n}")));
    }
    let mut workers = (0..cfg.workers)
        .map(|w| {
            Ok(Worker {
                id: w,
                env: Environment::new(inst, cfg.env.clone(), Worker::reset_seed(master_seed, w, 0))?,
                rng: ChaCha8Rng::seed_from_u64(seed::derive_path(master_seed, &[1, w as u64])),
                master: master_seed,
                episode: 0,
                step_counter: 0,
                episode_return: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_actions = workers[0].env.action_space().len();
    let mut model = PpoModel::new(1 << n, n_actions, cfg.ppo.clone(), seed::derive_path(master_seed, &[0]))?;

    let (gamma, lambda) = (cfg.env.reward.gamma, cfg.env.reward.gae_lambda);
    let mut best: Option<(f64, Circuit)> = None;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut all_steps = Vec::new();

    for epoch in 0..cfg.epochs {
        let frozen = &model;
        let rollouts = workers
            .par_iter_mut()
            .map(|w| {
                let steps = cfg.worker_steps(w.id);
                w.collect(frozen, epoch, steps, gamma, lambda)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut batch = Batch::default();
        let mut finished = Vec::new();
        let first_record = all_steps.len();
        for r in rollouts {
            for rec in &r.records {
                if best.as_ref().map_or(true, |(b, _)| rec.reward > *b) {
                    best = Some((rec.reward, rec.circuit.clone()));
                }
            }
            all_steps.extend(r.records);
            batch.observations.extend(r.batch.observations);
            batch.actions.extend(r.batch.actions);
            batch.old_log_probs.extend(r.batch.old_log_probs);
            batch.advantages.extend(r.batch.advantages);
            batch.returns.extend(r.batch.returns);
            finished.extend(r.finished_returns);
        }
        normalize_advantages(&mut batch.advantages);
        let update = model.update(&batch)?;

        let epoch_steps = &all_steps[first_record..];
        let rewards: Vec<f64> = epoch_steps.iter().map(|s| s.reward).collect();
        let metrics = EpochMetrics {
            epoch,
            steps: rewards.len(),
            episodes_finished: finished.len(),
            mean_episode_return: (!finished.is_empty()).then(|| finished.iter().sum::<f64>() / finished.len() as f64),
            mean_reward: rewards.iter().sum::<f64>() / rewards.len() as f64,
            max_reward: rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            best_reward: best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0),
            update,
        };
        on_epoch(epoch_steps, &metrics)?;
        history.push(metrics);
    }

    let (best_reward, best_circuit) = best.expect("at least one step was taken");
    Ok(TrainOutcome { best_circuit, best_reward, history, steps: all_steps })
}

pub fn train(inst: &ProblemInstance, cfg: &TrainConfig, master_seed: u64) -> Result<TrainOutcome> {
    train_with(inst, cfg, master_seed, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Graph, ProblemKind, Topology};

    fn toy() -> ProblemInstance {
        let g = Graph::from_edges(2, &[(0, 1)], Topology::Cycle).unwrap();
        ProblemInstance::new(g, ProblemKind::MaxCut, 2.0, 0).unwrap()
    }

    fn small(epochs: usize, steps: usize, workers: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            steps_per_epoch: steps,
            workers,
            env: EnvConfig { max_iterations: 30, n_shots: 200, ..EnvConfig::default() },
            ppo: PpoConfig { hidden: vec![8, 8], policy_iters: 5, value_iters: 5, ..PpoConfig::default() },
        }
    }

    #[test]
    fn one_epoch_plumbing() {
        let out = train(&toy(), &small(1, 4, 1), 3).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.steps.len(), 4);
        assert!(out.best_circuit.gates().len() > 2);
        assert!(out.steps.iter().all(|s| s.reward <= out.best_reward));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = train(&toy(), &small(2, 6, 2), 11).unwrap();
        let b = train(&toy(), &small(2, 6, 2), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn steps_partitioned_across_workers() {
        let cfg = small(1, 10, 3);
        assert_eq!((0..3).map(|w| cfg.worker_steps(w)).collect::<Vec<_>>(), vec![4, 3, 3]);
        let out = train(&toy(), &cfg, 0).unwrap();
        for w in 0..3 {
            assert_eq!(out.steps.iter().filter(|s| s.worker == w).count(), cfg.worker_steps(w));
        }
    }

    #[test]
    fn oversized_instance_rejected() {
        let inst = ProblemInstance::generate(Topology::Cycle, 17, ProblemKind::MaxCut, 2.0, 0);
        if let Ok(inst) = inst {
            assert!(train(&inst, &small(1, 1, 1), 0).unwrap_err().is_config());
        }
        assert!(small(1, 2, 3).validate().is_err());
    }
}
