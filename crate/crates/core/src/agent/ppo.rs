//! Proximal policy optimization with separate policy and value networks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::mlp::{Adam, Mlp};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoConfig {
    pub clip_ratio: f64,
    pub policy_lr: f64,
    pub value_lr: f64,
    pub policy_iters: usize,
    pub value_iters: usize,
    pub target_kl: f64,
    pub hidden: Vec<usize>,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            clip_ratio: 0.2,
            policy_lr: 3e-4,
            value_lr: 1e-3,
            policy_iters: 80,
            value_iters: 80,
            target_kl: 0.015,
            hidden: vec![64, 64],
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.clip_ratio > 0.0) || !(self.policy_lr > 0.0) || !(self.value_lr > 0.0) {
            return bad("clip ratio and learning rates must be positive");
        }
        if self.hidden.contains(&0) {
            return bad("hidden layers must be non-empty");
        }
        Ok(())
    }
}

/// Categorical distribution over actions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    log_probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn from_logits(logits: &[f64]) -> Self {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        ActionDistribution { log_probs: logits.iter().map(|l| l - lse).collect() }
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    pub fn log_prob(&self, action: usize) -> f64 {
        self.log_probs[action]
    }

    pub fn len(&self) -> usize {
        self.log_probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        -self.log_probs.iter().map(|l| l.exp() * l).sum::<f64>()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, l) in self.log_probs.iter().enumerate() {
            acc += l.exp();
            if u < acc {
                return a;
            }
        }
        self.log_probs.len() - 1
    }
}

/// Transitions of one update, with advantages already normalized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub old_log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Rewards-to-go and GAE(γ, λ) advantages of one trajectory segment.
///
/// `bootstrap` is the value of the state after the last transition: zero when the
/// episode terminated, the critic's estimate when the segment was cut short.
pub fn compute_returns_and_advantages(
    rewards: &[f64],
    values: &[f64],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rewards.len(), values.len());
    let n = rewards.len();
    let mut returns = vec![0.0; n];
    let mut advantages = vec![0.0; n];
    let mut ret = bootstrap;
    let mut adv = 0.0;
    let mut next_value = bootstrap;
    for t in (0..n).rev() {
        ret = rewards[t] + gamma * ret;
        let delta = rewards[t] + gamma * next_value - values[t];
        adv = delta + gamma * lambda * adv;
        returns[t] = ret;
        advantages[t] = adv;
        next_value = values[t];
    }
    (returns, advantages)
}

/// Shifts to zero mean and scales to unit (population) standard deviation; a constant
/// input becomes all zeros.
pub fn normalize_advantages(adv: &mut [f64]) {
    if adv.is_empty() {
        return;
    }
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let std = (adv.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
    for a in adv.iter_mut() {
        *a = if std > 1e-12 { (*a - mean) / std } else { 0.0 };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolicyStats {
    pub loss: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpdateDiagnostics {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub entropy: f64,
    pub policy_steps: usize,
}

/// Policy and value networks of identical shape with separate parameters.
#[derive(Debug, Clone)]
pub struct PpoModel {
    pub policy: Mlp,
    pub value: Mlp,
    policy_opt: Adam,
    value_opt: Adam,
    cfg: PpoConfig,
}

impl PpoModel {
    pub fn new(n_inputs: usize, n_actions: usize, cfg: PpoConfig, init_seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut sizes = vec![n_inputs];
        sizes.extend(&cfg.hidden);
        let mut policy_sizes = sizes.clone();
        policy_sizes.push(n_actions);
        sizes.push(1);
        let policy = Mlp::new(&policy_sizes, 0.01, crate::seed::derive(init_seed, 0));
        let value = Mlp::new(&sizes, 1.0, crate::seed::derive(init_seed, 1));
        Ok(PpoModel {
            policy_opt: Adam::new(policy.n_params(), cfg.policy_lr),
            value_opt: Adam::new(value.n_params(), cfg.value_lr),
            policy,
            value,
            cfg,
        })
    }

    pub fn config(&self) -> &PpoConfig {
        &self.cfg
    }

    pub fn n_actions(&self) -> usize {
        self.policy.output_size()
    }

    fn check_input(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.policy.input_size() {
            return Err(Error::InvalidInput(format!(
                "state of length {} for a network expecting {}",
                state.len(),
                self.policy.input_size()
            )));
        }
        Ok(())
    }

    pub fn policy_forward(&self, state: &[f64]) -> Result<ActionDistribution> {
        self.check_input(state)?;
        Ok(ActionDistribution::from_logits(&self.policy.forward(state)))
    }

    pub fn value_forward(&self, state: &[f64]) -> Result<f64> {
        self.check_input(state)?;
        Ok(self.value.forward(state)[0])
    }

    /// Clipped-surrogate loss `−mean(min(ρA, clip(ρ, 1±ε)A))` and its gradient.
    pub fn policy_loss_and_grad(&self, batch: &Batch) -> (PolicyStats, Vec<f64>) {
        let mut grad = vec![0.0; self.policy.n_params()];
        let mut stats = PolicyStats::default();
        let n = batch.len() as f64;
        let eps = self.cfg.clip_ratio;
        for i in 0..batch.len() {
            let cache = self.policy.forward_cached(&batch.observations[i]);
            let dist = ActionDistribution::from_logits(cache.output());
            let a = batch.actions[i];
            let adv = batch.advantages[i];
            let logp = dist.log_prob(a);
            let ratio = (logp - batch.old_log_probs[i]).exp();
            let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
            stats.loss -= (ratio * adv).min(clipped * adv) / n;
            stats.approx_kl += (batch.old_log_probs[i] - logp) / n;
            stats.entropy += dist.entropy() / n;
            if (ratio - 1.0).abs() > eps {
                stats.clip_fraction += 1.0 / n;
            }
            let saturated = (adv > 0.0 && ratio > 1.0 + eps) || (adv < 0.0 && ratio < 1.0 - eps);
            if saturated || adv == 0.0 {
                continue;
            }
            // ∂loss/∂logits = −(ρA/n)·(onehot(a) − π)
            let coef = -ratio * adv / n;
            let grad_logits: Vec<f64> = dist
                .probs()
                .iter()
                .enumerate()
                .map(|(k, p)| coef * (if k == a { 1.0 } else { 0.0 } - p))
                .collect();
            self.policy.backward(&cache, &grad_logits, &mut grad);
        }
        (stats, grad)
    }

    /// Mean squared error of the critic against the returns, and its gradient.
    pub fn value_loss_and_grad(&self, batch: &Batch) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.value.n_params()];
        let n = batch.len() as f64;
        let mut loss = 0.0;
        for i in 0..batch.len() {
            let cache = self.value.forward_cached(&batch.observations[i]);
            let err = cache.output()[0] - batch.returns[i];
            loss += err * err / n;
            self.value.backward(&cache, &[2.0 * err / n], &mut grad);
        }
        (loss, grad)
    }

    /// Up to `policy_iters` Adam steps on the surrogate, stopping early once the
    /// approximate KL to the data-collecting policy exceeds `target_kl`, then
    /// `value_iters` steps on the critic.
    pub fn update(&mut self, batch: &Batch) -> Result<UpdateDiagnostics> {
        if batch.is_empty() {
            return Err(Error::InvalidInput("empty PPO batch".into()));
        }
        let mut diag = UpdateDiagnostics::default();
        let learnable = batch.advantages.iter().any(|&a| a != 0.0);
        for i in 0..self.cfg.policy_iters {
            let (stats, grad) = self.policy_loss_and_grad(batch);
            if !stats.loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite(format!("policy loss {} at step {i}", stats.loss)));
            }
            if i == 0 {
                diag.policy_loss = stats.loss;
                diag.entropy = stats.entropy;
            }
            diag.approx_kl = stats.approx_kl;
            diag.clip_fraction = stats.clip_fraction;
            if stats.approx_kl > self.cfg.target_kl || !learnable {
                break;
            }
            self.policy_opt.step(self.policy.params_mut(), &grad);
            diag.policy_steps += 1;
        }
        for i in 0..self.cfg.value_iters {
            let (loss, grad) = self.value_loss_and_grad(batch);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite(format!("value loss {loss} at step {i}")));
            }
            if i == 0 {
                diag.value_loss = loss;
            }
            self.value_opt.step(self.value.params_mut(), &grad);
        }
        Ok(diag)
    }
}
