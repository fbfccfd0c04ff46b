//! Reinforcement-learning agent that grows circuits gate by gate.

mod env;
mod mlp;
mod ppo;
mod train;

pub use env::{next_patience, score_circuit, EnvConfig, Environment, RewardConfig, StateMode, StepOutcome};
pub use mlp::{Adam, ForwardCache, Mlp};
pub use ppo::{
    compute_returns_and_advantages, normalize_advantages, ActionDistribution, Batch, PolicyStats, PpoConfig,
    PpoModel, UpdateDiagnostics,
};
pub use train::{train, train_with, EpochMetrics, StepRecord, TrainConfig, TrainOutcome, MAX_TRAIN_QUBITS};
