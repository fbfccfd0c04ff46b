//! Reinforcement-learning construction of variational quantum circuits for QUBO
//! problems, together with the simulator, problem generators, baselines and
//! metrics needed to train and evaluate it.
//!
//! Module map:
//! - [`qsim`]: statevector simulation, shot sampling, expectation estimates
//! - [`problems`]: graphs, QUBO formulations, energy tables, spectra
//! - [`ansatz`]: circuit model, gate catalog, decompositions, QAOA and `Ryz` builders
//! - [`optimizer`]: COBYLA and Nelder–Mead over shot-estimated energies
//! - [`agent`]: the circuit-building environment and its PPO learner
//! - [`metrics`]: approximation ratios, evaluation reports, solution histograms
//! - [`harness`]: run configuration, artifacts and the experiment matrix

pub mod agent;
pub mod ansatz;
pub mod error;
pub mod gates;
pub mod harness;
pub mod metrics;
pub mod optimizer;
pub mod problems;
pub mod qsim;
pub mod seed;

pub use agent::{PpoModel, TrainConfig, TrainOutcome};
pub use ansatz::{ActionSpace, Circuit, GateApplication, GateCounts, QaoaVariant};
pub use error::{Error, Result};
pub use gates::{Axis, GateKind, Op};
pub use harness::{Algorithm, RunConfig};
pub use metrics::{ApproxRatio, EvalReport};
pub use optimizer::{Cobyla, Minimizer, NelderMead, OptimizationResult};
pub use problems::{DiagonalHamiltonian, Graph, ProblemInstance, ProblemKind, QuboMatrix, Spectrum, Topology};
pub use qsim::{BasisOutcome, ShotDistribution, StateVector};
