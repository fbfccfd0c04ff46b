//! Derivative-free minimization of circuit parameters against shot-estimated energies.

mod cobyla;
mod nelder_mead;

pub use cobyla::{cobyla_minimize, Cobyla};
pub use nelder_mead::NelderMead;

use crate::ansatz::Circuit;
use crate::error::Result;
use crate::problems::ProblemInstance;
use crate::qsim;
use crate::seed;

/// Objective callback. Errors abort the minimization and are propagated.
pub type Objective<'a> = dyn FnMut(&[f64]) -> Result<f64> + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    /// Lowest objective value observed over all calls.
    pub best_value: f64,
    /// Calls made after the initial setup; bounded by the iteration cap.
    pub evaluations: usize,
    /// All objective calls, setup included.
    pub function_calls: usize,
    pub converged: bool,
}

pub trait Minimizer: Send + Sync {
    fn minimize(&self, objective: &mut Objective<'_>, x0: &[f64]) -> Result<OptimizationResult>;
}

/// One objective call of [`CircuitObjective`].
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEvaluation {
    pub params: Vec<f64>,
    pub value: f64,
    pub shots_used: u64,
    pub seed: u64,
}

/// Shot-estimated energy of a circuit as a function of its parameters.
///
/// Call `k` samples with seed `derive(base_seed, k)`, so every evaluation sees fresh
/// shot noise while the whole sequence stays reproducible.
pub struct CircuitObjective<'a> {
    circuit: Circuit,
    inst: &'a ProblemInstance,
    n_shots: u64,
    base_seed: u64,
    calls: u64,
}

impl<'a> CircuitObjective<'a> {
    pub fn new(circuit: Circuit, inst: &'a ProblemInstance, n_shots: u64, base_seed: u64) -> Self {
        CircuitObjective { circuit, inst, n_shots, base_seed, calls: 0 }
    }

    pub fn evaluate(&mut self, params: &[f64]) -> Result<ObjectiveEvaluation> {
        self.circuit.set_params(params)?;
        let seed = seed::derive(self.base_seed, self.calls);
        self.calls += 1;
        let dist = qsim::sample_shots(&self.circuit, self.n_shots, seed)?;
        let value = qsim::estimate_expectation(&dist, &self.inst.ham)?;
        Ok(ObjectiveEvaluation { params: params.to_vec(), value, shots_used: dist.n_shots(), seed })
    }
}

/// Minimizes the shot-estimated energy starting from the circuit's current parameters
/// and stores the best parameters back into `circuit`.
pub fn optimize_circuit(
    circuit: &mut Circuit,
    inst: &ProblemInstance,
    n_shots: u64,
    seed: u64,
    minimizer: &dyn Minimizer,
) -> Result<OptimizationResult> {
    let mut objective = CircuitObjective::new(circuit.clone(), inst, n_shots, seed);
    let x0 = circuit.params().to_vec();
    let result = minimizer.minimize(&mut |x: &[f64]| objective.evaluate(x).map(|e| e.value), &x0)?;
    circuit.set_params(&result.best_params)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_qaoa, QaoaVariant};
    use crate::problems::{Graph, ProblemKind};

    fn k3_cut() -> ProblemInstance {
        ProblemInstance::new(Graph::complete(3), ProblemKind::MaxCut, 2.0, 0).unwrap()
    }

    #[test]
    fn parameterless_circuit_gets_one_evaluation() {
        let inst = k3_cut();
        let mut c = Circuit::hadamard_layer(3).unwrap();
        let r = optimize_circuit(&mut c, &inst, 1000, 4, &Cobyla::default()).unwrap();
        assert_eq!(r.function_calls, 1);
        // six of the eight K3 bitstrings cut two edges: mean energy −12/8
        assert!((inst.ham.mean() + 1.5).abs() < 1e-12);
        assert!((r.best_value + 1.5).abs() < 0.1, "{}", r.best_value);
    }

    #[test]
    fn optimization_is_deterministic_and_writes_back() {
        let inst = k3_cut();
        let base = build_qaoa(&inst, 1, QaoaVariant::Standard).unwrap();
        let mut a = base.clone();
        let mut b = base.clone();
        let ra = optimize_circuit(&mut a, &inst, 500, 9, &Cobyla::default()).unwrap();
        let rb = optimize_circuit(&mut b, &inst, 500, 9, &Cobyla::default()).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a.params(), ra.best_params.as_slice());
    }

    #[test]
    fn objective_reports_shots() {
        let inst = k3_cut();
        let c = build_qaoa(&inst, 1, QaoaVariant::Standard).unwrap();
        let mut obj = CircuitObjective::new(c, &inst, 321, 1);
        let e = obj.evaluate(&[0.1, 0.2]).unwrap();
        assert_eq!(e.shots_used, 321);
        assert_ne!(obj.evaluate(&[0.1, 0.2]).unwrap().seed, e.seed);
    }
}
