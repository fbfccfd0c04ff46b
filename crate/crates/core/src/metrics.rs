//! Approximation ratios, baseline evaluation and solution histograms.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{transpiled_counts, Circuit};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_circuit, Minimizer};
use crate::problems::{ProblemInstance, Spectrum};
use crate::qsim;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxRatio {
    /// `(estimate − e_max)/(e_min − e_max)`, unclamped.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]` for reporting.
    pub clamped: f64,
}

pub fn approximation_ratio(estimate: f64, spectrum: &Spectrum) -> Result<ApproxRatio> {
    if spectrum.e_min >= spectrum.e_max {
        return Err(Error::DegenerateSpectrum(spectrum.e_min));
    }
    let raw = (estimate - spectrum.e_max) / (spectrum.e_min - spectrum.e_max);
    Ok(ApproxRatio { raw, clamped: raw.clamp(0.0, 1.0) })
}

/// Ratio of the exact expectation of `circuit` at its current parameters.
pub fn exact_approximation_ratio(circuit: &Circuit, inst: &ProblemInstance) -> Result<ApproxRatio> {
    let probs = qsim::exact_probabilities(circuit)?;
    approximation_ratio(qsim::exact_expectation(&probs, &inst.ham)?, &inst.spectrum)
}

/// Ratio of a fresh shot estimate of `circuit` at its current parameters.
pub fn sampled_approximation_ratio(circuit: &Circuit, inst: &ProblemInstance, n_shots: u64, seed: u64) -> Result<(f64, ApproxRatio)> {
    let dist = qsim::sample_shots(circuit, n_shots, seed)?;
    let estimate = qsim::estimate_expectation(&dist, &inst.ham)?;
    Ok((estimate, approximation_ratio(estimate, &inst.spectrum)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run: usize,
    pub initial_params: Vec<f64>,
    pub best_params: Vec<f64>,
    pub optimizer_value: f64,
    pub estimate: f64,
    pub ratio: ApproxRatio,
    pub function_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean of the per-run clamped ratios.
    pub approx_ratio: f64,
    pub feasibility_threshold_ar: Option<f64>,
    pub above_feasibility_threshold: bool,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
    pub n_params: usize,
    pub n_runs: usize,
    pub per_run_ratios: Vec<f64>,
    pub runs: Vec<RunOutcome>,
}

impl EvalReport {
    pub fn from_runs(circuit: &Circuit, inst: &ProblemInstance, runs: Vec<RunOutcome>) -> Self {
        let per_run_ratios: Vec<f64> = runs.iter().map(|r| r.ratio.clamped).collect();
        let approx_ratio = per_run_ratios.iter().sum::<f64>() / per_run_ratios.len().max(1) as f64;
        let threshold = inst.spectrum.feasibility_threshold_ar;
        let counts = transpiled_counts(circuit);
        EvalReport {
            approx_ratio,
            feasibility_threshold_ar: threshold,
            above_feasibility_threshold: threshold.is_some_and(|t| approx_ratio >= t),
            single_qubit_gates: counts.single_qubit,
            two_qubit_gates: counts.two_qubit,
            depth: counts.depth,
            n_params: circuit.n_params(),
            n_runs: runs.len(),
            per_run_ratios,
            runs,
        }
    }
}

/// Uniform draw in `[−π, π)` for every parameter.
pub fn random_params(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}

/// One seeded run: random start, optimize, re-estimate with fresh shots.
pub fn evaluate_run(
    circuit: &Circuit,
    inst: &ProblemInstance,
    n_shots: u64,
    run_seed: u64,
    minimizer: &dyn Minimizer,
) -> Result<(Circuit, RunOutcome)> {
    let initial_params = random_params(circuit.n_params(), seed::derive(run_seed, 0));
    let mut c = circuit.clone().with_params(&initial_params)?;
    let opt = optimize_circuit(&mut c, inst, n_shots, seed::derive(run_seed, 1), minimizer)?;
    let (estimate, ratio) = sampled_approximation_ratio(&c, inst, n_shots, seed::derive(run_seed, 2))?;
    let outcome = RunOutcome {
        run: 0,
        initial_params,
        best_params: opt.best_params,
        optimizer_value: opt.best_value,
        estimate,
        ratio,
        function_calls: opt.function_calls,
    };
    Ok((c, outcome))
}

/// Averages `n_runs` independent runs. Run `r` uses seed `derive(seed, r)`, so the
/// result does not depend on how runs are scheduled.
pub fn evaluate_circuit(
    circuit: &Circuit,
    inst: &ProblemInstance,
    n_runs: usize,
    n_shots: u64,
    seed: u64,
    minimizer: &dyn Minimizer,
) -> Result<EvalReport> {
    if n_runs == 0 {
        return Err(Error::InvalidInput("n_runs must be at least 1".into()));
    }
    let runs = (0..n_runs)
        .into_par_iter()
        .map(|r| {
            evaluate_run(circuit, inst, n_shots, seed::derive(seed, r as u64), minimizer)
                .map(|(_, o)| RunOutcome { run: r, ..o })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_runs(circuit, inst, runs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBin {
    pub energy: f64,
    pub frequency: f64,
}

/// Energies of sampled bitstrings binned by exact value, lowest energy first.
pub fn solution_distribution(circuit: &Circuit, inst: &ProblemInstance, n_shots: u64, seed: u64) -> Result<Vec<EnergyBin>> {
    let dist = qsim::sample_shots(circuit, n_shots, seed)?;
    Ok(energy_histogram(&dist, inst))
}

pub fn energy_histogram(dist: &qsim::ShotDistribution, inst: &ProblemInstance) -> Vec<EnergyBin> {
    let mut pairs: Vec<(f64, u64)> = dist.counts().iter().map(|(b, &c)| (inst.ham.energy(b.0), c)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = dist.n_shots() as f64;
    let mut bins: Vec<EnergyBin> = Vec::new();
    for (energy, c) in pairs {
        match bins.last_mut() {
            Some(bin) if bin.energy == energy => bin.frequency += c as f64 / total,
            _ => bins.push(EnergyBin { energy, frequency: c as f64 / total }),
        }
    }
    bins
}
