//! Experiment orchestration and on-disk artifacts.

mod config;

pub use config::{MatrixCell, MatrixConfig, OptimizerConfig, ProblemConfig, RlConfig, RunConfig};

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agent::{train_with, EpochMetrics, StepRecord};
use crate::ansatz::{build_linear_ryz, build_qaoa, transpiled_counts, Circuit, GateCounts, QaoaVariant};
use crate::error::{Error, Result};
use crate::metrics::{self, ApproxRatio, EnergyBin, EvalReport, RunOutcome};
use crate::problems::{InstanceSpec, ProblemInstance};
use crate::qsim;
use crate::seed;

/// Version string embedded in every run directory.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Qaoa1,
    Qaoa2,
    Maqaoa,
    Qaoaplus,
    Linear,
    Rlvqc,
}

impl Algorithm {
    pub const BASELINES: [Algorithm; 5] =
        [Algorithm::Qaoa1, Algorithm::Qaoa2, Algorithm::Maqaoa, Algorithm::Qaoaplus, Algorithm::Linear];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Qaoa1 => "qaoa1",
            Algorithm::Qaoa2 => "qaoa2",
            Algorithm::Maqaoa => "maqaoa",
            Algorithm::Qaoaplus => "qaoaplus",
            Algorithm::Linear => "linear",
            Algorithm::Rlvqc => "rlvqc",
        }
    }

    /// Fixed ansatz of a baseline, parameters zeroed. `None` for the learned circuit.
    pub fn build(self, inst: &ProblemInstance) -> Result<Option<Circuit>> {
        let c = match self {
            Algorithm::Qaoa1 => build_qaoa(inst, 1, QaoaVariant::Standard)?,
            Algorithm::Qaoa2 => build_qaoa(inst, 2, QaoaVariant::Standard)?,
            Algorithm::Maqaoa => build_qaoa(inst, 1, QaoaVariant::MultiAngle)?,
            Algorithm::Qaoaplus => build_qaoa(inst, 1, QaoaVariant::Plus)?,
            Algorithm::Linear => build_linear_ryz(inst.n_qubits())?,
            Algorithm::Rlvqc => return Ok(None),
        };
        Ok(Some(c))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Algorithm::Rlvqc]
            .into_iter()
            .chain(Algorithm::BASELINES)
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Bitstring with qubit `n − 1` first.
pub fn bitstring(bits: usize, n: usize) -> String {
    (0..n).rev().map(|q| if bits >> q & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Serialize)]
struct ConfigSnapshot<'a> {
    version: &'a str,
    command: &'a str,
    config: &'a RunConfig,
    instance: InstanceSpec,
}

fn snapshot(out: &Path, command: &str, cfg: &RunConfig, inst: &ProblemInstance) -> Result<()> {
    fs::create_dir_all(out)?;
    write_json(
        &out.join("config.json"),
        &ConfigSnapshot { version: VERSION, command, config: cfg, instance: inst.to_spec() },
    )
}

#[derive(Debug, Serialize)]
struct StepRow<'a> {
    epoch: usize,
    worker: usize,
    episode: usize,
    episode_step: usize,
    action: usize,
    gate: String,
    reward: f64,
    expectation: f64,
    depth: usize,
    seed: u64,
    patience: u32,
    done: bool,
    value: f64,
    log_prob: f64,
    optimizer_calls: usize,
    circuit: &'a str,
}

#[derive(Debug, Serialize)]
struct EpochRow {
    epoch: usize,
    steps: usize,
    episodes_finished: usize,
    mean_episode_return: Option<f64>,
    mean_reward: f64,
    max_reward: f64,
    best_reward: f64,
    approx_kl: f64,
    clip_fraction: f64,
    policy_loss: f64,
    value_loss: f64,
    entropy: f64,
    policy_steps: usize,
}

impl From<&EpochMetrics> for EpochRow {
    fn from(m: &EpochMetrics) -> Self {
        EpochRow {
            epoch: m.epoch,
            steps: m.steps,
            episodes_finished: m.episodes_finished,
            mean_episode_return: m.mean_episode_return,
            mean_reward: m.mean_reward,
            max_reward: m.max_reward,
            best_reward: m.best_reward,
            approx_kl: m.update.approx_kl,
            clip_fraction: m.update.clip_fraction,
            policy_loss: m.update.policy_loss,
            value_loss: m.update.value_loss,
            entropy: m.update.entropy,
            policy_steps: m.update.policy_steps,
        }
    }
}

/// Parsed row of `steps.csv`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct LoggedStep {
    pub epoch: usize,
    pub worker: usize,
    pub episode: usize,
    pub episode_step: usize,
    pub action: usize,
    pub gate: String,
    pub reward: f64,
    pub expectation: f64,
    pub depth: usize,
    pub seed: u64,
    pub patience: u32,
    pub done: bool,
    pub value: f64,
    pub log_prob: f64,
    pub optimizer_calls: usize,
    pub circuit: String,
}

pub fn read_step_log(path: &Path) -> Result<Vec<LoggedStep>> {
    let mut rd = csv::Reader::from_path(path)?;
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub version: String,
    pub best_reward: f64,
    /// Fresh shot estimate of the best circuit's energy.
    pub estimate: f64,
    pub approx_ratio: ApproxRatio,
    pub exact_approx_ratio: ApproxRatio,
    pub eval: EvalReport,
}

/// Trains the agent and writes `config.json`, `steps.csv`, `epochs.csv`,
/// `best_circuit.json` and `report.json` into `out`.
pub fn run_train(cfg: &RunConfig, out: &Path) -> Result<TrainReport> {
    cfg.validate()?;
    cfg.check_trainable()?;
    let inst = cfg.instance()?;
    snapshot(out, "train", cfg, &inst)?;
    let mut steps_csv = csv::Writer::from_path(out.join("steps.csv"))?;
    let mut epochs_csv = csv::Writer::from_path(out.join("epochs.csv"))?;
    let tcfg = cfg.train_config();
    let outcome = train_with(&inst, &tcfg, cfg.master_seed, |steps: &[StepRecord], m: &EpochMetrics| {
        for s in steps {
            let circuit = serde_json::to_string(&s.circuit)?;
            let gate = s.circuit.gates().last().map(|g| format!("{}{:?}", g.kind, g.qubits)).unwrap_or_default();
            steps_csv.serialize(StepRow {
                epoch: s.epoch,
                worker: s.worker,
                episode: s.episode,
                episode_step: s.episode_step,
                action: s.action,
                gate,
                reward: s.reward,
                expectation: s.expectation,
                depth: s.depth,
                seed: s.step_seed,
                patience: s.patience,
                done: s.done,
                value: s.value,
                log_prob: s.log_prob,
                optimizer_calls: s.optimizer_calls,
                circuit: &circuit,
            })?;
        }
        steps_csv.flush()?;
        epochs_csv.serialize(EpochRow::from(m))?;
        epochs_csv.flush()?;
        Ok(())
    })?;
    write_json(&out.join("best_circuit.json"), &outcome.best_circuit)?;

    let best = &outcome.best_circuit;
    let best_step = outcome
        .steps
        .iter()
        .find(|s| s.reward == outcome.best_reward)
        .expect("best reward comes from a logged step");
    let (estimate, approx_ratio) =
        metrics::sampled_approximation_ratio(best, &inst, cfg.shots, seed::derive_path(cfg.master_seed, &[4]))?;
    let run = RunOutcome {
        run: 0,
        initial_params: best.params().to_vec(),
        best_params: best.params().to_vec(),
        optimizer_value: best_step.expectation,
        estimate,
        ratio: approx_ratio,
        function_calls: best_step.optimizer_calls,
    };
    let report = TrainReport {
        version: VERSION.to_string(),
        best_reward: outcome.best_reward,
        estimate,
        approx_ratio,
        exact_approx_ratio: metrics::exact_approximation_ratio(best, &inst)?,
        eval: EvalReport::from_runs(best, &inst, vec![run]),
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
struct RunRow {
    run: usize,
    estimate: f64,
    optimizer_value: f64,
    approx_ratio_raw: f64,
    approx_ratio: f64,
    function_calls: usize,
    initial_params: String,
    best_params: String,
}

/// Averages `cfg.eval_runs` randomly initialized optimizations of a baseline ansatz and
/// writes `config.json`, `circuit.json`, `runs.csv` and `report.json` into `out`.
pub fn run_baseline(cfg: &RunConfig, algorithm: Algorithm, out: &Path) -> Result<EvalReport> {
    cfg.validate()?;
    let inst = cfg.instance()?;
    let circuit = algorithm
        .build(&inst)?
        .ok_or_else(|| Error::Config(format!("{algorithm} is not a fixed ansatz; use train")))?;
    snapshot(out, &format!("baseline {algorithm}"), cfg, &inst)?;
    write_json(&out.join("circuit.json"), &circuit)?;
    let report = metrics::evaluate_circuit(
        &circuit,
        &inst,
        cfg.eval_runs,
        cfg.shots,
        seed::derive_path(cfg.master_seed, &[5]),
        &cfg.minimizer()?,
    )?;
    let mut wr = csv::Writer::from_path(out.join("runs.csv"))?;
    for r in &report.runs {
        wr.serialize(RunRow {
            run: r.run,
            estimate: r.estimate,
            optimizer_value: r.optimizer_value,
            approx_ratio_raw: r.ratio.raw,
            approx_ratio: r.ratio.clamped,
            function_calls: r.function_calls,
            initial_params: serde_json::to_string(&r.initial_params)?,
            best_params: serde_json::to_string(&r.best_params)?,
        })?;
    }
    wr.flush()?;
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub version: String,
    pub instance: InstanceSpec,
    pub e_min: f64,
    pub e_max: f64,
    pub feasibility_threshold_ar: Option<f64>,
    pub degenerate: bool,
    pub n_argmin: usize,
    /// At most 64 minimizing bitstrings, qubit `n − 1` first.
    pub argmin: Vec<String>,
}

pub fn brute_force_report(inst: &ProblemInstance) -> SpectrumReport {
    let n = inst.n_qubits();
    let minimizers = inst.ham.ground_states(usize::MAX);
    SpectrumReport {
        version: VERSION.to_string(),
        instance: inst.to_spec(),
        e_min: inst.spectrum.e_min,
        e_max: inst.spectrum.e_max,
        feasibility_threshold_ar: inst.spectrum.feasibility_threshold_ar,
        degenerate: inst.spectrum.degenerate,
        n_argmin: minimizers.len(),
        argmin: minimizers.iter().take(64).map(|&b| bitstring(b, n)).collect(),
    }
}

/// Writes `spectrum.json` into `out`.
pub fn run_brute_force(cfg: &RunConfig, out: &Path) -> Result<SpectrumReport> {
    cfg.validate()?;
    let inst = cfg.instance()?;
    fs::create_dir_all(out)?;
    let report = brute_force_report(&inst);
    write_json(&out.join("spectrum.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitEvaluation {
    pub version: String,
    pub estimate: f64,
    pub approx_ratio: ApproxRatio,
    pub exact_approx_ratio: ApproxRatio,
    pub counts: GateCounts,
    pub n_params: usize,
    pub histogram: Vec<EnergyBin>,
}

/// Re-scores a saved circuit as-is (no re-optimization) and writes `eval.json`.
pub fn run_eval(cfg: &RunConfig, circuit_path: &Path, out: &Path) -> Result<CircuitEvaluation> {
    cfg.validate()?;
    let inst = cfg.instance()?;
    let text = fs::read_to_string(circuit_path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", circuit_path.display())))?;
    let circuit = Circuit::from_json(&text)?;
    if circuit.n_qubits() != inst.n_qubits() {
        return Err(Error::Config(format!(
            "circuit has {} qubits, instance {}",
            circuit.n_qubits(),
            inst.n_qubits()
        )));
    }
    let dist = qsim::sample_shots(&circuit, cfg.shots, seed::derive_path(cfg.master_seed, &[6]))?;
    let estimate = qsim::estimate_expectation(&dist, &inst.ham)?;
    let eval = CircuitEvaluation {
        version: VERSION.to_string(),
        estimate,
        approx_ratio: metrics::approximation_ratio(estimate, &inst.spectrum)?,
        exact_approx_ratio: metrics::exact_approximation_ratio(&circuit, &inst)?,
        counts: transpiled_counts(&circuit),
        n_params: circuit.n_params(),
        histogram: metrics::energy_histogram(&dist, &inst),
    };
    fs::create_dir_all(out)?;
    write_json(&out.join("eval.json"), &eval)?;
    Ok(eval)
}

/// One line of the matrix table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub problem: String,
    pub topology: String,
    pub n: usize,
    pub algorithm: Algorithm,
    pub approx_ratio: f64,
    pub feasibility_threshold_ar: Option<f64>,
    pub above_feasibility_threshold: bool,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
    pub n_params: usize,
}

impl MatrixRow {
    fn new(cell: &MatrixCell, r: &EvalReport) -> Self {
        let p = &cell.config.problem;
        MatrixRow {
            problem: p.kind.to_string(),
            topology: p.topology.to_string(),
            n: p.n,
            algorithm: cell.algorithm,
            approx_ratio: r.approx_ratio,
            feasibility_threshold_ar: r.feasibility_threshold_ar,
            above_feasibility_threshold: r.above_feasibility_threshold,
            single_qubit_gates: r.single_qubit_gates,
            two_qubit_gates: r.two_qubit_gates,
            depth: r.depth,
            n_params: r.n_params,
        }
    }
}

/// Runs every cell into `out/<cell>` and writes `out/table.csv`. With `resume`, cells
/// whose directory already holds a `report.json` are read back instead of rerun.
pub fn run_matrix(matrix: &MatrixConfig, out: &Path, resume: bool) -> Result<Vec<MatrixRow>> {
    matrix.validate()?;
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for cell in matrix.cells() {
        let dir = out.join(cell.dir_name());
        let report_path = dir.join("report.json");
        let report = if cell.algorithm == Algorithm::Rlvqc {
            if resume && report_path.exists() {
                read_json::<TrainReport>(&report_path)?.eval
            } else {
                run_train(&cell.config, &dir)?.eval
            }
        } else if resume && report_path.exists() {
            read_json::<EvalReport>(&report_path)?
        } else {
            run_baseline(&cell.config, cell.algorithm, &dir)?
        };
        rows.push(MatrixRow::new(&cell, &report));
    }
    let mut wr = csv::Writer::from_path(out.join("table.csv"))?;
    for r in &rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(rows)
}
