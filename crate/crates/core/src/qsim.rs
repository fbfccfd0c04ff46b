//! Dense statevector simulation, shot sampling and expectation estimation.
//!
//! Basis index `b` stores qubit `i` at bit position `i` (little-endian). Gates are
//! applied in place with strided updates; no operator is ever materialized.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::gates::{Axis, GateKind, Op};
use crate::problems::DiagonalHamiltonian;
use crate::seed;

pub const MAX_QUBITS: usize = 20;

/// A measured computational-basis state; bit `i` is qubit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisOutcome(pub usize);

impl BasisOutcome {
    pub fn complement(self, n_qubits: usize) -> BasisOutcome {
        BasisOutcome(!self.0 & ((1 << n_qubits) - 1))
    }

    pub fn bit(self, qubit: usize) -> bool {
        self.0 >> qubit & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, op: &Op) -> Result<()> {
        self.check_wires(op)?;
        match op.kind {
            GateKind::H => self.apply_h(op.qubits[0]),
            GateKind::Cx => self.apply_cx(op.qubits[0], op.qubits[1]),
            _ => {
                let (string, len) = op.pauli_string().expect("rotation kinds carry a Pauli string");
                self.apply_pauli_rotation(&string[..len], op.angle);
            }
        }
        Ok(())
    }

    fn check_wires(&self, op: &Op) -> Result<()> {
        let wires = op.wires();
        if let Some(&q) = wires.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidGate(format!(
                "{} acts on qubit {q} but the register has {} qubits",
                op.kind, self.n_qubits
            )));
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::InvalidGate(format!("{} repeats qubit {}", op.kind, wires[0])));
        }
        Ok(())
    }

    fn apply_h(&mut self, q: usize) {
        let mask = 1usize << q;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let a = self.amplitudes[i];
            let b = self.amplitudes[i | mask];
            self.amplitudes[i] = (a + b) * r;
            self.amplitudes[i | mask] = (a - b) * r;
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in (0..self.amplitudes.len()).filter(|i| i & c != 0 && i & t == 0) {
            self.amplitudes.swap(i, i | t);
        }
    }

    /// `exp(-iθ/2 P)` for a Pauli string `P`, using `P² = I`.
    fn apply_pauli_rotation(&mut self, string: &[(usize, Axis)], theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let minus_i_s = Complex64::new(0.0, -s);
        let flip: usize = string
            .iter()
            .filter(|(_, a)| *a != Axis::Z)
            .fold(0, |m, (q, _)| m | 1 << q);
        // P|x⟩ = phase(x)|x ^ flip⟩
        let phase = |x: usize| -> Complex64 {
            string.iter().fold(Complex64::new(1.0, 0.0), |acc, &(q, axis)| {
                let one = x >> q & 1 == 1;
                acc * match (axis, one) {
                    (Axis::X, _) => Complex64::new(1.0, 0.0),
                    (Axis::Y, false) => Complex64::new(0.0, 1.0),
                    (Axis::Y, true) => Complex64::new(0.0, -1.0),
                    (Axis::Z, false) => Complex64::new(1.0, 0.0),
                    (Axis::Z, true) => Complex64::new(-1.0, 0.0),
                }
            })
        };
        if flip == 0 {
            for (x, amp) in self.amplitudes.iter_mut().enumerate() {
                *amp *= c + minus_i_s * phase(x);
            }
            return;
        }
        let low = flip & flip.wrapping_neg();
        for x in (0..self.amplitudes.len()).filter(|x| x & low == 0) {
            let y = x ^ flip;
            let (ax, ay) = (self.amplitudes[x], self.amplitudes[y]);
            self.amplitudes[x] = ax * c + minus_i_s * phase(y) * ay;
            self.amplitudes[y] = ay * c + minus_i_s * phase(x) * ax;
        }
    }
}

/// `|0…0⟩` on `n_qubits` qubits.
pub fn zero_state(n_qubits: usize) -> Result<StateVector> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "register size {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits, amplitudes })
}

pub fn apply_gate(mut state: StateVector, op: &Op) -> Result<StateVector> {
    state.apply(op)?;
    Ok(state)
}

/// Runs `ops` from `|0…0⟩`.
pub fn run_ops(n_qubits: usize, ops: &[Op]) -> Result<StateVector> {
    let mut state = zero_state(n_qubits)?;
    for op in ops {
        state.apply(op)?;
    }
    Ok(state)
}

pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    run_ops(circuit.n_qubits(), &circuit.bound_ops())
}

pub fn exact_probabilities(circuit: &Circuit) -> Result<Vec<f64>> {
    Ok(simulate(circuit)?.probabilities())
}

/// Measurement counts from repeated executions of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotDistribution {
    n_qubits: usize,
    n_shots: u64,
    counts: BTreeMap<BasisOutcome, u64>,
}

impl ShotDistribution {
    pub fn from_counts(n_qubits: usize, counts: BTreeMap<BasisOutcome, u64>) -> Result<Self> {
        if let Some(b) = counts.keys().find(|b| b.0 >> n_qubits != 0) {
            return Err(Error::InvalidInput(format!(
                "outcome {} does not fit in {n_qubits} qubits",
                b.0
            )));
        }
        let n_shots = counts.values().sum();
        if n_shots == 0 {
            return Err(Error::InvalidInput("distribution holds no shots".into()));
        }
        Ok(ShotDistribution { n_qubits, n_shots, counts })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn counts(&self) -> &BTreeMap<BasisOutcome, u64> {
        &self.counts
    }

    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&BasisOutcome(outcome)).copied().unwrap_or(0)
    }

    /// Normalized frequencies as a dense vector of length `2^n`.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut freq = vec![0.0; 1 << self.n_qubits];
        for (b, &c) in &self.counts {
            freq[b.0] = c as f64 / self.n_shots as f64;
        }
        freq
    }
}

/// Draws `n_shots` outcomes from `probs` with a ChaCha stream seeded by `rng_seed`.
pub fn sample_probabilities(probs: &[f64], n_shots: u64, rng_seed: u64) -> Result<ShotDistribution> {
    if n_shots == 0 {
        return Err(Error::InvalidInput("n_shots must be at least 1".into()));
    }
    if !probs.len().is_power_of_two() {
        return Err(Error::InvalidInput("distribution length is not a power of two".into()));
    }
    let n_qubits = probs.len().trailing_zeros() as usize;
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = seed::rng(rng_seed);
    let mut dense = vec![0u64; probs.len()];
    for _ in 0..n_shots {
        let u = rng.gen::<f64>() * acc;
        dense[cdf.partition_point(|&c| c <= u).min(last_nonzero)] += 1;
    }
    let counts = dense
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(b, c)| (BasisOutcome(b), c))
        .collect();
    ShotDistribution::from_counts(n_qubits, counts)
}

pub fn sample_shots(circuit: &Circuit, n_shots: u64, rng_seed: u64) -> Result<ShotDistribution> {
    sample_probabilities(&exact_probabilities(circuit)?, n_shots, rng_seed)
}

/// Shot average of the diagonal energy: `(1/N) Σ_b count(b)·E(b)`.
pub fn estimate_expectation(dist: &ShotDistribution, ham: &DiagonalHamiltonian) -> Result<f64> {
    if dist.n_qubits() != ham.n_qubits() {
        return Err(Error::InvalidInput(format!(
            "distribution over {} qubits, Hamiltonian over {}",
            dist.n_qubits(),
            ham.n_qubits()
        )));
    }
    let energy = ham.energies();
    let total: f64 = dist.counts().iter().map(|(b, &c)| c as f64 * energy[b.0]).sum();
    Ok(total / dist.n_shots() as f64)
}

/// `Σ_b p(b)·E(b)` for an exact distribution.
pub fn exact_expectation(probs: &[f64], ham: &DiagonalHamiltonian) -> Result<f64> {
    if probs.len() != ham.energies().len() {
        return Err(Error::InvalidInput("distribution and Hamiltonian differ in dimension".into()));
    }
    Ok(probs.iter().zip(ham.energies()).map(|(p, e)| p * e).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn zero_state_shapes() {
        let s = zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(zero_state(2).unwrap().probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(zero_state(0), Err(Error::Config(_))));
        assert!(zero_state(21).is_err());
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(zero_state(1).unwrap(), &Op::h(0)).unwrap();
        for a in s.amplitudes() {
            assert!(close(*a, Complex64::new(FRAC_1_SQRT_2, 0.0)));
        }
    }

    #[test]
    fn zero_angle_double_rotation_is_identity() {
        let mut s = zero_state(2).unwrap();
        s.apply(&Op::h(0)).unwrap();
        s.apply(&Op::single(GateKind::Ry, 1, 0.7)).unwrap();
        let before = s.clone();
        for k in GateKind::DOUBLE_ROTATIONS {
            s.apply(&Op::double(k, 0, 1, 0.0)).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn rotation_signs() {
        // Rx(π)|0⟩ = -i|1⟩, Ry(π)|0⟩ = |1⟩
        let s = apply_gate(zero_state(1).unwrap(), &Op::single(GateKind::Rx, 0, PI)).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
        let s = apply_gate(zero_state(1).unwrap(), &Op::single(GateKind::Ry, 0, PI)).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn cx_flips_target_when_control_set() {
        let mut s = zero_state(2).unwrap();
        s.apply(&Op::single(GateKind::Rx, 0, PI)).unwrap();
        s.apply(&Op::cx(0, 1)).unwrap();
        assert!((s.probabilities()[0b11] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_wires_rejected() {
        let s = zero_state(2).unwrap();
        assert!(matches!(
            apply_gate(s.clone(), &Op::double(GateKind::Rzz, 1, 1, 0.3)),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(apply_gate(s, &Op::h(2)), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn sampling_is_deterministic_and_plausible() {
        let probs = vec![0.5, 0.5];
        let a = sample_probabilities(&probs, 1000, 42).unwrap();
        let b = sample_probabilities(&probs, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_shots(), 1000);
        assert!((400..=600).contains(&a.count(0)));

        let point = sample_probabilities(&[1.0, 0.0, 0.0, 0.0], 1000, 3).unwrap();
        assert_eq!(point.count(0), 1000);
        assert!(sample_probabilities(&probs, 0, 1).is_err());
    }

    #[test]
    fn out_of_range_outcome_rejected() {
        let counts = BTreeMap::from([(BasisOutcome(4), 1)]);
        assert!(ShotDistribution::from_counts(2, counts).is_err());
    }

    #[test]
    fn complement_masks_to_register() {
        assert_eq!(BasisOutcome(0b011).complement(3), BasisOutcome(0b100));
    }
}
