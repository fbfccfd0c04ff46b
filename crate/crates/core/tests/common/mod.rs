//! Dense-matrix reference implementations shared by the integration tests.
#![allow(dead_code)]

use ansatz_rl::agent::{Batch, PpoConfig, PpoModel};
use ansatz_rl::{Axis, GateKind, Op};
use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<C>>;

const I: C = C::new(0.0, 1.0);

pub fn identity(dim: usize) -> Matrix {
    (0..dim).map(|r| (0..dim).map(|c| if r == c { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); n]; n];
    for r in 0..n {
        for k in 0..n {
            if a[r][k] == C::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    out
}

fn pauli(axis: Axis) -> [[C; 2]; 2] {
    let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
    match axis {
        Axis::X => [[z, o], [o, z]],
        Axis::Y => [[z, -I], [I, z]],
        Axis::Z => [[o, z], [z, -o]],
    }
}

/// Full matrix of a tensor product of single-qubit operators (identity elsewhere).
pub fn embed(n: usize, factors: &[(usize, [[C; 2]; 2])]) -> Matrix {
    let dim = 1 << n;
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let untouched = !factors.iter().fold(0usize, |acc, (q, _)| acc | 1 << q);
            if (r ^ c) & untouched != 0 {
                continue;
            }
            *cell = factors.iter().map(|(q, f)| f[r >> q & 1][c >> q & 1]).product();
        }
    }
    m
}

/// `exp(A)` by scaling and squaring with a Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.len();
    let norm = a.iter().map(|r| r.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = (norm.max(1.0).log2().ceil() as i32 + 1).max(0);
    let scale = 0.5f64.powi(s);
    let scaled: Matrix = a.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for (rr, tr) in result.iter_mut().zip(&term) {
            for (x, t) in rr.iter_mut().zip(tr) {
                *x += t;
            }
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

/// `exp(−iθ/2 · P)` for a Pauli string `P`.
pub fn pauli_rotation(n: usize, paulis: &[(usize, Axis)], theta: f64) -> Matrix {
    let factors: Vec<_> = paulis.iter().map(|&(q, a)| (q, pauli(a))).collect();
    let p = embed(n, &factors);
    let gen: Matrix = p.iter().map(|r| r.iter().map(|x| x * (-I * theta / 2.0)).collect()).collect();
    expm(&gen)
}

/// Reference matrix of one gate, built from the gate definitions.
pub fn gate_matrix(n: usize, op: &Op) -> Matrix {
    let dim = 1 << n;
    match op.kind {
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            embed(n, &[(op.qubits[0], [[C::new(h, 0.0), C::new(h, 0.0)], [C::new(h, 0.0), C::new(-h, 0.0)]])])
        }
        GateKind::Cx => {
            let (c, t) = (op.qubits[0], op.qubits[1]);
            let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
            for col in 0..dim {
                let row = if col >> c & 1 == 1 { col ^ (1 << t) } else { col };
                m[row][col] = C::new(1.0, 0.0);
            }
            m
        }
        k => {
            if let Some(axis) = k.single_axis() {
                pauli_rotation(n, &[(op.qubits[0], axis)], op.angle)
            } else {
                // σa ⊗ σb with σb on the first listed qubit
                let (a, b) = k.double_axes().unwrap();
                pauli_rotation(n, &[(op.qubits[0], b), (op.qubits[1], a)], op.angle)
            }
        }
    }
}

pub fn circuit_matrix(n: usize, ops: &[Op]) -> Matrix {
    ops.iter().fold(identity(1 << n), |acc, op| matmul(&gate_matrix(n, op), &acc))
}

pub fn first_column(m: &Matrix) -> Vec<C> {
    m.iter().map(|r| r[0]).collect()
}

/// Largest entry difference after removing the best global phase.
pub fn diff_up_to_phase(a: &[C], b: &[C]) -> f64 {
    let (k, _) = a.iter().enumerate().fold((0, 0.0), |best, (i, x)| if x.norm() > best.1 { (i, x.norm()) } else { best });
    let phase = if b[k].norm() > 0.0 { a[k] / b[k] } else { C::new(1.0, 0.0) };
    let phase = phase / phase.norm();
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

pub fn flatten(m: &Matrix) -> Vec<C> {
    m.iter().flatten().copied().collect()
}

pub fn random_op(rng: &mut ChaCha8Rng, n: usize) -> Op {
    let theta = rng.gen_range(-4.0..4.0);
    let q0 = rng.gen_range(0..n);
    let mut q1 = rng.gen_range(0..n - 1);
    if q1 >= q0 {
        q1 += 1;
    }
    match rng.gen_range(0..4) {
        0 => Op::h(q0),
        1 => Op::cx(q0, q1),
        2 => Op::single(GateKind::rotation(Axis::ALL[rng.gen_range(0..3)]), q0, theta),
        _ => Op::double(GateKind::DOUBLE_ROTATIONS[rng.gen_range(0..9)], q0, q1, theta),
    }
}

/// Small network with random weights and a batch whose ratios straddle the clip range.
pub fn gradient_problem(rng: &mut ChaCha8Rng, seed: u64) -> (PpoModel, Batch) {
    let cfg = PpoConfig { hidden: vec![8, 8], ..PpoConfig::default() };
    let mut model = PpoModel::new(4, 3, cfg, seed).unwrap();
    // larger output weights than the near-uniform init so gradients are not tiny
    for p in model.policy.params_mut() {
        *p += rng.gen_range(-0.3..0.3);
    }
    for p in model.value.params_mut() {
        *p += rng.gen_range(-0.3..0.3);
    }
    let n = 6;
    let mut batch = Batch::default();
    for _ in 0..n {
        let obs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = rng.gen_range(0..3);
        let logp = model.policy_forward(&obs).unwrap().log_prob(a);
        batch.old_log_probs.push(logp + rng.gen_range(-0.35..0.35));
        batch.observations.push(obs);
        batch.actions.push(a);
        batch.advantages.push(rng.gen_range(-1.5..1.5));
        batch.returns.push(rng.gen_range(-2.0..2.0));
    }
    (model, batch)
}

/// Relative error `‖g − ĝ‖ / max(‖g‖ + ‖ĝ‖, 1e-12)` of analytic against central
/// finite-difference gradients, for policy and value networks.
pub fn gradient_errors(model: &mut PpoModel, batch: &Batch) -> (f64, f64) {
    let h = 1e-6;
    let (_, gp) = model.policy_loss_and_grad(batch);
    let mut fd = vec![0.0; gp.len()];
    for (i, slot) in fd.iter_mut().enumerate() {
        let orig = model.policy.params()[i];
        model.policy.params_mut()[i] = orig + h;
        let up = model.policy_loss_and_grad(batch).0.loss;
        model.policy.params_mut()[i] = orig - h;
        let down = model.policy_loss_and_grad(batch).0.loss;
        model.policy.params_mut()[i] = orig;
        *slot = (up - down) / (2.0 * h);
    }
    let pol = rel_err(&gp, &fd);

    let (_, gv) = model.value_loss_and_grad(batch);
    let mut fd = vec![0.0; gv.len()];
    for (i, slot) in fd.iter_mut().enumerate() {
        let orig = model.value.params()[i];
        model.value.params_mut()[i] = orig + h;
        let up = model.value_loss_and_grad(batch).0;
        model.value.params_mut()[i] = orig - h;
        let down = model.value_loss_and_grad(batch).0;
        model.value.params_mut()[i] = orig;
        *slot = (up - down) / (2.0 * h);
    }
    (pol, rel_err(&gv, &fd))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    d / (na + nb).max(1e-12)
}
