//! Rewriting circuits into basis gate sets, plus depth and gate-count metrics.
//!
//! Two targets are used:
//! - `{H, Rx, Ry, Rz, Rzz}`: the set whose depth enters the reward.
//! - `{Cx, Rx, Ry, Rz}`: the set used for reported gate counts, after a light
//!   simplification pass.
//!
//! Angles stay symbolic (`constant + Σ c_k θ_k`) so that metrics never depend on
//! parameter values.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{Axis, GateKind, Op};

use super::Circuit;

/// `constant + Σ coefficient·θ[index]`
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymAngle {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl SymAngle {
    pub fn constant(c: f64) -> Self {
        SymAngle { constant: c, terms: Vec::new() }
    }

    pub fn param(index: usize, coefficient: f64) -> Self {
        SymAngle { constant: 0.0, terms: vec![(index, coefficient)] }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero as a structure: no parameter terms and a constant ≡ 0 (mod 4π).
    pub fn is_structural_zero(&self) -> bool {
        if !self.is_constant() {
            return false;
        }
        let r = self.constant.rem_euclid(4.0 * PI);
        r < 1e-12 || 4.0 * PI - r < 1e-12
    }

    pub fn add(&self, other: &SymAngle) -> SymAngle {
        let mut terms = self.terms.clone();
        for &(i, c) in &other.terms {
            match terms.iter_mut().find(|(j, _)| *j == i) {
                Some(t) => t.1 += c,
                None => terms.push((i, c)),
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        SymAngle { constant: self.constant + other.constant, terms }
    }

    pub fn eval(&self, params: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * params[i]).sum::<f64>()
    }
}

/// A gate whose angle may depend on circuit parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SymOp {
    pub kind: GateKind,
    pub qubits: [usize; 2],
    pub angle: SymAngle,
}

impl SymOp {
    fn single(kind: GateKind, q: usize, angle: SymAngle) -> Self {
        SymOp { kind, qubits: [q, q], angle }
    }

    fn fixed_single(kind: GateKind, q: usize, angle: f64) -> Self {
        SymOp::single(kind, q, SymAngle::constant(angle))
    }

    fn double(kind: GateKind, q0: usize, q1: usize, angle: SymAngle) -> Self {
        SymOp { kind, qubits: [q0, q1], angle }
    }

    pub fn wires(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn bind(&self, params: &[f64]) -> Op {
        Op { kind: self.kind, qubits: self.qubits, angle: self.angle.eval(params) }
    }
}

/// Gates conjugating axis `a` onto `z`: `U σa U† = σz`. Returns `(U, U†)` as `(kind, angle)` lists.
fn axis_to_z(axis: Axis) -> (Option<(GateKind, f64)>, Option<(GateKind, f64)>) {
    match axis {
        Axis::X => (Some((GateKind::H, 0.0)), Some((GateKind::H, 0.0))),
        Axis::Y => (Some((GateKind::Rx, FRAC_PI_2)), Some((GateKind::Rx, -FRAC_PI_2))),
        Axis::Z => (None, None),
    }
}

fn decompose_sym(kind: GateKind, qubits: [usize; 2], angle: SymAngle) -> Vec<SymOp> {
    let (a, b) = kind.double_axes().expect("double rotation");
    let [p, q] = qubits;
    let (ub, ub_dag) = axis_to_z(b);
    let (ua, ua_dag) = axis_to_z(a);
    let mut out = Vec::with_capacity(5);
    out.extend(ub.map(|(k, t)| SymOp::fixed_single(k, p, t)));
    out.extend(ua.map(|(k, t)| SymOp::fixed_single(k, q, t)));
    out.push(SymOp::double(GateKind::Rzz, p, q, angle));
    out.extend(ub_dag.map(|(k, t)| SymOp::fixed_single(k, p, t)));
    out.extend(ua_dag.map(|(k, t)| SymOp::fixed_single(k, q, t)));
    out
}

/// `Rab(θ)` on `[p, q]` as `[U_b on p, U_a on q, Rzz(θ), U_b† on p, U_a† on q]`,
/// with `U_x = H`, `U_y = Rx(π/2)`, `U_z = I`.
pub fn decompose_double_rotation(kind: GateKind, qubits: [usize; 2], theta: f64) -> Result<Vec<Op>> {
    if kind.double_axes().is_none() {
        return Err(Error::InvalidGate(format!("{kind} is not a double rotation")));
    }
    Ok(decompose_sym(kind, qubits, SymAngle::constant(theta))
        .iter()
        .map(|op| op.bind(&[]))
        .collect())
}

/// The circuit over `{H, Rx, Ry, Rz, Rzz}`.
pub fn basis_ops(circuit: &Circuit) -> Vec<SymOp> {
    let mut out = Vec::new();
    for g in circuit.gates() {
        let angle = g.param_index.map_or_else(SymAngle::default, |i| SymAngle::param(i, g.scale));
        match g.kind {
            GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                out.push(SymOp::single(g.kind, g.qubits[0], angle))
            }
            GateKind::Rzz => out.push(SymOp::double(GateKind::Rzz, g.qubits[0], g.qubits[1], angle)),
            GateKind::Cx => {
                // Cx = (I⊗H)·CZ·(I⊗H), CZ ∝ Rz(π/2)⊗Rz(π/2)·Rzz(−π/2)
                let (c, t) = (g.qubits[0], g.qubits[1]);
                out.push(SymOp::fixed_single(GateKind::H, t, 0.0));
                out.push(SymOp::fixed_single(GateKind::Rz, c, FRAC_PI_2));
                out.push(SymOp::fixed_single(GateKind::Rz, t, FRAC_PI_2));
                out.push(SymOp::double(GateKind::Rzz, c, t, SymAngle::constant(-FRAC_PI_2)));
                out.push(SymOp::fixed_single(GateKind::H, t, 0.0));
            }
            kind => out.extend(decompose_sym(kind, [g.qubits[0], g.qubits[1]], angle)),
        }
    }
    out
}

/// Length of the longest qubit-wise dependency chain.
pub fn depth_of<'a, I>(n_qubits: usize, ops: I) -> usize
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let mut level = vec![0usize; n_qubits];
    for wires in ops {
        let next = wires.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in wires {
            level[q] = next;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

/// Depth after rewriting into `{H, Rx, Ry, Rz, Rzz}`.
pub fn circuit_depth_basis(circuit: &Circuit) -> usize {
    let ops = basis_ops(circuit);
    depth_of(circuit.n_qubits(), ops.iter().map(SymOp::wires))
}

#[derive(Clone, Copy, PartialEq)]
enum WireState {
    Zero,
    Plus,
    Other,
}

/// Drops constant X rotations acting on a wire that is still in `|+⟩` (only an `H`
/// applied since the start); they change the state by a global phase only.
fn elide_plus_state_rx(n_qubits: usize, ops: Vec<SymOp>) -> Vec<SymOp> {
    let mut wire = vec![WireState::Zero; n_qubits];
    let mut out = Vec::with_capacity(ops.len());
    for op in ops {
        match op.kind {
            GateKind::Rx if wire[op.qubits[0]] == WireState::Plus && op.angle.is_constant() => continue,
            GateKind::H if wire[op.qubits[0]] == WireState::Zero => wire[op.qubits[0]] = WireState::Plus,
            _ => {
                for &q in op.wires() {
                    wire[q] = WireState::Other;
                }
            }
        }
        out.push(op);
    }
    out
}

/// `Rzz → Cx·Rz·Cx`, `H → Rz(π/2)·Rx(π/2)·Rz(π/2)` (equal up to global phase).
fn expand_to_cx_basis(ops: Vec<SymOp>) -> Vec<SymOp> {
    let mut out = Vec::with_capacity(ops.len() * 2);
    for op in ops {
        match op.kind {
            GateKind::Rzz => {
                let [c, t] = op.qubits;
                out.push(SymOp::double(GateKind::Cx, c, t, SymAngle::default()));
                out.push(SymOp::single(GateKind::Rz, t, op.angle));
                out.push(SymOp::double(GateKind::Cx, c, t, SymAngle::default()));
            }
            GateKind::H => {
                let q = op.qubits[0];
                out.push(SymOp::fixed_single(GateKind::Rz, q, FRAC_PI_2));
                out.push(SymOp::fixed_single(GateKind::Rx, q, FRAC_PI_2));
                out.push(SymOp::fixed_single(GateKind::Rz, q, FRAC_PI_2));
            }
            _ => out.push(op),
        }
    }
    out
}

/// Merges adjacent same-axis rotations, drops structural zero rotations and cancels
/// adjacent identical `Cx` pairs. One pass over per-wire stacks reaches the fixpoint.
fn simplify(n_qubits: usize, ops: Vec<SymOp>) -> Vec<SymOp> {
    let mut out: Vec<Option<SymOp>> = Vec::with_capacity(ops.len());
    let mut top: Vec<Vec<usize>> = vec![Vec::new(); n_qubits];

    fn last(top: &[Vec<usize>], q: usize) -> Option<usize> {
        top[q].last().copied()
    }

    for op in ops {
        if op.kind.single_axis().is_some() {
            let q = op.qubits[0];
            if let Some(i) = last(&top, q) {
                let prev = out[i].as_mut().expect("live op");
                if prev.kind == op.kind {
                    prev.angle = prev.angle.add(&op.angle);
                    if prev.angle.is_structural_zero() {
                        out[i] = None;
                        top[q].pop();
                    }
                    continue;
                }
            }
            if op.angle.is_structural_zero() {
                continue;
            }
            top[q].push(out.len());
            out.push(Some(op));
        } else {
            let [c, t] = op.qubits;
            if op.kind == GateKind::Cx {
                if let (Some(i), Some(j)) = (last(&top, c), last(&top, t)) {
                    if i == j && out[i].as_ref().is_some_and(|p| p.kind == GateKind::Cx && p.qubits == op.qubits) {
                        out[i] = None;
                        top[c].pop();
                        top[t].pop();
                        continue;
                    }
                }
            }
            top[c].push(out.len());
            top[t].push(out.len());
            out.push(Some(op));
        }
    }
    out.into_iter().flatten().collect()
}

/// The circuit over `{Cx, Rx, Ry, Rz}` after simplification. Equal to the input up to
/// a global phase when run from `|0…0⟩`.
pub fn transpile(circuit: &Circuit) -> Vec<SymOp> {
    let n = circuit.n_qubits();
    let ops = elide_plus_state_rx(n, basis_ops(circuit));
    simplify(n, expand_to_cx_basis(ops))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub single_qubit: usize,
    pub two_qubit: usize,
    pub depth: usize,
}

pub fn transpiled_counts(circuit: &Circuit) -> GateCounts {
    let ops = transpile(circuit);
    let two_qubit = ops.iter().filter(|o| o.kind.arity() == 2).count();
    GateCounts {
        single_qubit: ops.len() - two_qubit,
        two_qubit,
        depth: depth_of(circuit.n_qubits(), ops.iter().map(SymOp::wires)),
    }
}
