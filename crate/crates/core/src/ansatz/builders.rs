//! Fixed ansatz families: the `Ryz`-connected chain and the QAOA baselines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::problems::ProblemInstance;

use super::{Circuit, GateApplication};

const FIELD_EPS: f64 = 1e-12;

/// Hadamards on every qubit, then `Ryz` on `(q_{n−1−k}, q_{n−2−k})` for `k = 0..n−1`,
/// each with its own parameter.
pub fn build_linear_ryz(n_qubits: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::Config(format!("the linear chain needs at least 2 qubits, got {n_qubits}")));
    }
    let mut c = Circuit::hadamard_layer(n_qubits)?;
    for k in 0..n_qubits - 1 {
        c.push_rotation(GateKind::Ryz, vec![n_qubits - 1 - k, n_qubits - 2 - k], 0.0)?;
    }
    Ok(c)
}

/// Whether `circuit` is a Hadamard layer followed by `n − 1` `Ryz` gates, each of
/// which (after the first) joins exactly one new qubit to the connected set.
pub fn is_ryz_connected(circuit: &Circuit) -> bool {
    let n = circuit.n_qubits();
    let gates = circuit.gates();
    if n < 2 || gates.len() != 2 * n - 1 {
        return false;
    }
    let mut has_h = vec![false; n];
    for g in &gates[..n] {
        if g.kind != GateKind::H || has_h[g.qubits[0]] {
            return false;
        }
        has_h[g.qubits[0]] = true;
    }
    let mut joined = vec![false; n];
    for (j, g) in gates[n..].iter().enumerate() {
        if g.kind != GateKind::Ryz {
            return false;
        }
        let (p, q) = (g.qubits[0], g.qubits[1]);
        if j > 0 && joined[p] == joined[q] {
            return false;
        }
        joined[p] = true;
        joined[q] = true;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QaoaVariant {
    Standard,
    MultiAngle,
    Plus,
}

/// QAOA-family circuit for `inst`, all parameters initialized to zero.
///
/// Per layer: `Rzz(2γJ_ij)` per Ising coupling, `Rz(2γh_i)` per non-zero field, then
/// `Rx(2β)` on every qubit. `Standard` shares `(γ_l, β_l)` across a layer,
/// `MultiAngle` gives every gate its own parameter, and `Plus` appends to `p = 1` a
/// line of `n − 1` `Rzz` gates and an `Rx` layer, each independently parametrized.
pub fn build_qaoa(inst: &ProblemInstance, p: usize, variant: QaoaVariant) -> Result<Circuit> {
    if p == 0 {
        return Err(Error::Config("QAOA needs at least one layer".into()));
    }
    if variant == QaoaVariant::Plus && p != 1 {
        return Err(Error::Config(format!("QAOA+ is defined on top of p = 1, got p = {p}")));
    }
    let n = inst.n_qubits();
    let ising = inst.qubo.to_ising();
    let mut c = Circuit::hadamard_layer(n)?;
    let shared = variant != QaoaVariant::MultiAngle;

    for _ in 0..p {
        let gamma = shared.then(|| c.add_param(0.0));
        for &(i, j, w) in &ising.couplings {
            push_layer_gate(&mut c, GateKind::Rzz, vec![i, j], 2.0 * w, gamma)?;
        }
        for (i, &h) in ising.fields.iter().enumerate() {
            if h.abs() > FIELD_EPS {
                push_layer_gate(&mut c, GateKind::Rz, vec![i], 2.0 * h, gamma)?;
            }
        }
        let beta = shared.then(|| c.add_param(0.0));
        for q in 0..n {
            push_layer_gate(&mut c, GateKind::Rx, vec![q], 2.0, beta)?;
        }
    }

    if variant == QaoaVariant::Plus {
        for i in 0..n - 1 {
            c.push_rotation(GateKind::Rzz, vec![i, i + 1], 0.0)?;
        }
        for q in 0..n {
            c.push_rotation(GateKind::Rx, vec![q], 0.0)?;
        }
    }
    Ok(c)
}

fn push_layer_gate(c: &mut Circuit, kind: GateKind, qubits: Vec<usize>, scale: f64, shared: Option<usize>) -> Result<()> {
    match shared {
        Some(index) => c.push(GateApplication::parametric(kind, qubits, index, scale)),
        None => c.push_scaled_rotation(kind, qubits, 0.0, scale).map(|_| ()),
    }
}
