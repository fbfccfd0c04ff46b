use crate::error::{Error, Result};
use crate::gates::{Axis, GateKind};

use super::Circuit;

/// A gate the agent may append, before it receives a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateTemplate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

/// Single rotations `R_a` on every qubit followed by double rotations `R_ab` on every
/// pair `i < j`.
///
/// Ordering: singles by `(axis, qubit)`, then doubles by `((a, b), (i, j))`, all
/// lexicographic with `x < y < z`. The id of an action is its position.
#[derive(Debug, Clone)]
pub struct ActionSpace {
    n_qubits: usize,
    actions: Vec<GateTemplate>,
}

impl ActionSpace {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Config(format!("action space needs at least 2 qubits, got {n_qubits}")));
        }
        let mut actions = Vec::with_capacity(Self::size_for(n_qubits));
        for axis in Axis::ALL {
            for q in 0..n_qubits {
                actions.push(GateTemplate { kind: GateKind::rotation(axis), qubits: vec![q] });
            }
        }
        for a in Axis::ALL {
            for b in Axis::ALL {
                for i in 0..n_qubits {
                    for j in i + 1..n_qubits {
                        actions.push(GateTemplate { kind: GateKind::double_rotation(a, b), qubits: vec![i, j] });
                    }
                }
            }
        }
        Ok(ActionSpace { n_qubits, actions })
    }

    /// `3n + 9·n(n−1)/2`
    pub fn size_for(n_qubits: usize) -> usize {
        3 * n_qubits + 9 * n_qubits * (n_qubits - 1) / 2
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&GateTemplate> {
        self.actions.get(id)
    }

    pub fn actions(&self) -> &[GateTemplate] {
        &self.actions
    }

    pub fn index_of(&self, kind: GateKind, qubits: &[usize]) -> Option<usize> {
        self.actions.iter().position(|t| t.kind == kind && t.qubits == qubits)
    }

    /// Appends action `id` to `circuit` with a fresh parameter set to zero.
    pub fn apply(&self, circuit: &mut Circuit, id: usize) -> Result<usize> {
        let t = self
            .get(id)
            .ok_or_else(|| Error::InvalidInput(format!("action {id} outside 0..{}", self.len())))?;
        circuit.push_rotation(t.kind, t.qubits.clone(), 0.0)
    }
}
