use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GateKind, Op};
use crate::qsim::MAX_QUBITS;

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// One gate of a [`Circuit`]. A parametric gate's angle is `scale · params[param_index]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateApplication {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_index: Option<usize>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

impl GateApplication {
    pub fn fixed(kind: GateKind, qubits: Vec<usize>) -> Self {
        GateApplication { kind, qubits, param_index: None, scale: 1.0 }
    }

    pub fn parametric(kind: GateKind, qubits: Vec<usize>, param_index: usize, scale: f64) -> Self {
        GateApplication { kind, qubits, param_index: Some(param_index), scale }
    }
}

#[derive(Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    #[serde(default)]
    params: Vec<f64>,
    gates: Vec<GateApplication>,
}

/// An ordered list of gates on `n_qubits` qubits together with its parameter vector θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    n_qubits: usize,
    params: Vec<f64>,
    gates: Vec<GateApplication>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        let mut circuit = Circuit::new(raw.n_qubits)?;
        circuit.params = raw.params;
        for gate in raw.gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Config(format!(
                "register size {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        Ok(Circuit { n_qubits, params: Vec::new(), gates: Vec::new() })
    }

    /// A single layer of Hadamards, the starting point of every episode and baseline.
    pub fn hadamard_layer(n_qubits: usize) -> Result<Self> {
        let mut c = Circuit::new(n_qubits)?;
        for q in 0..n_qubits {
            c.push(GateApplication::fixed(GateKind::H, vec![q]))?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateApplication] {
        &self.gates
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                params.len()
            )));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn with_params(mut self, params: &[f64]) -> Result<Self> {
        self.set_params(params)?;
        Ok(self)
    }

    /// Appends a gate after validating its wires and parameter slot.
    pub fn push(&mut self, gate: GateApplication) -> Result<()> {
        let kind = gate.kind;
        if gate.qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} takes {} qubit(s), got {}",
                kind.arity(),
                gate.qubits.len()
            )));
        }
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidGate(format!("{kind} on qubit {q} of a {}-qubit circuit", self.n_qubits)));
        }
        if kind.arity() == 2 && gate.qubits[0] == gate.qubits[1] {
            return Err(Error::InvalidGate(format!("{kind} repeats qubit {}", gate.qubits[0])));
        }
        match (kind.is_parametric(), gate.param_index) {
            (true, None) => return Err(Error::InvalidGate(format!("{kind} needs a parameter"))),
            (false, Some(_)) => return Err(Error::InvalidGate(format!("{kind} takes no parameter"))),
            (true, Some(i)) if i >= self.params.len() => {
                return Err(Error::InvalidGate(format!(
                    "parameter index {i} out of range ({} parameters)",
                    self.params.len()
                )))
            }
            _ => {}
        }
        if !gate.scale.is_finite() {
            return Err(Error::InvalidGate("non-finite angle scale".into()));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a parametric gate with its own fresh parameter, returning that parameter's index.
    pub fn push_rotation(&mut self, kind: GateKind, qubits: Vec<usize>, theta: f64) -> Result<usize> {
        self.push_scaled_rotation(kind, qubits, theta, 1.0)
    }

    pub fn push_scaled_rotation(&mut self, kind: GateKind, qubits: Vec<usize>, theta: f64, scale: f64) -> Result<usize> {
        let index = self.add_param(theta);
        if let Err(e) = self.push(GateApplication::parametric(kind, qubits, index, scale)) {
            self.params.pop();
            return Err(e);
        }
        Ok(index)
    }

    /// Registers a parameter without attaching a gate; used for parameters shared by several gates.
    pub fn add_param(&mut self, theta: f64) -> usize {
        self.params.push(theta);
        self.params.len() - 1
    }

    pub fn angle_of(&self, gate: &GateApplication) -> f64 {
        gate.param_index.map_or(0.0, |i| gate.scale * self.params[i])
    }

    /// Gates with angles bound to the current parameters.
    pub fn bound_ops(&self) -> Vec<Op> {
        self.gates
            .iter()
            .map(|g| {
                let q1 = if g.qubits.len() == 2 { g.qubits[1] } else { g.qubits[0] };
                Op { kind: g.kind, qubits: [g.qubits[0], q1], angle: self.angle_of(g) }
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
