//! Gate vocabulary shared by the simulator, the circuit model and the transpiler.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// Every gate the toolkit knows about.
///
/// Double rotations `Rab(θ) = exp(-iθ/2 σa⊗σb)` write the tensor product with the
/// most significant qubit first, matching the basis-index convention: on
/// `qubits = [p, q]`, `σb` acts on `p` and `σa` acts on `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    Cx,
    Rx,
    Ry,
    Rz,
    Rxx,
    Rxy,
    Rxz,
    Ryx,
    Ryy,
    Ryz,
    Rzx,
    Rzy,
    Rzz,
}

impl GateKind {
    pub const DOUBLE_ROTATIONS: [GateKind; 9] = [
        GateKind::Rxx,
        GateKind::Rxy,
        GateKind::Rxz,
        GateKind::Ryx,
        GateKind::Ryy,
        GateKind::Ryz,
        GateKind::Rzx,
        GateKind::Rzy,
        GateKind::Rzz,
    ];

    pub fn rotation(axis: Axis) -> GateKind {
        match axis {
            Axis::X => GateKind::Rx,
            Axis::Y => GateKind::Ry,
            Axis::Z => GateKind::Rz,
        }
    }

    pub fn double_rotation(a: Axis, b: Axis) -> GateKind {
        use Axis::*;
        match (a, b) {
            (X, X) => GateKind::Rxx,
            (X, Y) => GateKind::Rxy,
            (X, Z) => GateKind::Rxz,
            (Y, X) => GateKind::Ryx,
            (Y, Y) => GateKind::Ryy,
            (Y, Z) => GateKind::Ryz,
            (Z, X) => GateKind::Rzx,
            (Z, Y) => GateKind::Rzy,
            (Z, Z) => GateKind::Rzz,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            _ => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        !matches!(self, GateKind::H | GateKind::Cx)
    }

    /// Axis of a single-qubit rotation.
    pub fn single_axis(self) -> Option<Axis> {
        match self {
            GateKind::Rx => Some(Axis::X),
            GateKind::Ry => Some(Axis::Y),
            GateKind::Rz => Some(Axis::Z),
            _ => None,
        }
    }

    /// `(a, b)` of a double rotation `Rab`.
    pub fn double_axes(self) -> Option<(Axis, Axis)> {
        use Axis::*;
        Some(match self {
            GateKind::Rxx => (X, X),
            GateKind::Rxy => (X, Y),
            GateKind::Rxz => (X, Z),
            GateKind::Ryx => (Y, X),
            GateKind::Ryy => (Y, Y),
            GateKind::Ryz => (Y, Z),
            GateKind::Rzx => (Z, X),
            GateKind::Rzy => (Z, Y),
            GateKind::Rzz => (Z, Z),
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Rxx => "rxx",
            GateKind::Rxy => "rxy",
            GateKind::Rxz => "rxz",
            GateKind::Ryx => "ryx",
            GateKind::Ryy => "ryy",
            GateKind::Ryz => "ryz",
            GateKind::Rzx => "rzx",
            GateKind::Rzy => "rzy",
            GateKind::Rzz => "rzz",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [GateKind::H, GateKind::Cx, GateKind::Rx, GateKind::Ry, GateKind::Rz];
        all.into_iter()
            .chain(GateKind::DOUBLE_ROTATIONS)
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind `{s}`")))
    }
}

/// A gate with concrete qubits and a bound angle, ready to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op {
    pub kind: GateKind,
    /// `qubits[1]` is ignored for single-qubit kinds.
    pub qubits: [usize; 2],
    /// Radians; ignored for `H` and `Cx`.
    pub angle: f64,
}

impl Op {
    pub fn single(kind: GateKind, qubit: usize, angle: f64) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Op { kind, qubits: [qubit, qubit], angle }
    }

    pub fn double(kind: GateKind, q0: usize, q1: usize, angle: f64) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Op { kind, qubits: [q0, q1], angle }
    }

    pub fn h(qubit: usize) -> Self {
        Op::single(GateKind::H, qubit, 0.0)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Op::double(GateKind::Cx, control, target, 0.0)
    }

    pub fn wires(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    /// Pauli string `(qubit, axis)` generating this rotation, if it is one.
    pub fn pauli_string(&self) -> Option<([(usize, Axis); 2], usize)> {
        if let Some(axis) = self.kind.single_axis() {
            return Some(([(self.qubits[0], axis), (self.qubits[0], axis)], 1));
        }
        self.kind
            .double_axes()
            .map(|(a, b)| ([(self.qubits[0], b), (self.qubits[1], a)], 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in GateKind::DOUBLE_ROTATIONS {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
            let (a, b) = k.double_axes().unwrap();
            assert_eq!(GateKind::double_rotation(a, b), k);
        }
        assert!("rq".parse::<GateKind>().is_err());
        assert_eq!(serde_json::to_string(&GateKind::Ryz).unwrap(), "\"ryz\"");
    }
}
