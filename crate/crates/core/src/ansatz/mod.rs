//! Circuit model, the agent's gate catalog, decompositions and ansatz builders.

mod actions;
mod builders;
mod circuit;
mod transpile;

pub use actions::{ActionSpace, GateTemplate};
pub use builders::{build_linear_ryz, build_qaoa, is_ryz_connected, QaoaVariant};
pub use circuit::{Circuit, GateApplication};
pub use transpile::{
    basis_ops, circuit_depth_basis, decompose_double_rotation, depth_of, transpile, transpiled_counts,
    GateCounts, SymAngle, SymOp,
};
