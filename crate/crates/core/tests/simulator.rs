mod common;

use ansatz_rl::ansatz::{basis_ops, build_linear_ryz, build_qaoa, decompose_double_rotation, transpile, ActionSpace};
use ansatz_rl::problems::{ProblemInstance, ProblemKind, Topology};
use ansatz_rl::qsim::{run_ops, simulate};
use ansatz_rl::{seed, Circuit, GateKind, Op, QaoaVariant};
use common::*;
use rand::Rng;

#[test]
fn random_circuits_match_dense_oracle() {
    let mut rng = seed::rng(1);
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(1..12);
        let ops: Vec<Op> = if n == 1 {
            (0..len).map(|_| Op::single(GateKind::Ry, 0, rng.gen_range(-3.0..3.0))).collect()
        } else {
            (0..len).map(|_| random_op(&mut rng, n)).collect()
        };
        let got = run_ops(n, &ops).unwrap();
        let want = first_column(&circuit_matrix(n, &ops));
        let d = got.amplitudes().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(d <= 1e-10, "{d} for {ops:?}");
    }
}

#[test]
fn double_rotation_decompositions_are_exact() {
    for kind in GateKind::DOUBLE_ROTATIONS {
        for (n, wires) in [(2, [0, 1]), (2, [1, 0]), (3, [2, 0])] {
            for k in 0..5 {
                let theta = -3.0 + 1.37 * k as f64;
                let want = gate_matrix(n, &Op::double(kind, wires[0], wires[1], theta));
                let ops = decompose_double_rotation(kind, wires, theta).unwrap();
                let got = circuit_matrix(n, &ops);
                let d = diff_up_to_phase(&flatten(&want), &flatten(&got));
                assert!(d <= 1e-10, "{kind} on {wires:?} at {theta}: {d}");
            }
        }
    }
    assert!(decompose_double_rotation(GateKind::Rx, [0, 1], 0.1).is_err());
}

fn state_equivalence(c: &Circuit) {
    let want = simulate(c).unwrap();
    for ops in [basis_ops(c), transpile(c)] {
        let bound: Vec<Op> = ops.iter().map(|o| o.bind(c.params())).collect();
        let got = run_ops(c.n_qubits(), &bound).unwrap();
        let d = diff_up_to_phase(want.amplitudes(), got.amplitudes());
        assert!(d <= 1e-9, "{d}");
    }
}

#[test]
fn transpiled_circuits_prepare_the_same_state() {
    let mut rng = seed::rng(2);
    for _ in 0..30 {
        let n = rng.gen_range(2..=4);
        let space = ActionSpace::new(n).unwrap();
        let mut c = Circuit::hadamard_layer(n).unwrap();
        for _ in 0..rng.gen_range(1..8) {
            space.apply(&mut c, rng.gen_range(0..space.len())).unwrap();
        }
        let params: Vec<f64> = (0..c.n_params()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        state_equivalence(&c.with_params(&params).unwrap());
    }
    let inst = ProblemInstance::generate(Topology::Star, 5, ProblemKind::MinVertexCover, 2.0, 0).unwrap();
    for v in [QaoaVariant::Standard, QaoaVariant::MultiAngle, QaoaVariant::Plus] {
        let p = if v == QaoaVariant::Standard { 2 } else { 1 };
        let c = build_qaoa(&inst, p, v).unwrap();
        let params: Vec<f64> = (0..c.n_params()).map(|i| 0.3 + 0.2 * i as f64).collect();
        state_equivalence(&c.with_params(&params).unwrap());
    }
    let lin = build_linear_ryz(5).unwrap();
    state_equivalence(&lin.with_params(&[0.4, -1.1, 2.0, 0.7]).unwrap());
}
