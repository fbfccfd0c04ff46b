use ansatz_rl::ansatz::{build_linear_ryz, circuit_depth_basis, transpiled_counts};
use ansatz_rl::problems::{generate_graph, is_feasible, ProblemInstance, ProblemKind, Topology};
use ansatz_rl::qsim::{exact_probabilities, sample_probabilities};
use ansatz_rl::{seed, ActionSpace, BasisOutcome, Circuit};
use proptest::prelude::*;
use rand::Rng;

fn kind() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![Just(ProblemKind::MaxCut), Just(ProblemKind::MaxClique), Just(ProblemKind::MinVertexCover)]
}

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(Topology::Star),
        Just(Topology::Cycle),
        Just(Topology::Grid2D),
        (0.0f64..=1.0).prop_map(Topology::ErdosRenyi),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_circuits_stay_normalized(n in 2usize..=5, actions in prop::collection::vec(0usize..1000, 0..10), s in any::<u64>()) {
        let space = ActionSpace::new(n).unwrap();
        let mut c = Circuit::hadamard_layer(n).unwrap();
        for a in actions {
            space.apply(&mut c, a % space.len()).unwrap();
        }
        let mut rng = seed::rng(s);
        let params: Vec<f64> = (0..c.n_params()).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let c = c.with_params(&params).unwrap();
        let p = exact_probabilities(&c).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        // structure-only metrics ignore parameter values
        let zeroed = c.clone().with_params(&vec![0.0; params.len()]).unwrap();
        prop_assert_eq!(transpiled_counts(&c), transpiled_counts(&zeroed));
        prop_assert_eq!(circuit_depth_basis(&c), circuit_depth_basis(&zeroed));
    }

    #[test]
    fn linear_circuit_is_bit_flip_symmetric(n in 2usize..=6, s in any::<u64>()) {
        let c = build_linear_ryz(n).unwrap();
        let mut rng = seed::rng(s);
        let params: Vec<f64> = (0..c.n_params()).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let p = exact_probabilities(&c.with_params(&params).unwrap()).unwrap();
        for b in 0..p.len() {
            prop_assert!((p[b] - p[BasisOutcome(b).complement(n).0]).abs() <= 1e-10);
        }
    }

    #[test]
    fn energy_table_matches_qubo(n in 3usize..=7, k in kind(), t in topology(), s in 0u64..1000) {
        let n = if t == Topology::Grid2D && n % 2 == 1 { n + 1 } else { n };
        let inst = ProblemInstance::generate(t, n, k, 2.0, s).unwrap();
        for b in 0..1usize << n {
            let x: Vec<f64> = (0..n).map(|i| (b >> i & 1) as f64).collect();
            let mut e = inst.qubo.offset();
            for i in 0..n {
                for j in i..n {
                    e += inst.qubo.get(i, j) * x[i] * x[j];
                }
            }
            prop_assert!((inst.ham.energy(b) - e).abs() <= 1e-9);
            if k == ProblemKind::MaxCut {
                let cut = inst.graph.edges().iter().filter(|&&(i, j)| (b >> i & 1) != (b >> j & 1)).count();
                prop_assert_eq!(inst.ham.energy(b), -(cut as f64));
                prop_assert_eq!(inst.ham.energy(b), inst.ham.energy(BasisOutcome(b).complement(n).0));
            }
        }
        if k == ProblemKind::MaxCut {
            prop_assert_eq!(inst.spectrum.e_max, 0.0);
        }
        // the minimum of a constrained QUBO is feasible when the penalty exceeds 1
        if !inst.spectrum.degenerate {
            let g = inst.ham.ground_states(1)[0];
            prop_assert!(is_feasible(k, &inst.graph, g));
        }
    }

    #[test]
    fn sampled_counts_sum_to_shots(n in 1usize..=4, shots in 1u64..3000, s in any::<u64>()) {
        let mut rng = seed::rng(s);
        let raw: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let d = sample_probabilities(&p, shots, s).unwrap();
        prop_assert_eq!(d.counts().values().sum::<u64>(), shots);
        prop_assert_eq!(d, sample_probabilities(&p, shots, s).unwrap());
    }
}

#[test]
fn generators_hold_their_shape_over_many_seeds() {
    for s in 0..100 {
        let g = generate_graph(Topology::ThreeRegular, 8, s).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.edges().iter().all(|&(a, b)| a < b));
        let grid = generate_graph(Topology::Grid2D, 16, s).unwrap();
        assert_eq!(grid.edges().len(), 24);
        let star = generate_graph(Topology::Star, 9, s).unwrap();
        assert_eq!(star.degrees().iter().max(), Some(&8));
        let er = generate_graph(Topology::ErdosRenyi(0.5), 10, s).unwrap();
        assert_eq!(er, generate_graph(Topology::ErdosRenyi(0.5), 10, s).unwrap());
    }
    assert!(generate_graph(Topology::ThreeRegular, 7, 0).is_err());
}
