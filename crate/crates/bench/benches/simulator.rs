use std::hint::black_box;

use ansatz_rl::ansatz::{build_linear_ryz, transpiled_counts};
use ansatz_rl::problems::{ProblemInstance, ProblemKind, Topology};
use ansatz_rl::qsim::{estimate_expectation, sample_shots, simulate};
use ansatz_rl::QaoaVariant;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn statevector(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_linear");
    for n in [8, 12, 16] {
        let circuit = build_linear_ryz(n).unwrap().with_params(&vec![0.3; n - 1]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &circuit, |b, circ| {
            b.iter(|| simulate(black_box(circ)).unwrap())
        });
    }
    group.finish();
}

fn shots(c: &mut Criterion) {
    let inst = ProblemInstance::generate(Topology::ThreeRegular, 12, ProblemKind::MaxCut, 2.0, 0).unwrap();
    let circuit = ansatz_rl::ansatz::build_qaoa(&inst, 1, QaoaVariant::Standard)
        .unwrap()
        .with_params(&[0.4, 0.7])
        .unwrap();
    c.bench_function("sample_1000_shots_n12", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            let d = sample_shots(&circuit, 1000, seed).unwrap();
            estimate_expectation(&d, &inst.ham).unwrap()
        })
    });
    c.bench_function("transpiled_counts_qaoa_n12", |b| b.iter(|| transpiled_counts(black_box(&circuit))));
}

criterion_group!(benches, statevector, shots);
criterion_main!(benches);
