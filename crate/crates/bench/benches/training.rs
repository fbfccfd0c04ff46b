use ansatz_rl::agent::{Batch, EnvConfig, Environment, PpoConfig, PpoModel};
use ansatz_rl::ansatz::build_qaoa;
use ansatz_rl::optimizer::optimize_circuit;
use ansatz_rl::problems::{ProblemInstance, ProblemKind, Topology};
use ansatz_rl::{seed, Cobyla, QaoaVariant};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::Rng;

fn cobyla_qaoa(c: &mut Criterion) {
    let inst = ProblemInstance::generate(Topology::ThreeRegular, 8, ProblemKind::MaxCut, 2.0, 0).unwrap();
    let base = build_qaoa(&inst, 1, QaoaVariant::Standard).unwrap().with_params(&[0.5, -0.3]).unwrap();
    c.bench_function("cobyla_qaoa1_n8", |b| {
        b.iter(|| {
            let mut circ = base.clone();
            optimize_circuit(&mut circ, &inst, 1000, 7, &Cobyla::default()).unwrap()
        })
    });
}

fn env_step(c: &mut Criterion) {
    let inst = ProblemInstance::generate(Topology::Cycle, 6, ProblemKind::MaxCut, 2.0, 0).unwrap();
    c.bench_function("env_reset_and_step_n6", |b| {
        let mut s = 0;
        b.iter(|| {
            s += 1;
            let mut env = Environment::new(&inst, EnvConfig::default(), s).unwrap();
            env.step((s as usize * 7) % env.action_space().len(), s).unwrap()
        })
    });
}

fn ppo_update(c: &mut Criterion) {
    let n_inputs = 1 << 8;
    let n_actions = 3 * 8 + 9 * 28;
    let model = PpoModel::new(n_inputs, n_actions, PpoConfig::default(), 0).unwrap();
    let mut rng = seed::rng(1);
    let mut batch = Batch::default();
    for _ in 0..384 {
        let raw: Vec<f64> = (0..n_inputs).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let obs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let a = rng.gen_range(0..n_actions);
        batch.old_log_probs.push(model.policy_forward(&obs).unwrap().log_prob(a));
        batch.observations.push(obs);
        batch.actions.push(a);
        batch.advantages.push(rng.gen_range(-1.0..1.0));
        batch.returns.push(rng.gen_range(0.0..5.0));
    }
    let mut group = c.benchmark_group("ppo");
    group.sample_size(10);
    group.bench_function("update_384_steps_n8", |b| b.iter(|| model.clone().update(&batch).unwrap()));
    group.finish();
}

criterion_group!(benches, cobyla_qaoa, env_step, ppo_update);
criterion_main!(benches);
