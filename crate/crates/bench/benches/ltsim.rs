use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ltsim::adaptive::{declare_profile, refine_r_iteratively};
use ltsim::executor::{plan_unitary, ElementSource};
use ltsim::integrator::{ClassLayout, ExponentialPlan};
use ltsim::oracle::QueryLedger;
use ltsim::reference::{exact_propagator, DEFAULT_TOL};
use ltsim::run::plan;
use ltsim::CatalogEntry;
use ltsim_bench::{gaussian_adaptive, random_two_qubit};

fn plan_building(c: &mut Criterion) {
    let ham = CatalogEntry::QubitPair.build().unwrap();
    let layout = ClassLayout::of_hamiltonian(&ham).unwrap();
    let times: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    c.bench_function("plan qubit pair, 1000 segments, k=2", |b| {
        b.iter(|| ExponentialPlan::from_times(&times, 2, &layout).unwrap())
    });
    c.bench_function("full planning, random 2-qubit ε=1e-2", |b| {
        b.iter(|| plan(&random_two_qubit(1e-2)).unwrap())
    });
}

fn execution(c: &mut Criterion) {
    let planned = plan(&random_two_qubit(1e-2)).unwrap();
    for (name, source) in [
        ("exact", ElementSource::Exact),
        ("discretized", ElementSource::Discretized(planned.oracle)),
    ] {
        c.bench_function(&format!("execute random 2-qubit plan, {name} elements"), |b| {
            b.iter_batched(
                QueryLedger::new,
                |mut ledger| {
                    plan_unitary(
                        &planned.plan,
                        &planned.ham,
                        &planned.layout,
                        source,
                        planned.oracle.value_qubits,
                        &mut ledger,
                    )
                    .unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
}

fn reference(c: &mut Criterion) {
    let ham = CatalogEntry::RandomSparse {
        qubits: 2,
        sparsity: 2,
        seed: 1,
    }
    .build()
    .unwrap();
    c.bench_function("reference propagator, random 2-qubit", |b| {
        b.iter(|| exact_propagator(&ham, 0.0, 1.0, DEFAULT_TOL).unwrap())
    });
}

fn scheduling(c: &mut Criterion) {
    let cfg = gaussian_adaptive(0.1, 1e-4);
    let ham = cfg.catalog.build().unwrap();
    let profile = declare_profile(&ham, 2, 1, 2.5e-5, ham.interval()).unwrap();
    c.bench_function("refine adaptive schedule, gaussian a=0.1", |b| {
        b.iter(|| refine_r_iteratively(&profile, ham.interval(), 1, 2.5e-5).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = plan_building, execution, reference, scheduling
}
criterion_main!(benches);
