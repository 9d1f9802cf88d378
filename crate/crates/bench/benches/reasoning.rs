use criterion::{criterion_group, criterion_main, Criterion};

use herm_bench::{bench_signature, formula};
use herm_core::{embed_one, normalize, Budget, LogicSpec, Reasoner};

fn bench_normalize(c: &mut Criterion) {
    let sig = bench_signature();
    let t = formula(
        "! [X:e]: (fish @ X => box (dia (vertebrate @ X) & box (fish @ X)))",
        &sig,
    );
    let expanded = herm_core::embed::expand(&t);
    c.bench_function("normalize_embedded_term", |b| {
        b.iter(|| normalize(std::hint::black_box(&expanded)))
    });
}

fn bench_tableau_valid(c: &mut Criterion) {
    let sig = bench_signature();
    let budget = Budget::default();
    let dist = formula("box (p => q) => (box p => box q)", &sig);
    let s5 = formula("dia p => box dia p", &sig);
    c.bench_function("tableau_k_distribution", |b| {
        b.iter(|| {
            let mut r = Reasoner::with_cache(false);
            r.entails(&[], &dist, &LogicSpec::k(), &sig, &budget)
                .unwrap()
        })
    });
    c.bench_function("tableau_s5_axiom", |b| {
        b.iter(|| {
            let mut r = Reasoner::with_cache(false);
            r.entails(&[], &s5, &LogicSpec::s5(), &sig, &budget)
                .unwrap()
        })
    });
}

fn bench_model_search(c: &mut Criterion) {
    let sig = bench_signature();
    let budget = Budget::default();
    let formulas = [formula("dia p", &sig), formula("dia (~p)", &sig)];
    let hol: Vec<_> = formulas
        .iter()
        .map(|f| embed_one(f, &LogicSpec::k(), &sig).unwrap())
        .collect();
    c.bench_function("find_model_two_diamonds", |b| {
        b.iter(|| herm_core::reasoner::find_model(std::hint::black_box(&hol), &budget, false))
    });
}

fn bench_verdict_cache(c: &mut Criterion) {
    let sig = bench_signature();
    let budget = Budget::default();
    let dist = formula("box (p => q) => (box p => box q)", &sig);
    c.bench_function("cached_repeat_query", |b| {
        let mut r = Reasoner::new();
        r.entails(&[], &dist, &LogicSpec::s4(), &sig, &budget)
            .unwrap();
        b.iter(|| {
            r.entails(&[], &dist, &LogicSpec::s4(), &sig, &budget)
                .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_normalize,
    bench_tableau_valid,
    bench_model_search,
    bench_verdict_cache
);
criterion_main!(benches);
