//! Microbenchmarks for the hot paths: sequent generation, type inference
//! (the pruning filter), canonicalisation, proof search with and without
//! pruning, and the language-equivalence decider.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cymall::{
    canonical_rotation, decide_untyped, gen_sequent, infer_sequent, is_square, parse_ka_term,
    FocusedProver, Fragment, GenParams, NaiveProver, SearchConfig, Sequent, SplitMix64, TypeEnv,
};

fn params(leaves: u32) -> GenParams {
    GenParams {
        leaves,
        var_pool: 20,
        fragment: Fragment::Mall,
        seed: 0xBE7C,
    }
}

/// A deterministic batch of generated sequents.
fn batch(leaves: u32, count: usize) -> Vec<Sequent> {
    let p = params(leaves);
    let mut rng = SplitMix64::new(p.seed);
    (0..count).map(|_| gen_sequent(&p, &mut rng)).collect()
}

fn bench_generation(c: &mut Criterion) {
    let p = params(30);
    c.bench_function("gen_sequent/30_leaves", |b| {
        let mut rng = SplitMix64::new(p.seed);
        b.iter(|| gen_sequent(black_box(&p), &mut rng))
    });
}

fn bench_inference(c: &mut Criterion) {
    let seqs = batch(30, 64);
    let env = TypeEnv::new();
    c.bench_function("infer_sequent/30_leaves", |b| {
        b.iter(|| {
            seqs.iter()
                .filter(|s| is_square(&infer_sequent(black_box(s), &env)))
                .count()
        })
    });
}

fn bench_canonicalisation(c: &mut Criterion) {
    let seqs = batch(30, 64);
    c.bench_function("canonical_rotation/30_leaves", |b| {
        b.iter(|| {
            seqs.iter()
                .map(|s| canonical_rotation(black_box(s)).1)
                .sum::<usize>()
        })
    });
}

fn bench_search(c: &mut Criterion) {
    let seqs = batch(12, 32);
    let pruned = SearchConfig::default();
    let unpruned = SearchConfig {
        prune: false,
        ..SearchConfig::default()
    };
    c.bench_function("decide/focused_pruned/12_leaves", |b| {
        b.iter(|| {
            let mut prover = FocusedProver::new();
            seqs.iter()
                .filter(|s| prover.decide(black_box(s), &pruned).unwrap().0)
                .count()
        })
    });
    c.bench_function("decide/focused_unpruned/12_leaves", |b| {
        b.iter(|| {
            let mut prover = FocusedProver::new();
            seqs.iter()
                .filter(|s| prover.decide(black_box(s), &unpruned).unwrap().0)
                .count()
        })
    });
    c.bench_function("decide/naive/12_leaves", |b| {
        b.iter(|| {
            let mut prover = NaiveProver::new();
            seqs.iter()
                .filter(|s| prover.decide(black_box(s), &unpruned).unwrap().0)
                .count()
        })
    });
}

fn bench_kleene(c: &mut Criterion) {
    let a = parse_ka_term("(x + y)*").unwrap();
    let b_term = parse_ka_term("(x* . y)* . x*").unwrap();
    c.bench_function("decide_untyped/denesting", |b| {
        b.iter(|| decide_untyped(black_box(&a), black_box(&b_term)))
    });
}

criterion_group!(
    benches,
    bench_generation,
    bench_inference,
    bench_canonicalisation,
    bench_search,
    bench_kleene
);
criterion_main!(benches);
