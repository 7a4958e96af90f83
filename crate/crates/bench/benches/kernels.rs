use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;

use qfock_core::fockspace::{gram_apply, op_norm, q_norm, FockVector, Letter, NormOptions, QContext, Word};
use qfock_core::moments::{circular_moment, StarWord};
use qfock_core::qcircular::{evaluate_expr, expand_word_terms, HoloPolynomial};

fn gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_apply");
    for trunc in [6, 8] {
        let ctx = QContext::new(0.5, 2, trunc).unwrap();
        let basis = ctx.basis().unwrap();
        let x: Vec<C64> = (0..basis.dim()).map(|i| C64::new((i % 7) as f64, 1.0)).collect();
        g.bench_with_input(BenchmarkId::from_parameter(trunc), &x, |b, x| b.iter(|| gram_apply(basis, 0.5, black_box(x))));
    }
    g.finish();
}

fn sparse_norm(c: &mut Criterion) {
    let x: FockVector = (0..=40)
        .map(|n| (Word::repeat(Letter::barred(1), n / 2).concat(&Word::repeat(Letter::plain(1), n)), C64::new(1.0, 0.0)))
        .collect();
    c.bench_function("q_norm_long_words", |b| b.iter(|| q_norm(0.5, black_box(&x))));
}

fn norm_of_power(c: &mut Criterion) {
    let mut g = c.benchmark_group("op_norm_power");
    g.sample_size(10);
    for n in [2, 4] {
        let ctx = QContext::new(0.3, 1, n + 8).unwrap();
        let t = evaluate_expr(&HoloPolynomial::power(1, n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| op_norm(&ctx, t, &NormOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let w = Word::plain(&[1, 2, 1, 2]);
    c.bench_function("expand_word_4", |b| b.iter(|| expand_word_terms(0.5, black_box(&w)).unwrap()));
}

fn moments(c: &mut Criterion) {
    let sw = StarWord::pattern(2, 4);
    c.bench_function("crossing_sum_pattern_2_4", |b| b.iter(|| circular_moment(0.5, black_box(&sw))));
}

criterion_group!(benches, gram, sparse_norm, norm_of_power, expansion, moments);
criterion_main!(benches);
