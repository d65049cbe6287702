use alrep_core::contfrac::CfSource;
use alrep_core::pipeline::reals::{mu_gamma1, over_ln10, tau_2_10, tau_real};
use alrep_core::reduction::{dp_reduce, ReductionContext, ReductionInstance};
use alrep_core::arith::LazyReal;
use alrep_core::{decompose, dominant_root, lucas_stream, Precision};
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;

fn sequences(c: &mut Criterion) {
    c.bench_function("lucas_stream k=10 n<=1000", |b| b.iter(|| lucas_stream(black_box(10), 1000).unwrap()));
    let v: BigInt = "7777777777777777777777777777777777777777777777777777777777777717".parse().unwrap();
    c.bench_function("decompose 64 digits", |b| b.iter(|| decompose(black_box(&v))));
}

fn roots(c: &mut Criterion) {
    // the root cache is keyed by (k, bits), so vary k to stay cold
    let mut k = 1000u32;
    c.bench_function("dominant_root 1024 bits", |b| {
        b.iter(|| {
            k += 1;
            dominant_root(k, Precision::new(1024).unwrap()).unwrap()
        })
    });
}

fn continued_fractions(c: &mut Criterion) {
    let mut g = c.benchmark_group("contfrac");
    g.sample_size(10);
    g.bench_function("log2/log10 to 600 quotients", |b| {
        b.iter(|| CfSource::default().expand(&tau_2_10(), 600).unwrap())
    });
    g.finish();
}

fn reductions(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduction");
    g.sample_size(10);
    let m = alrep_core::algebraic::bound_n_initial(&BigInt::from(10)).unwrap();
    g.bench_function("gamma1 k=10 a=1", |b| {
        b.iter(|| {
            let ctx = ReductionContext::default();
            let inst = ReductionInstance::new(tau_real(10), mu_gamma1(10, 1), over_ln10(174), LazyReal::rational(10, 1), m.clone()).unwrap();
            dp_reduce(&inst, &ctx).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, sequences, roots, continued_fractions, reductions);
criterion_main!(benches);
