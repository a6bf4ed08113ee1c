use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use involute::classify::{conjecture_search, SamplerConfig};
use involute::continuum::eigen_residual;
use involute::spectral::right_eigenvectors;
use involute::transform::{binomial_transform, is_stochastic};
use involute::walk::transition_matrix;
use involute::ContinuousWalk;
use involute_bench::{families, harmonic};

fn walks(c: &mut Criterion) {
    let mut g = c.benchmark_group("transition_matrix");
    for (name, spec) in families() {
        for n in [8, 16, 32] {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| transition_matrix(&spec, n).unwrap())
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("stationary");
    for (name, spec) in families() {
        let w = transition_matrix(&spec, 12).unwrap();
        g.bench_function(name, |b| b.iter(|| w.stationary().unwrap()));
    }
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("charpoly");
    for n in [6, 10, 14] {
        let p = transition_matrix(&families()[0].1, n).unwrap().p().clone();
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| b.iter(|| p.charpoly()));
    }
    g.finish();

    c.bench_function("eigenvectors/delta(40,3)/n=8", |b| {
        let spec = &families()[2].1;
        b.iter(|| right_eigenvectors(spec, 8).unwrap())
    });
    c.bench_function("eigen_residual/kappa(1,1)/d=4", |b| {
        b.iter(|| eigen_residual(ContinuousWalk::Kappa { a: 1, b: 1 }, 4).unwrap())
    });
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("binomial_transform");
    for n in [8, 16, 32] {
        let l = harmonic(n);
        g.bench_with_input(BenchmarkId::new("transform", n), &l, |b, l| b.iter(|| binomial_transform(l)));
        g.bench_with_input(BenchmarkId::new("stochastic", n), &l, |b, l| b.iter(|| is_stochastic(l)));
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let cfg = SamplerConfig { samples: 50, ..SamplerConfig::default() };
    let mut g = c.benchmark_group("conjecture_search");
    g.sample_size(10);
    g.bench_function("n=4", |b| b.iter(|| conjecture_search(4, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, walks, spectra, transforms, search);
criterion_main!(benches);
