use criterion::{criterion_group, criterion_main, Criterion};
use holorigid_bench::z2_plus_i;
use holorigid_core::orbits::multiplier_spectrum;
use holorigid_core::rigidity::{rigidity_verdict, VerdictConfig};
use holorigid_core::{Complex64, MapSpec};
use std::hint::black_box;

fn spectrum(c: &mut Criterion) {
    let f = z2_plus_i();
    for n in [4, 6, 8] {
        c.bench_function(&format!("z^2+i spectrum period {n}"), |b| b.iter(|| multiplier_spectrum(black_box(&f), n).unwrap()));
    }
}

fn verdict(c: &mut Criterion) {
    let f = z2_plus_i();
    let g = f.affine_conjugate(Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    let h = MapSpec::quadratic(Complex64::new(0.395_014_052_076_694_54, 0.555_624_571_005_995_9));
    let cfg = VerdictConfig::default();
    let mut grp = c.benchmark_group("verdict");
    grp.sample_size(10);
    grp.bench_function("conjugate pair", |b| b.iter(|| rigidity_verdict(&f, &g, &cfg).unwrap()));
    grp.bench_function("misiurewicz pair", |b| b.iter(|| rigidity_verdict(&f, &h, &cfg).unwrap()));
    grp.finish();
}

criterion_group!(benches, spectrum, verdict);
criterion_main!(benches);
