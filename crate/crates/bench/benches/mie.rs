use criterion::{black_box, criterion_group, criterion_main, Criterion};
use sphercool::mie::{default_n_max, efficiencies, mie_coefficients};
use sphercool::wgm::ResonanceSearch;
use sphercool::{ModeKind, RefractiveIndex, SizeParameter};

const INDEX: f64 = 1.4496314079440127;

fn coefficients(c: &mut Criterion) {
    let x = SizeParameter::new(40.5).unwrap();
    let m = RefractiveIndex::new(INDEX).unwrap();
    let n_max = default_n_max(40.5);
    c.bench_function("mie_coefficients x=40.5", |b| {
        b.iter(|| mie_coefficients(black_box(x), black_box(m), n_max).unwrap())
    });
    c.bench_function("efficiencies x=40.5", |b| b.iter(|| efficiencies(black_box(x), black_box(m)).unwrap()));
}

fn resonance(c: &mut Criterion) {
    let mut group = c.benchmark_group("resonance");
    group.sample_size(10);
    group.bench_function("locate a_52 l=1", |b| {
        b.iter(|| ResonanceSearch::new(ModeKind::Electric, 52, 1, INDEX).locate().unwrap())
    });
    group.finish();
}

criterion_group!(benches, coefficients, resonance);
criterion_main!(benches);
