use criterion::{criterion_group, criterion_main, Criterion};
use sphercool::dynamics::simulate;
use sphercool::{CoolingParams, GasEnvironment, SimConfig, TrapConfig, TrapKind};
use std::f64::consts::PI;

fn trap() -> TrapConfig {
    TrapConfig::from_stiffness_and_mass(TrapKind::OpticalTrap, 5e-5, 4e-12).unwrap()
}

fn gas_only(c: &mut Criterion) {
    let mut cfg = SimConfig::new(trap(), 0.2, 2e-5);
    cfg.gas = Some(GasEnvironment::air(101_325.0).unwrap());
    c.bench_function("simulate gas 10k steps", |b| b.iter(|| simulate(&cfg).unwrap()));
}

fn molasses(c: &mut Criterion) {
    let delta = 2.0 * PI * 32e6;
    let params = CoolingParams::new(0.0, 0.1, delta, -delta, 773e-9).unwrap();
    let cfg = SimConfig::new(trap(), 0.2, 2e-5).with_molasses(params);
    c.bench_function("simulate molasses 10k steps", |b| b.iter(|| simulate(&cfg).unwrap()));
}

criterion_group!(benches, gas_only, molasses);
criterion_main!(benches);
