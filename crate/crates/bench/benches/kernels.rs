use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use optokerr::catstate::{decompose_cat, evolve_cat, wigner, AxisSpec};
use optokerr::correlations::{g2_zero, CorrelationKernel, DriveConfig, QuadratureConfig};
use optokerr::oracle::{build, krylov, Model, DEFAULT_BUDGET};
use optokerr::spectrum::{diagonalize, kerr_strength, KerrOptions, NormalModeDecay};
use optokerr::PolaronFrame;

fn frame(g: f64) -> PolaronFrame {
    let m = diagonalize(g, 1.251, 1.0, 1e-3).unwrap();
    kerr_strength(&m, g, 1.251, 1.0, 1e-3, NormalModeDecay::default(), KerrOptions::default()).unwrap()
}

fn spectrum(c: &mut Criterion) {
    c.bench_function("diagonalize", |b| b.iter(|| diagonalize(black_box(0.5), black_box(1.251), 1.0, 1e-3)));
    c.bench_function("kerr_strength", |b| b.iter(|| frame(black_box(0.559))));
}

fn correlations(c: &mut Criterion) {
    let kernel = CorrelationKernel::from_frame(&frame(0.5592));
    c.bench_function("phi4", |b| b.iter(|| kernel.phi4(black_box(1.3), black_box(0.7), black_box(2.1))));
    let mut g = c.benchmark_group("g2");
    g.sample_size(10);
    for gap in [1e-3, 1e-5] {
        let f = frame(1.251f64.sqrt() / 2.0 - gap);
        let drive = DriveConfig { delta_a: f.eta, epsilon_a: 1e-4, kappa_a: 0.1 };
        g.bench_function(format!("g2_zero_gap_{gap:e}"), |b| {
            b.iter(|| g2_zero(&f, &drive, &QuadratureConfig::default()).unwrap())
        });
    }
    g.finish();
}

fn cats(c: &mut Criterion) {
    let state = evolve_cat(Complex64::new(2.0, 0.0), 0.125, 1, 40).unwrap();
    c.bench_function("decompose_four_component", |b| b.iter(|| decompose_cat(black_box(&state), 12).unwrap()));
    let axis = AxisSpec::symmetric(7.0, 101);
    c.bench_function("wigner_101x101", |b| b.iter(|| wigner(&state, axis, axis).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let f = PolaronFrame {
        zeta_minus: 0.3,
        zeta_plus: 0.0,
        eta: 0.0324,
        kappa_minus: 0.05,
        kappa_plus: 0.0,
        omega_minus: 0.36,
        omega_plus: 1.0,
        sum_rule_residual: 0.0,
    };
    let sys = build(&Model::Driven { frame: f, delta_a: 0.0324, epsilon_a: 4e-4, kappa_a: 0.02 }, [4, 10, 1], DEFAULT_BUDGET)
        .unwrap();
    let l = sys.liouvillian();
    let n = sys.dim();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("krylov_propagate_dim40", |b| {
        b.iter(|| {
            let mut v = vec![Complex64::new(0.0, 0.0); n * n];
            v[0] = Complex64::new(1.0, 0.0);
            krylov::expm_action(&l, &mut v, 5.0, &krylov::KrylovOptions::default()).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, spectrum, correlations, cats, oracle);
criterion_main!(benches);
