use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use timed_dicke::presets::{fig4_base, LAMBDA0};
use timed_dicke::{
    assemble_td_direct, build_generator, plus_state, rk4_propagate, EigenSolution, Ensemble, Kernel,
    TdTransform,
};

fn fig2_sphere() -> Ensemble {
    Ensemble::sphere_lattice(3.0, 1.0, [1.0, 0.0, 0.0], Some(121)).unwrap()
}

fn fig4_sphere() -> Ensemble {
    let cfg = fig4_base();
    Ensemble::sphere_lattice(cfg.radius.unwrap(), LAMBDA0, cfg.k0, Some(1000)).unwrap()
}

fn generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("generator");
    for (name, e) in [("n121", fig2_sphere()), ("n1000", fig4_sphere())] {
        group.bench_with_input(BenchmarkId::new("fock_exp", name), &e, |b, e| {
            b.iter(|| build_generator(black_box(e), Kernel::Exp, 1.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("td_direct_exp", name), &e, |b, e| {
            b.iter(|| assemble_td_direct(black_box(e), Kernel::Exp, 1.0).unwrap())
        });
    }
    group.sample_size(10);
    let e = fig4_sphere();
    let m = build_generator(&e, Kernel::Exp, 1.0).unwrap();
    let s = TdTransform::new(&e);
    group.bench_function("conjugate_n1000", |b| b.iter(|| s.transform_generator(black_box(&m)).unwrap()));
    group.finish();
}

fn propagation(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagate");
    group.sample_size(10);
    let e = fig4_sphere();
    let m = build_generator(&e, Kernel::Exp, 1.0).unwrap();
    let b0 = plus_state(&e);
    // 10 RK4 steps at N = 1000
    group.bench_function("rk4_10_steps_n1000", |b| {
        b.iter(|| rk4_propagate(black_box(&m), &b0, 0.01, 0.1, 10).unwrap())
    });

    let e = fig2_sphere();
    let m = build_generator(&e, Kernel::Exp, 1.0).unwrap();
    let b0 = plus_state(&e);
    group.bench_function("eigen_n121", |b| b.iter(|| EigenSolution::new(black_box(&m), &b0).unwrap()));
    group.finish();
}

criterion_group!(benches, generators, propagation);
criterion_main!(benches);
