use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use hilmod::{build_truncated_module, joint_kernel, DiagonalKernelSpec, IdealSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn bench_joint_kernel(crit: &mut Criterion) {
    let module = build_truncated_module(
        DiagonalKernelSpec::power(vec![2.0, 3.0]).unwrap(),
        IdealSpec::VanishAtOrigin,
        8,
    )
    .unwrap();
    crit.bench_function("joint_kernel_n8", |b| {
        b.iter(|| joint_kernel(&module, &[c(0.1), c(0.2)], 1e-9).unwrap())
    });
}

fn bench_grid(crit: &mut Criterion) {
    let module = build_truncated_module(DiagonalKernelSpec::hardy(2), IdealSpec::VanishAtOrigin, 6)
        .unwrap();
    crit.bench_function("joint_kernel_grid_5x5", |b| {
        b.iter(|| {
            for i in 0..5 {
                for j in 0..5 {
                    let w = [c(-0.4 + 0.2 * i as f64), c(-0.4 + 0.2 * j as f64)];
                    joint_kernel(&module, &w, 1e-9).unwrap();
                }
            }
        })
    });
}

criterion_group!(benches, bench_joint_kernel, bench_grid);
criterion_main!(benches);
