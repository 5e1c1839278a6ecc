use capflow_bench::{ellipse_problem, interpolated, interval_problem};
use capflow_core::anisotropy::{coefficient_matrix, estimate_constants, MobilitySpec};
use capflow_core::initial::random_smooth;
use capflow_core::solver::{advance, apply_operator, compatibilize, stable_step, FlowState};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn anisotropy(c: &mut Criterion) {
    let f = interpolated(0.1);
    let g = MobilitySpec::isotropic(2);
    c.bench_function("coefficient_matrix", |b| {
        b.iter(|| coefficient_matrix(&f, &g, black_box(&[0.4, -0.7])).unwrap())
    });
    c.bench_function("estimate_constants/4097", |b| b.iter(|| estimate_constants(&f, &g, 4097).unwrap()));
}

fn operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_operator");
    for &(nr, np) in &[(8usize, 16usize), (16, 32), (32, 64)] {
        let p = ellipse_problem(nr, np);
        let u = compatibilize(&p, &random_smooth(p.mesh(), 3, 0.2)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{nr}x{np}")), &u, |b, u| {
            b.iter(|| apply_operator(&p, black_box(u), 0.0).unwrap())
        });
    }
    group.finish();
}

fn stepping(c: &mut Criterion) {
    let p = interval_problem(200, std::f64::consts::FRAC_PI_3);
    let u0 = compatibilize(&p, &vec![0.0; p.mesh().n_nodes()]).unwrap();
    c.bench_function("interval_step/200", |b| {
        let mut s = FlowState::new(&p, u0.clone(), 0.0).unwrap();
        b.iter(|| {
            let dt = stable_step(&p, &s, 0.4).unwrap();
            advance(&p, &mut s, dt).unwrap();
        })
    });
}

criterion_group!(benches, anisotropy, operator, stepping);
criterion_main!(benches);
