use criterion::{black_box, criterion_group, criterion_main, Criterion};

use specreg::{
    distance_function, error_curve, log_grid, make_solution_from_profile, solve_alpha_delta,
    validate_generator, CurveProvenance, FilterFamily, IndexFunction, SourceProfile,
    SpectralOperator, SpectralVector,
};

fn poly_instance(p: f64, n: usize) -> (SpectralOperator, SpectralVector) {
    let op = SpectralOperator::polynomial(p, n).unwrap();
    let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
    let x = make_solution_from_profile(&op, &profile).unwrap();
    (op, x)
}

fn provenance() -> CurveProvenance {
    CurveProvenance {
        operator: "polynomial:1:4000".into(),
        filter: "tikhonov".into(),
        profile: "holder:1*1".into(),
    }
}

pub fn bench_error_curve(c: &mut Criterion) {
    let (op, x) = poly_instance(1.0, 4000);
    let family = FilterFamily::tikhonov();
    let alphas = log_grid(1e-7, 1e-2, 10);
    c.bench_function("error_curve poly n=4000, 51 alphas", |b| {
        b.iter(|| error_curve(&op, &x, &family, black_box(&alphas), provenance()).unwrap())
    });
}

pub fn bench_alpha_delta(c: &mut Criterion) {
    let (op, x) = poly_instance(1.0, 4000);
    let family = FilterFamily::tikhonov();
    c.bench_function("solve_alpha_delta poly n=4000", |b| {
        b.iter(|| solve_alpha_delta(&op, &x, &family, black_box(1e-4)).unwrap())
    });
}

pub fn bench_distance(c: &mut Criterion) {
    let (op, x) = poly_instance(1.0, 100_000);
    let phi = IndexFunction::holder(0.5).unwrap();
    c.bench_function("distance_function poly n=1e5", |b| {
        b.iter(|| distance_function(&op, &x, &phi, black_box(10.0)).unwrap())
    });
}

pub fn bench_validate(c: &mut Criterion) {
    let family = FilterFamily::tikhonov();
    let grid = log_grid(1e-8, 1e2, 20);
    c.bench_function("validate_generator tikhonov 201x201", |b| {
        b.iter(|| validate_generator(&family, black_box(&grid), black_box(&grid)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_error_curve, bench_alpha_delta, bench_distance, bench_validate
}
criterion_main!(benches);
