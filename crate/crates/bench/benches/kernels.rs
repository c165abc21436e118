use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use virialkit::graphs::{build_a_family, ursell};
use virialkit::homogeneous::{cluster_integral_mc, virial_table, HomogeneousModel, McOptions};
use virialkit::inversion::GCState;
use virialkit::tree::compute_tn;
use virialkit::{MeasureVec, SpeciesSpace};
use virialkit_bench::{sample_f, sample_f64};

fn ursell_functions(c: &mut Criterion) {
    let f = sample_f(4);
    let mut g = c.benchmark_group("ursell");
    for n in [4usize, 6, 8] {
        let xs: Vec<usize> = (0..n).map(|i| i % 4).collect();
        g.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| b.iter(|| ursell(&f, black_box(xs))));
    }
    g.finish();
}

fn tree_recursion(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute_tn");
    g.sample_size(20);
    for (s, n) in [(2usize, 4usize), (3, 4), (2, 5)] {
        let a = build_a_family(&sample_f(s), n).unwrap();
        g.bench_with_input(BenchmarkId::new(format!("S{s}"), n), &a, |b, a| b.iter(|| compute_tn(a, n).unwrap()));
    }
    g.finish();
}

fn density_map(c: &mut Criterion) {
    let s = 3;
    let space = SpeciesSpace::uniform(s, 1.0).unwrap();
    let st = GCState::from_f(sample_f64(s), space.clone(), 4).unwrap();
    let z = MeasureVec::new(&space, vec![0.02; s]).unwrap();
    let nu = st.rho_of_z(&z).unwrap();
    c.bench_function("rho_of_z S3 N4", |b| b.iter(|| st.rho_of_z(black_box(&z)).unwrap()));
    c.bench_function("zeta_of_nu S3 N4", |b| {
        b.iter(|| st.zeta_of_nu(black_box(&nu), virialkit::inversion::ZetaPath::Biconnected).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("cluster_integral_mc");
    g.sample_size(10);
    let hard = |_: usize, _: usize, r: &[f64]| if virialkit::homogeneous::norm(r) < 1.0 { -1.0 } else { 0.0 };
    g.bench_function("d3 n3 65536", |b| b.iter(|| cluster_integral_mc(3, 3, &hard, 1.0, 1 << 16, 1).unwrap()));
    g.finish();
    let model = HomogeneousModel::hard_spheres(3, 0.5).unwrap();
    c.bench_function("virial_table spheres N3", |b| {
        b.iter(|| virial_table(&model, 3, McOptions { samples: 1 << 14, seed: 0 }).unwrap())
    });
}

criterion_group!(benches, ursell_functions, tree_recursion, density_map, monte_carlo);
criterion_main!(benches);
