use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ptsp_core::analysis::{lp_bound, solve_atsp, Strategy};
use ptsp_core::formulations::{BuildOptions, FamilyId, FormulationId};
use ptsp_core::instance::{GenMode, Instance};

fn closures() -> Vec<FormulationId> {
    [FamilyId::ClScf, FamilyId::ClDl, FamilyId::ClDlOnVmtz, FamilyId::ClMtz]
        .into_iter()
        .map(|f| FormulationId::fixed(f).unwrap())
        .collect()
}

fn bounds(c: &mut Criterion) {
    let opts = BuildOptions::pruned();
    let mut g = c.benchmark_group("lp_bound");
    g.sample_size(10);
    for n in [5, 6] {
        let inst = Instance::generate(n, 7, GenMode::Uniform).unwrap();
        for id in closures() {
            g.bench_with_input(BenchmarkId::new(id.to_string(), n), &inst, |b, inst| {
                b.iter(|| lp_bound(black_box(inst), &id, &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let opts = BuildOptions::pruned();
    let inst = Instance::generate(7, 3, GenMode::EuclideanAsym).unwrap();
    let mut g = c.benchmark_group("branch_and_bound_n7");
    g.sample_size(10);
    for id in closures() {
        g.bench_function(id.to_string(), |b| {
            b.iter(|| solve_atsp(black_box(&inst), &id, Strategy::BranchAndBound, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bounds, branch_and_bound);
criterion_main!(benches);
