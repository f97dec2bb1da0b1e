use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ptsp_core::params::d_mtz;
use ptsp_core::point::XPoint;
use ptsp_core::separation::{separate_circuit, separate_cut, separate_dl_lifted, CircuitRhs, CutRhs, DlMode};
use ptsp_core::{ArcSpace, Rat};

/// Two disjoint subtours split evenly with the uniform point.
fn point(space: &ArcSpace) -> XPoint {
    let n = space.n();
    let half = n / 2;
    let uni = Rat::new(1, 2 * (n as i64 - 1));
    XPoint::from_fn(space, |i, j| {
        let same = (i <= half) == (j <= half);
        let next = if i <= half {
            if i == half {
                1
            } else {
                i + 1
            }
        } else if i == n {
            half + 1
        } else {
            i + 1
        };
        if same && j == next {
            &uni + &Rat::new(1, 2)
        } else {
            uni.clone()
        }
    })
}

fn oracles(c: &mut Criterion) {
    let mut g = c.benchmark_group("separation");
    for n in [6, 8, 10] {
        let space = ArcSpace::new(n).unwrap();
        let x = point(&space);
        let d = d_mtz(&space);
        g.bench_with_input(BenchmarkId::new("circuit-unit", n), &x, |b, x| {
            b.iter(|| separate_circuit(black_box(x), CircuitRhs::Unit).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("circuit-d", n), &x, |b, x| {
            b.iter(|| separate_circuit(black_box(x), CircuitRhs::Param(&d)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("cut-unit", n), &x, |b, x| {
            b.iter(|| separate_cut(black_box(x), CutRhs::Unit).unwrap())
        });
        if n <= 8 {
            g.bench_with_input(BenchmarkId::new("dl-lifted", n), &x, |b, x| {
                b.iter(|| separate_dl_lifted(black_box(x), DlMode::VertexDl).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, oracles);
criterion_main!(benches);
