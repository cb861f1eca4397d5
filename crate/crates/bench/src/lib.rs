//! Benchmark bodies, kept in a library so the bench target stays a thin
//! `criterion_main!` wrapper.

use std::hint::black_box;

use coha_core::charvar::{brute_relation_count, DEFAULT_TUPLE_BUDGET};
use coha_core::group::{build_group, DEFAULT_GROUP_CAP};
use coha_core::lie::bcstar_series;
use coha_core::plethysm::{pexp, plog};
use coha_core::quiver::{kac_polynomial, DimVector, KacOptions, Quiver};
use coha_core::verify::{check_echeck, check_genus0_euler, CheckSpec};
use coha_core::TruncationPolicy;
use criterion::{BenchmarkId, Criterion};

pub fn plethystics(c: &mut Criterion) {
    let mut group = c.benchmark_group("pexp");
    for t_max in [4usize, 6, 8] {
        let p = TruncationPolicy::ints(t_max, 0, 20).unwrap();
        let f = bcstar_series(p).unwrap().shift_rank(1);
        group.bench_with_input(BenchmarkId::new("t_over_1_minus_q", t_max), &f, |b, f| {
            b.iter(|| pexp(black_box(f)))
        });
        let e = pexp(&f).unwrap();
        group.bench_with_input(BenchmarkId::new("plog_roundtrip", t_max), &e, |b, e| {
            b.iter(|| plog(black_box(e)))
        });
    }
    group.finish();
}

pub fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_relation_count");
    group.sample_size(10);
    for q in [2u64, 3] {
        let g = build_group(2, q, DEFAULT_GROUP_CAP).unwrap();
        let id = g.identity_index();
        group.bench_function(BenchmarkId::new("gl2_genus2", q), |b| {
            b.iter(|| brute_relation_count(black_box(&g), 2, id, DEFAULT_TUPLE_BUDGET).unwrap())
        });
    }
    group.finish();
}

pub fn kac(c: &mut Criterion) {
    let mut group = c.benchmark_group("kac_polynomial");
    group.sample_size(10);
    let opts = KacOptions::default();
    for (name, q, d) in [
        ("jordan_3", Quiver::jordan(), vec![3]),
        (
            "kronecker_1_1",
            Quiver::parse("vertices: 2\narrow: 0 1\narrow: 0 1\n").unwrap(),
            vec![1, 1],
        ),
        ("loops3_1", Quiver::loops(3), vec![1]),
    ] {
        let d = DimVector(d);
        group.bench_function(name, |b| {
            b.iter(|| kac_polynomial(black_box(&q), &d, &opts).unwrap())
        });
    }
    group.finish();
}

pub fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("checks");
    group.sample_size(10);
    let g0 = CheckSpec::new("genus0", 0, 6).with_q_window(0, 20).unwrap();
    group.bench_function("genus0_r6", |b| {
        b.iter(|| check_genus0_euler(black_box(&g0)).unwrap())
    });
    let e2 = CheckSpec::new("echeck", 2, 2);
    group.bench_function("echeck_g2_r2", |b| {
        b.iter(|| check_echeck(black_box(&e2)).unwrap())
    });
    group.finish();
}
