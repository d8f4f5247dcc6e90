use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zc_bench::{agl_1_9, quintic_census, s6, sextic_scan, wide_tuple};
use zc_core::group::{PermutationGroup, DEFAULT_ELEMENT_CAP};
use zc_core::hurwitz::{canonical_form, class_key, enumerate_covers};

fn groups(c: &mut Criterion) {
    for (name, gens) in [("agl_1_9", agl_1_9()), ("s6", s6())] {
        let d = gens[0].degree();
        c.bench_function(&format!("closure/{name}"), |b| {
            b.iter(|| {
                let g = PermutationGroup::new(d, black_box(gens.clone())).unwrap();
                g.order(DEFAULT_ELEMENT_CAP).unwrap()
            })
        });
        c.bench_function(&format!("solvable/{name}"), |b| {
            b.iter(|| {
                let g = PermutationGroup::new(d, black_box(gens.clone())).unwrap();
                (g.is_primitive(), g.is_solvable(DEFAULT_ELEMENT_CAP).unwrap())
            })
        });
    }
}

fn canonical(c: &mut Criterion) {
    let t = wide_tuple();
    c.bench_function("class_key/d9", |b| b.iter(|| class_key(black_box(&t))));
    c.bench_function("canonical_form/d9", |b| b.iter(|| canonical_form(black_box(&t))));
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let (spec, opts) = sextic_scan();
    g.bench_function("d6_l3_ps", |b| b.iter(|| enumerate_covers(&spec, &opts).unwrap().census.nodes));
    for jobs in [1, 4] {
        let (spec, opts) = quintic_census(jobs);
        g.bench_function(format!("d5_census_jobs{jobs}"), |b| {
            b.iter(|| enumerate_covers(&spec, &opts).unwrap().census.class_count)
        });
    }
    g.finish();
}

criterion_group!(benches, groups, canonical, search);
criterion_main!(benches);
