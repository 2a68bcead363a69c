use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use skt_core::families::{self, random, sample_rng, FamilyParams};
use skt_core::hermitian::skt_report;
use skt_core::shear::{self, ShearJson};
use skt_core::Tol;

fn instances(tol: Tol) -> Vec<FamilyParams> {
    (0..16)
        .map(|i| random::six_dim(&mut sample_rng(1, i)))
        .filter(|p| p.generate(tol).is_ok())
        .collect()
}

fn verdicts(c: &mut Criterion) {
    let tol = Tol::default();
    let hs: Vec<_> = instances(tol).iter().map(|p| p.generate(tol).unwrap()).collect();
    c.bench_function("skt_report/6d", |b| {
        b.iter(|| hs.iter().map(|h| skt_report(black_box(h), tol).dc).sum::<f64>())
    });
    c.bench_function("fingerprint/6d", |b| {
        b.iter(|| {
            hs.iter()
                .map(|h| black_box(h).algebra.fingerprint(tol).der_dim)
                .sum::<usize>()
        })
    });
}

fn shear_pipeline(c: &mut Criterion) {
    let tol = Tol::default();
    let p = random::almost_abelian(4, &mut sample_rng(2, 0));
    let data = families::almost_abelian_shear_data(&p, tol).unwrap();
    let text = serde_json::to_string(&ShearJson::from_data(&data)).unwrap();
    c.bench_function("shear/analyze_8d", |b| {
        b.iter(|| shear::analyze(black_box(&data), tol).unwrap())
    });
    c.bench_function("shear/json_to_report_8d", |b| {
        b.iter(|| {
            let sj: ShearJson = serde_json::from_str(black_box(&text)).unwrap();
            shear::analyze(&sj.data(tol).unwrap(), tol).unwrap().is_skt_data()
        })
    });
}

fn decide(c: &mut Criterion) {
    let tol = Tol::default();
    let fs: Vec<_> = (0..16)
        .map(|i| random::almost_abelian_ad(&random::almost_abelian_any(4, &mut sample_rng(3, i)), tol).unwrap())
        .collect();
    c.bench_function("decide_almost_abelian/7x7", |b| {
        b.iter(|| {
            fs.iter()
                .filter(|f| families::decide_almost_abelian(black_box(f), tol).admissible)
                .count()
        })
    });
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan6d");
    g.sample_size(10);
    g.bench_function("200_samples", |b| {
        b.iter(|| families::scan_6d(black_box(200), 7, Tol::default()).skt)
    });
    g.finish();
}

criterion_group!(benches, verdicts, shear_pipeline, decide, scan);
criterion_main!(benches);
