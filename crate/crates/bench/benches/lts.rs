use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use ogspi::encode::encode_cbv;
use ogspi::equiv::{
    bounded_weak_bisim, bounded_weak_bisim_confluent, enf_bisim, enumerate_traces, Aogs, Cogs, PiOp, PiStd,
};
use ogspi::ogs::{AConfig, CConfig};
use ogspi_bench::{closed_terms, redexes, term};

fn traces(c: &mut Criterion) {
    let terms = closed_terms(10);
    let mut g = c.benchmark_group("traces");
    for depth in [2, 3, 4] {
        g.bench_with_input(BenchmarkId::new("aogs", depth), &depth, |b, &d| {
            b.iter(|| {
                for t in &terms {
                    black_box(enumerate_traces(&Aogs, &AConfig::initial(t.clone()), d, 64).unwrap());
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("cogs", depth), &depth, |b, &d| {
            b.iter(|| {
                for t in &terms {
                    black_box(enumerate_traces(&Cogs, &CConfig::initial(t.clone()), d, 64).unwrap());
                }
            })
        });
    }
    g.bench_function("pi-op/3", |b| {
        let agents: Vec<_> = terms.iter().map(encode_cbv).collect();
        b.iter(|| {
            for a in &agents {
                black_box(enumerate_traces(&PiOp, a, 3, 64).unwrap());
            }
        })
    });
    g.finish();
}

fn bisim(c: &mut Criterion) {
    let mut g = c.benchmark_group("bisim");
    g.sample_size(10);
    let (r, v) = (encode_cbv(&term("(\\x. x)(\\y. y)")), encode_cbv(&term("\\y. y")));
    g.bench_function("pi/generic/identity-redex", |b| {
        b.iter(|| black_box(bounded_weak_bisim(&PiStd, &r, &PiStd, &v, 3, 64).unwrap()))
    });
    g.bench_function("pi/confluent/identity-redex", |b| {
        b.iter(|| black_box(bounded_weak_bisim_confluent(&PiStd, &r, &PiStd, &v, 3, 64).unwrap()))
    });
    let pairs: Vec<_> = redexes(8).iter().map(|(m, n)| (encode_cbv(m), encode_cbv(n))).collect();
    g.bench_function("pi/confluent/redexes-depth4", |b| {
        b.iter(|| {
            for (m, n) in &pairs {
                black_box(bounded_weak_bisim_confluent(&PiStd, m, &PiStd, n, 4, 128).unwrap());
            }
        })
    });
    let (m, n) = (term("\\x. x"), term("\\x. (\\y. y) x"));
    g.bench_function("enf/eta", |b| b.iter(|| black_box(enf_bisim(&m, &n, 4, 64))));
    g.bench_function("cogs/eta", |b| {
        let (f, h) = (CConfig::initial(m.clone()), CConfig::initial(n.clone()));
        b.iter(|| black_box(bounded_weak_bisim(&Cogs, &f, &Cogs, &h, 6, 64).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, traces, bisim);
criterion_main!(benches);
