use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use s4adm_core::rnf::parse_rule;
use s4adm_core::{is_admissible, is_valid_rule, to_rnf, Limits};

fn normalize(c: &mut Criterion) {
    let lim = Limits::default();
    let mut group = c.benchmark_group("to_rnf");
    for text in s4adm_bench::RULES {
        let (premises, conclusion) = parse_rule(text).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(text),
            &(premises, conclusion),
            |b, (p, q)| b.iter(|| to_rnf(p, q, &lim).unwrap()),
        );
    }
    group.finish();
}

fn decide(c: &mut Criterion) {
    let lim = Limits::default();
    let mut group = c.benchmark_group("decide");
    for text in s4adm_bench::RULES {
        let (premises, conclusion) = parse_rule(text).unwrap();
        let rule = to_rnf(&premises, &conclusion, &lim).unwrap();
        group.bench_with_input(BenchmarkId::new("validity", text), &rule, |b, r| {
            b.iter(|| is_valid_rule(r, &lim).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("admissibility", text), &rule, |b, r| {
            b.iter(|| is_admissible(r, &lim).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, normalize, decide);
criterion_main!(benches);
