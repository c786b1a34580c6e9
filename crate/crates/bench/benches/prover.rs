use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use s4adm_core::{countermodel, is_theorem, Formula, Limits};

fn theoremhood(c: &mut Criterion) {
    let lim = Limits::default();
    let mut group = c.benchmark_group("is_theorem");
    group.sample_size(30);
    for (name, formula) in s4adm_bench::catalog_formulas() {
        group.bench_with_input(BenchmarkId::from_parameter(&name), &formula, |b, f| {
            b.iter(|| is_theorem(f, &lim).unwrap())
        });
        let dia = Formula::dia(formula.clone());
        group.bench_with_input(BenchmarkId::new("dia", &name), &dia, |b, f| {
            b.iter(|| is_theorem(f, &lim).unwrap())
        });
    }
    group.finish();
}

fn countermodels(c: &mut Criterion) {
    let lim = Limits::default();
    let mut group = c.benchmark_group("countermodel");
    group.sample_size(30);
    for (name, formula) in s4adm_bench::catalog_formulas() {
        if is_theorem(&formula, &lim).unwrap() {
            continue;
        }
        group.bench_with_input(BenchmarkId::from_parameter(&name), &formula, |b, f| {
            b.iter(|| countermodel(f, &lim).unwrap().unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, theoremhood, countermodels);
criterion_main!(benches);
