use confspace::ce::CeEngine;
use confspace::lie::{build_lie_model, Variant};
use confspace::model::PresetSpec;
use confspace::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn betti_tables(c: &mut Criterion) {
    let cases = [
        ("orientable-surface(g=2)", PresetSpec::new("orientable-surface", &[("g", 2)]), 6),
        ("klein-bottle twisted", PresetSpec::new("klein-bottle", &[]), 8),
        ("punctured-torus", PresetSpec::new("punctured-torus", &[]), 8),
        ("orientable-surface(g=3)", PresetSpec::new("orientable-surface", &[("g", 3)]), 8),
    ];
    let mut group = c.benchmark_group("betti_table");
    group.sample_size(10);
    for (label, spec, k_max) in cases {
        let model = spec.build().expect("preset builds");
        let variant = if label.ends_with("twisted") { Variant::TwistedEven } else { Variant::Standard };
        let lm = build_lie_model(&model, variant).expect("lie model");
        let ks: Vec<usize> = (0..=k_max).collect();
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), label), &ks, |b, ks| {
                // A fresh engine per iteration so the slice cache does not hide the work.
                b.iter(|| CeEngine::new(lm.clone()).with_exec(exec).betti_table(ks).expect("fits under the cap"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, betti_tables);
criterion_main!(benches);
