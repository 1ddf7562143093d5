use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use concernmap_core::bayes::{train, train_and_select, TrainingOptions};
use concernmap_core::deps::extract_deps;
use concernmap_core::recover::{recover, RecoverOptions, RecoveryCache, RecoveryConfig};
use concernmap_core::synthetic::{source_files, training_corpus, SourceSpec, TrainingSpec};
use concernmap_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn classification(c: &mut Criterion) {
    let model = train(&training_corpus(&TrainingSpec::overlapping(1)), 1.0).unwrap();
    let mut group = c.benchmark_group("recover");
    group.sample_size(10);
    for sloc in [20_000u64, 100_000] {
        let files = source_files(&SourceSpec::with_sloc(sloc, 7));
        let actual: u64 = files.iter().map(|f| f.entity.physical_sloc).sum();
        group.throughput(Throughput::Elements(actual));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, sloc), &files, |b, files| {
                b.iter(|| {
                    recover(
                        files,
                        &model,
                        &mut RecoveryCache::new(),
                        &RecoveryConfig::default(),
                        &RecoverOptions { audit: false, exec },
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn selection(c: &mut Criterion) {
    let corpus = training_corpus(&TrainingSpec::overlapping(1));
    let mut group = c.benchmark_group("train_and_select");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| train_and_select(&corpus, &TrainingOptions::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn dependencies(c: &mut Criterion) {
    let files = source_files(&SourceSpec::with_sloc(100_000, 7));
    let mut group = c.benchmark_group("extract_deps");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| extract_deps(&files, exec)));
    }
    group.finish();
}

criterion_group!(benches, classification, selection, dependencies);
criterion_main!(benches);
