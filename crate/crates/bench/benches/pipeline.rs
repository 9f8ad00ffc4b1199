use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rcdensity::{
    accommodate_document, annotate_document, count_bigrams, document_weights, export_arpa,
    import_arpa, train_kn, ContentWords, FactorConfig, TrainOptions,
};
use rcdensity_bench::synthetic_corpus;

fn language_model(c: &mut Criterion) {
    let docs = synthetic_corpus(1, 8, 25_000, 5_000);
    let counts = count_bigrams(&docs, false);
    let model = train_kn(&counts, &TrainOptions::default()).unwrap();
    let arpa = export_arpa(&model);

    let mut g = c.benchmark_group("language_model");
    g.sample_size(20);
    g.bench_function("count_200k", |b| {
        b.iter(|| count_bigrams(black_box(&docs), false))
    });
    g.bench_function("train_200k", |b| {
        b.iter(|| train_kn(black_box(&counts), &TrainOptions::default()).unwrap())
    });
    g.bench_function("arpa_export", |b| b.iter(|| export_arpa(black_box(&model))));
    g.bench_function("arpa_import", |b| {
        b.iter(|| import_arpa(black_box(&arpa)).unwrap())
    });
    g.finish();
}

fn annotation(c: &mut Criterion) {
    let docs = synthetic_corpus(2, 4, 25_000, 5_000);
    let model = train_kn(&count_bigrams(&docs, false), &TrainOptions::default()).unwrap();
    let doc = &docs[0];
    let content = ContentWords::default();
    let cfg = FactorConfig::default();
    let bare = annotate_document(&model, doc, false);

    let mut g = c.benchmark_group("annotation");
    g.bench_function("surprisal_25k", |b| {
        b.iter(|| annotate_document(&model, black_box(doc), false))
    });
    g.bench_function("weights_25k", |b| {
        b.iter(|| document_weights(black_box(doc), &content, &cfg).unwrap())
    });
    g.bench_function("accommodate_25k", |b| {
        b.iter(|| accommodate_document(black_box(&bare), doc, &content, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, language_model, annotation);
criterion_main!(benches);
