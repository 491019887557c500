use std::hint::black_box;

use criterion::{BenchmarkId, Criterion, Throughput};
use emoji_encoder::embedding::{build_corpus, train};
use emoji_encoder::model::{builtin_lexicon, BUILTIN_LEXICON};
use emoji_encoder::tabular::ingest_csv;
use emoji_encoder::{render, ChartSpec, Lexicon, Model, TrainConfig};
use emoji_encoder_bench::{grouped_csv, yearly_csv};

fn lexicon(c: &mut Criterion) {
    let mut group = c.benchmark_group("lexicon");
    group.throughput(Throughput::Bytes(BUILTIN_LEXICON.len() as u64));
    group.bench_function("parse", |b| {
        b.iter(|| Lexicon::parse(black_box(BUILTIN_LEXICON), "bench").unwrap())
    });
    let lex = builtin_lexicon();
    group.bench_function("search", |b| b.iter(|| lex.search(black_box("wat"), 20).unwrap().len()));
    group.finish();
}

fn training(c: &mut Criterion) {
    let corpus = build_corpus(&builtin_lexicon());
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    for dim in [16, 64] {
        let config = TrainConfig {
            dimension: dim,
            epochs: 5,
            ..TrainConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("builtin_5_epochs", dim), &config, |b, config| {
            b.iter(|| train(black_box(&corpus), config).unwrap())
        });
    }
    group.finish();
}

fn recommending(c: &mut Criterion) {
    let model = Model::builtin().unwrap();
    let mut group = c.benchmark_group("recommend");
    for text in ["water", "number of remote workers"] {
        group.bench_with_input(BenchmarkId::new("top10", text), text, |b, text| {
            b.iter(|| model.recommend(black_box(text), 10))
        });
    }
    group.bench_function("full_ranking", |b| b.iter(|| model.ranking(black_box("fire"))));
    group.finish();
}

fn charts(c: &mut Criterion) {
    let model = Model::builtin().unwrap();
    let mut group = c.benchmark_group("chart");

    let yearly = yearly_csv(1000);
    group.throughput(Throughput::Bytes(yearly.len() as u64));
    group.bench_function("ingest_1000_rows", |b| {
        b.iter(|| ingest_csv(black_box(&yearly)).unwrap())
    });

    let ds = ingest_csv(&yearly).unwrap();
    let plan = model.auto_plan(&ds);
    let spec: ChartSpec = serde_json::from_str(
        r#"{"template":"time_series","time_field":"year","value_field":"temperature anomaly","window":10}"#,
    )
    .unwrap();
    group.bench_function("time_series_1000_rows", |b| {
        b.iter(|| render(&ds, &plan, black_box(&spec), &model.context()).unwrap())
    });

    let grouped = grouped_csv(12, 5000);
    let ds = ingest_csv(&grouped).unwrap();
    let plan = model.auto_plan(&ds);
    let spec: ChartSpec = serde_json::from_str(
        r#"{"template":"unit_chart","group_by":"team",
            "series":[{"op":"sum","field":"number of remote workers"},{"op":"sum","field":"number of office workers"}]}"#,
    )
    .unwrap();
    group.bench_function("unit_chart_5000_rows", |b| {
        b.iter(|| render(&ds, &plan, black_box(&spec), &model.context()).unwrap())
    });
    group.bench_function("auto_plan_5000_rows", |b| b.iter(|| model.auto_plan(black_box(&ds))));
    group.finish();
}

criterion::criterion_group!(benches, lexicon, training, recommending, charts);
criterion::criterion_main!(benches);
