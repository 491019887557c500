use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use emoji_encoder::embedding::{save_table, train_table};
use emoji_encoder::tabular::ingest_csv_path;
use emoji_encoder::{
    render, AggOp, Aggregation, ChartSpec, EncodingPlan, Lexicon, Model, TimeSeriesParams, TrainConfig,
    UnitChartParams, UnitValue,
};
use emoji_encoder_service::ServeOptions;

#[derive(Parser)]
#[command(
    name = "emoji-encoder",
    version,
    about = "Emoji recommendations and plain-text emoji charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train embeddings on a lexicon's names, keywords and descriptions.
    Train(TrainArgs),
    /// Rank emojis for a phrase.
    Recommend(RecommendArgs),
    /// Render a CSV file as an emoji chart (chart on stdout, legend on stderr).
    Chart(ChartArgs),
    /// Run the local authoring service.
    Serve(ServeArgs),
}

#[derive(clap::Args)]
struct TrainArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    negative: Option<usize>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Frequent-token subsampling threshold (0 disables).
    #[arg(long)]
    subsample: Option<f64>,
}

#[derive(clap::Args)]
struct RecommendArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    text: String,
    #[arg(short, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
}

/// Model files shared by `chart` and `serve`; the shipped assets stand in
/// for anything not given.
#[derive(clap::Args)]
struct ModelArgs {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    palettes: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Template {
    Unit,
    Timeseries,
}

#[derive(clap::Args)]
struct ChartArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, value_enum)]
    template: Template,
    /// Categorical field with one row per value (unit).
    #[arg(long)]
    group_by: Option<String>,
    /// sum, mean or count; defaults to sum for unit charts and mean for time series.
    #[arg(long)]
    agg: Option<AggOp>,
    /// Quantity per glyph, or "auto" (unit).
    #[arg(long)]
    unit: Option<UnitValue>,
    #[arg(long)]
    time_field: Option<String>,
    /// Aggregated field; repeat for stacked series in unit charts.
    #[arg(long)]
    value_field: Vec<String>,
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    palette: Option<String>,
    #[arg(long)]
    labels: bool,
    /// Encoding plan JSON replacing the recommended one.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Row width cap used when the unit is automatic.
    #[arg(long)]
    max_units: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(clap::Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    port: u16,
    #[command(flatten)]
    model: ModelArgs,
    /// Restore sessions from this file at startup and save them on shutdown.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Static authoring UI to serve under /ui.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Model(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Model(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn model_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Model(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Recommend(a) => recommend(a),
        Command::Chart(a) => chart(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(e) | Failure::Data(e) | Failure::Model(e)) = &f;
            eprintln!("error: {}", describe(e));
            ExitCode::from(f.code())
        }
    }
}

/// The error chain joined by ": ", skipping causes whose text an outer
/// message already includes.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn train(a: TrainArgs) -> Outcome {
    let d = TrainConfig::default();
    let config = TrainConfig {
        dimension: a.dim.unwrap_or(d.dimension),
        window: a.window.unwrap_or(d.window),
        negative_samples: a.negative.unwrap_or(d.negative_samples),
        epochs: a.epochs.unwrap_or(d.epochs),
        learning_rate_initial: a.lr.unwrap_or(d.learning_rate_initial),
        min_token_count: a.min_count.unwrap_or(d.min_token_count),
        seed: a.seed.unwrap_or(d.seed),
        subsample_threshold: a.subsample.unwrap_or(d.subsample_threshold),
    };
    config.validate().map_err(|e| Failure::Usage(e.into()))?;
    let lexicon = Lexicon::load(&a.lexicon)
        .with_context(|| format!("loading {}", a.lexicon.display()))
        .map_err(model_err)?;
    let table = train_table(&lexicon, config).map_err(model_err)?;
    save_table(&table, &a.out)
        .with_context(|| format!("writing {}", a.out.display()))
        .map_err(model_err)?;
    println!("vocabulary: {} tokens", table.token_vectors.len());
    println!("emoji coverage: {} of {}", table.emoji_vectors.len(), lexicon.len());
    Ok(())
}

fn load_model(lexicon: Option<&Path>, embeddings: Option<&Path>, palettes: Option<&Path>) -> Result<Model, Failure> {
    Model::load(lexicon, embeddings, palettes)
        .context("loading model")
        .map_err(model_err)
}

fn recommend(a: RecommendArgs) -> Outcome {
    let model = load_model(Some(&a.lexicon), Some(&a.embeddings), None)?;
    let k = usize::try_from(a.k).unwrap_or(usize::MAX);
    let recs = model.recommend(&a.text, k);
    if recs.is_empty() {
        let id = &model.placeholder.placeholder_emoji_id;
        let glyph = model.lexicon.glyph(id).unwrap_or_default();
        println!("no recommendation for {:?}; placeholder {glyph} {id}", a.text);
        return Ok(());
    }
    for r in recs {
        let glyph = model.lexicon.glyph(&r.emoji_id).unwrap_or_default();
        println!("{}\t{glyph}\t{}\t{:.4}", r.rank, r.emoji_id, r.score);
    }
    Ok(())
}

fn required<'a>(value: &'a Option<String>, flag: &str, template: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::Usage(anyhow::anyhow!("--{flag} is required for {template} charts")))
}

fn chart_spec(a: &ChartArgs) -> Result<ChartSpec, Failure> {
    match a.template {
        Template::Unit => {
            let group_by = required(&a.group_by, "group-by", "unit")?.to_string();
            let op = a.agg.unwrap_or(AggOp::Sum);
            let series = if a.value_field.is_empty() {
                if op != AggOp::Count {
                    return Err(Failure::Usage(anyhow::anyhow!(
                        "--value-field is required unless --agg count"
                    )));
                }
                vec![Aggregation::new(op, &group_by)]
            } else {
                a.value_field.iter().map(|f| Aggregation::new(op, f)).collect()
            };
            Ok(ChartSpec::UnitChart(UnitChartParams {
                group_by,
                series,
                unit_value: a.unit.unwrap_or_default(),
                max_units_per_row: a.max_units.unwrap_or(20),
            }))
        }
        Template::Timeseries => {
            let time_field = required(&a.time_field, "time-field", "timeseries")?.to_string();
            let value_field = match a.value_field.as_slice() {
                [one] => one.clone(),
                [] => {
                    return Err(Failure::Usage(anyhow::anyhow!(
                        "--value-field is required for timeseries charts"
                    )))
                }
                _ => {
                    return Err(Failure::Usage(anyhow::anyhow!(
                        "timeseries charts take a single --value-field"
                    )))
                }
            };
            let window = a
                .window
                .ok_or_else(|| Failure::Usage(anyhow::anyhow!("--window is required for timeseries charts")))?;
            Ok(ChartSpec::TimeSeries(TimeSeriesParams {
                time_field,
                value_field,
                window,
                palette: a.palette.clone(),
                aggregation: a.agg.unwrap_or(AggOp::Mean),
            }))
        }
    }
}

fn chart(a: ChartArgs) -> Outcome {
    let spec = chart_spec(&a)?;
    let ds = ingest_csv_path(&a.csv)
        .with_context(|| format!("reading {}", a.csv.display()))
        .map_err(data)?;
    let model = load_model(
        a.model.lexicon.as_deref(),
        a.model.embeddings.as_deref(),
        a.model.palettes.as_deref(),
    )?;
    let mut plan = match &a.plan {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(data)?;
            let plan: EncodingPlan = serde_json::from_str(&text)
                .with_context(|| format!("parsing plan {}", path.display()))
                .map_err(data)?;
            plan.validate(&ds, &model.lexicon, &model.palettes)
                .context("invalid plan")
                .map_err(data)?;
            plan
        }
        None => model.auto_plan(&ds),
    };
    if a.labels {
        plan.show_labels = true;
    }
    spec.validate(&ds, &model.palettes).map_err(data)?;
    let chart = render(&ds, &plan, &spec, &model.context()).map_err(data)?;
    print!("{}", chart.text);
    for entry in &chart.legend {
        eprintln!("{} {}", entry.glyph, entry.meaning);
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Outcome {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let model = load_model(
        a.model.lexicon.as_deref(),
        a.model.embeddings.as_deref(),
        a.model.palettes.as_deref(),
    )?;
    let opts = ServeOptions {
        port: a.port,
        snapshot: a.snapshot,
        ui_dir: a.ui_dir,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(data)?;
    runtime
        .block_on(emoji_encoder_service::serve(model, opts))
        .context("service failed")
        .map_err(data)
}
