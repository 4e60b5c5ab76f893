//! Command-line interface: argument definitions and subcommand handlers.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use synmix_core::annotations::{class_distribution, merge_riders, RiderFallback};
use synmix_core::metrics::{evaluate, EvaluateOptions, Interpolation};
use synmix_core::mixing::build_plan;
use synmix_core::scaling::{
    aggregate_runs, baseline_error, compare_strategies, error_points, fit_power_law,
    savings_table, AggregatedPoint, ScalingError,
};
use synmix_core::simulate::generate_runs;
use synmix_core::{PowerLawFit, RunRecord};

use crate::error::{CliError, Result};
use crate::formats::{cityscapes, manifest, plan, predictions, records, simconfig};
use crate::report::{self, OutputFormat};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of every file schema this binary reads or writes.
pub const FORMAT_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Parser)]
#[command(
    name = "synmix",
    version = concat!(env!("CARGO_PKG_VERSION"), " (file formats v1)"),
    about = "Plan mixed real/synthetic detection datasets, evaluate predictions, \
             and estimate how much real data synthetic data saves",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Seed for any randomized subcommand (required there; no hidden entropy).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for outputs with derived file names.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    /// Report format for tabular outputs.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// IoU threshold for detection matching.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub iou_threshold: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert Cityscapes-style polygon annotation files into a manifest.
    Ingest(IngestArgs),
    /// Fuse rider instances with their nearest rideable object.
    MergeRiders(MergeRidersArgs),
    /// Per-category instance totals and averages per image.
    ClassStats(ClassStatsArgs),
    /// Plan log-spaced mixed subsets and draw their image ids.
    PlanMix(PlanMixArgs),
    /// Compute per-category AP and mAP from a prediction file.
    Evaluate(EvaluateArgs),
    /// Fit error-vs-size power laws to run records.
    Fit(FitArgs),
    /// Total/real images needed to match the real-only baseline, per ratio.
    Savings(SavingsArgs),
    /// Welch two-sample test between two groups of metric values.
    Compare(CompareArgs),
    /// Generate synthetic run records from known power-law parameters.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Annotation file or directory of *.json files.
    #[arg(long)]
    pub input: PathBuf,
    /// Manifest name.
    #[arg(long)]
    pub name: String,
    /// Source domain of the images: real or synthetic.
    #[arg(long)]
    pub domain: String,
    /// Ordered category set; labels outside it are skipped. Defaults to all
    /// labels found, sorted.
    #[arg(long, value_delimiter = ',')]
    pub categories: Option<Vec<String>>,
    /// Output manifest path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeRidersArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Category to merge away.
    #[arg(long, default_value = "rider")]
    pub rider: String,
    /// Categories a rider can be fused with.
    #[arg(long, value_delimiter = ',', default_value = "bicycle,motorcycle")]
    pub rideables: Vec<String>,
    /// Relabel riders without a rideable candidate to this category instead
    /// of dropping them.
    #[arg(long)]
    pub keep_as: Option<String>,
    /// Output manifest path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassStatsArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanMixArgs {
    /// Real-domain manifest (the pool for real draws).
    #[arg(long)]
    pub real: PathBuf,
    /// Synthetic-domain manifest.
    #[arg(long)]
    pub synthetic: PathBuf,
    /// Real-data fraction of every subset.
    #[arg(long)]
    pub ratio: f64,
    /// Number of subset sizes.
    #[arg(long, default_value_t = 10)]
    pub points: u32,
    /// Decades the size ladder spans below its maximum.
    #[arg(long, default_value_t = 1.0)]
    pub decades: f64,
    /// Largest subset size; defaults to the real pool size.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Output path; defaults to mix_plan_r<ratio>_seed<seed>.json in the
    /// output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth manifest.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Prediction file (JSON array of detections).
    #[arg(long)]
    pub predictions: PathBuf,
    /// AP interpolation variant.
    #[arg(long, value_enum, default_value = "all-point")]
    pub interpolation: InterpolationArg,
    /// Also dump PR-curve points as CSV to this path.
    #[arg(long)]
    pub pr_curves: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InterpolationArg {
    AllPoint,
    ElevenPoint,
}

impl From<InterpolationArg> for Interpolation {
    fn from(arg: InterpolationArg) -> Self {
        match arg {
            InterpolationArg::AllPoint => Interpolation::AllPoint,
            InterpolationArg::ElevenPoint => Interpolation::ElevenPoint,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Run-records CSV.
    #[arg(long)]
    pub runs: PathBuf,
    /// Metrics to fit; defaults to every metric present.
    #[arg(long, value_delimiter = ',')]
    pub metric: Option<Vec<String>>,
    /// Error substituted when a mean metric reaches 1.0 exactly.
    #[arg(long, default_value_t = 1e-6)]
    pub error_floor: f64,
    /// Fit through every repeat instead of per-size means.
    #[arg(long)]
    pub raw_repeats: bool,
    /// Also write observed points and sampled fit lines to this path.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Output path; defaults to fits.csv in the output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SavingsArgs {
    /// Run-records CSV.
    #[arg(long)]
    pub runs: PathBuf,
    /// Metric the table is computed for.
    #[arg(long, default_value = "map50")]
    pub metric: String,
    /// Ratio whose largest size provides the baseline.
    #[arg(long, default_value_t = 1.0)]
    pub baseline_ratio: f64,
    /// Error substituted when a mean metric reaches 1.0 exactly.
    #[arg(long, default_value_t = 1e-6)]
    pub error_floor: f64,
    /// Fit through every repeat instead of per-size means.
    #[arg(long)]
    pub raw_repeats: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// File with group A metric values, one per line.
    #[arg(long)]
    pub group_a: PathBuf,
    /// File with group B metric values, one per line.
    #[arg(long)]
    pub group_b: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "a")]
    pub label_a: String,
    #[arg(long, default_value = "b")]
    pub label_b: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output path; defaults to runs.csv in the output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Run the parsed CLI; errors map to exit codes in `main`.
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::MergeRiders(args) => cmd_merge_riders(args),
        Command::ClassStats(args) => cmd_class_stats(&cli, args),
        Command::PlanMix(args) => cmd_plan_mix(&cli, args),
        Command::Evaluate(args) => cmd_evaluate(&cli, args),
        Command::Fit(args) => cmd_fit(&cli, args),
        Command::Savings(args) => cmd_savings(&cli, args),
        Command::Compare(args) => cmd_compare(args),
        Command::Simulate(args) => cmd_simulate(&cli, args),
    }
}

fn require_seed(cli: &Cli, subcommand: &str) -> Result<u64> {
    cli.seed.ok_or_else(|| {
        CliError::usage(format!(
            "--seed is required for '{subcommand}': randomized outputs must be reproducible"
        ))
    })
}

fn write_or_stdout(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::io(path, &e)),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let domain = manifest::parse_domain(&args.domain)?;
    let files = cityscapes::collect_input_files(&args.input)?;
    let (converted, stats) =
        cityscapes::convert(&files, &args.name, domain, args.categories.clone())?;
    manifest::write_manifest(&args.output, &converted)?;
    eprintln!(
        "ingested {} images, {} instances ({} foreign labels skipped, {} degenerate polygons skipped) -> {}",
        stats.images,
        stats.instances,
        stats.skipped_labels,
        stats.skipped_degenerate,
        args.output.display()
    );
    Ok(())
}

fn cmd_merge_riders(args: &MergeRidersArgs) -> Result<()> {
    let input = manifest::read_manifest(&args.manifest)?;
    let rideables: Vec<&str> = args.rideables.iter().map(String::as_str).collect();
    let fallback = match &args.keep_as {
        Some(category) => RiderFallback::ReassignTo(category.clone()),
        None => RiderFallback::Drop,
    };
    let outcome = merge_riders(&input, &args.rider, &rideables, fallback)
        .map_err(|e| CliError::validation(e.to_string()))?;
    manifest::write_manifest(&args.output, &outcome.manifest)?;
    eprintln!(
        "merged {} riders, dropped {}, reassigned {} -> {}",
        outcome.merged(),
        outcome.dropped,
        outcome.reassigned,
        args.output.display()
    );
    Ok(())
}

fn cmd_class_stats(cli: &Cli, args: &ClassStatsArgs) -> Result<()> {
    let m = manifest::read_manifest(&args.manifest)?;
    let dist = class_distribution(&m).map_err(|e| CliError::validation(e.to_string()))?;
    let rendered = match cli.format {
        OutputFormat::Csv => report::class_stats_csv(&dist),
        OutputFormat::Markdown => report::class_stats_markdown(&dist),
    };
    write_or_stdout(args.output.as_deref(), &rendered)
}

fn cmd_plan_mix(cli: &Cli, args: &PlanMixArgs) -> Result<()> {
    let seed = require_seed(cli, "plan-mix")?;
    if !(0.0..=1.0).contains(&args.ratio) || args.ratio.is_nan() {
        return Err(CliError::validation(format!(
            "--ratio must be in [0, 1], got {}",
            args.ratio
        )));
    }
    let real = manifest::read_manifest(&args.real)?;
    let synthetic = manifest::read_manifest(&args.synthetic)?;
    let planned = build_plan(
        &real,
        &synthetic,
        args.ratio,
        seed,
        args.points,
        args.decades,
        args.n_max,
    )
    .map_err(|e| CliError::validation(e.to_string()))?;
    let output = args.output.clone().unwrap_or_else(|| {
        cli.output_dir
            .join(format!("mix_plan_r{}_seed{}.json", args.ratio, seed))
    });
    plan::write_plan(&output, &planned)?;
    eprintln!(
        "planned {} sizes from {} to {} at ratio {} -> {}",
        planned.plan.sizes.len(),
        planned.plan.sizes.first().map_or(0, |s| s.n_total),
        planned.plan.sizes.last().map_or(0, |s| s.n_total),
        args.ratio,
        output.display()
    );
    Ok(())
}

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<()> {
    let m = manifest::read_manifest(&args.manifest)?;
    let dets = predictions::read_predictions(&args.predictions)?;
    let options = EvaluateOptions {
        iou_threshold: cli.iou_threshold,
        interpolation: args.interpolation.into(),
    };
    let result = evaluate(&dets, &m, &options).map_err(|e| CliError::validation(e.to_string()))?;
    if let Some(path) = &args.pr_curves {
        std::fs::write(path, report::pr_curves_csv(&result))
            .map_err(|e| CliError::io(path, &e))?;
    }
    let rendered = match cli.format {
        OutputFormat::Csv => report::evaluation_csv(&result),
        OutputFormat::Markdown => report::evaluation_markdown(&result),
    };
    write_or_stdout(args.output.as_deref(), &rendered)
}

/// Fit inputs for one (ratio, metric): per-size means by default, every
/// repeat when `raw_repeats` is set.
fn fit_inputs(
    records: &[RunRecord],
    aggregates: &[AggregatedPoint],
    ratio: f64,
    metric: &str,
    error_floor: f64,
    raw_repeats: bool,
) -> (Vec<(u64, f64)>, usize) {
    if raw_repeats {
        let mut floored = 0usize;
        let points = records
            .iter()
            .filter(|r| r.metric == metric && r.ratio.total_cmp(&ratio).is_eq())
            .map(|r| {
                let mut error = 1.0 - r.value;
                if error <= 0.0 {
                    error = error_floor;
                    floored += 1;
                }
                (r.n_total, error)
            })
            .collect();
        (points, floored)
    } else {
        let pts = error_points(aggregates, ratio, metric, error_floor);
        (pts.points, pts.floored)
    }
}

fn distinct_sorted<T: PartialOrd + Copy>(mut values: Vec<T>) -> Vec<T> {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN keys"));
    values.dedup_by(|a, b| a == b);
    values
}

fn cmd_fit(cli: &Cli, args: &FitArgs) -> Result<()> {
    let records = records::read_records(&args.runs)?;
    let aggregates =
        aggregate_runs(&records).map_err(|e| CliError::validation(e.to_string()))?;

    let metrics: Vec<String> = match &args.metric {
        Some(list) => list.clone(),
        None => {
            let mut names: Vec<String> =
                records.iter().map(|r| r.metric.clone()).collect();
            names.sort();
            names.dedup();
            names
        }
    };

    let mut fits: Vec<PowerLawFit> = Vec::new();
    let mut floored_total = 0usize;
    for metric in &metrics {
        let ratios = distinct_sorted(
            records
                .iter()
                .filter(|r| &r.metric == metric)
                .map(|r| r.ratio)
                .collect(),
        );
        if ratios.is_empty() {
            return Err(CliError::validation(format!(
                "no records for metric '{metric}'"
            )));
        }
        for ratio in ratios {
            let (points, floored) = fit_inputs(
                &records,
                &aggregates,
                ratio,
                metric,
                args.error_floor,
                args.raw_repeats,
            );
            floored_total += floored;
            let fit = fit_power_law(&points, ratio, metric)
                .map_err(|e| CliError::validation(format!("ratio {ratio}, {metric}: {e}")))?;
            fits.push(fit);
        }
    }
    if floored_total > 0 {
        eprintln!(
            "warning: {floored_total} point(s) hit the error floor {}; \
             their metric means reached 1.0",
            args.error_floor
        );
    }

    if let Some(path) = &args.plot_data {
        std::fs::write(path, report::plot_data_csv(&aggregates, &fits))
            .map_err(|e| CliError::io(path, &e))?;
    }
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("fits.csv"));
    std::fs::write(&output, report::fits_csv(&fits)).map_err(|e| CliError::io(&output, &e))?;
    eprintln!("fitted {} curve(s) -> {}", fits.len(), output.display());
    Ok(())
}

fn cmd_savings(cli: &Cli, args: &SavingsArgs) -> Result<()> {
    let records = records::read_records(&args.runs)?;
    let aggregates =
        aggregate_runs(&records).map_err(|e| CliError::validation(e.to_string()))?;
    let baseline = baseline_error(&records, &args.metric, args.baseline_ratio)
        .map_err(|e| CliError::validation(e.to_string()))?;

    let ratios = distinct_sorted(
        records
            .iter()
            .filter(|r| r.metric == args.metric)
            .map(|r| r.ratio)
            .collect(),
    );
    let mut fits = Vec::new();
    for ratio in ratios {
        if ratio.total_cmp(&args.baseline_ratio).is_eq() {
            continue;
        }
        let (points, floored) = fit_inputs(
            &records,
            &aggregates,
            ratio,
            &args.metric,
            args.error_floor,
            args.raw_repeats,
        );
        if floored > 0 {
            eprintln!(
                "warning: ratio {ratio}: {floored} point(s) hit the error floor {}",
                args.error_floor
            );
        }
        let fit = fit_power_law(&points, ratio, &args.metric)
            .map_err(|e| CliError::validation(format!("ratio {ratio}: {e}")))?;
        fits.push(fit);
    }

    let rows = savings_table(&fits, &baseline, args.baseline_ratio);
    eprintln!("{}", report::savings_summary(&baseline, &args.metric));
    let rendered = match cli.format {
        OutputFormat::Csv => report::savings_csv(&rows),
        OutputFormat::Markdown => report::savings_markdown(&rows),
    };
    write_or_stdout(args.output.as_deref(), &rendered)
}

fn read_value_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, &e))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| {
            CliError::validation(format!(
                "{}: line {}: expected one number per line, got '{line}'",
                path.display(),
                idx + 1
            ))
        })?;
        values.push(value);
    }
    Ok(values)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let a = read_value_file(&args.group_a)?;
    let b = read_value_file(&args.group_b)?;
    let cmp = compare_strategies(&a, &b, args.alpha).map_err(|e| match e {
        ScalingError::GroupTooSmall(_) | ScalingError::BadAlpha(_) => {
            CliError::validation(e.to_string())
        }
        other => CliError::validation(other.to_string()),
    })?;
    print!(
        "{}",
        report::comparison_text(&cmp, &args.label_a, &args.label_b)
    );
    Ok(())
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    let seed = require_seed(cli, "simulate")?;
    let spec = simconfig::read_sim_config(&args.config, seed)?;
    let runs = generate_runs(&spec).map_err(|e| CliError::validation(e.to_string()))?;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("runs.csv"));
    records::write_records(&output, &runs)?;
    eprintln!(
        "simulated {} records ({} ratios x {} sizes x {} repeats) -> {}",
        runs.len(),
        spec.curves.len(),
        spec.sizes.len(),
        spec.repeats,
        output.display()
    );
    Ok(())
}
