//! Command definitions and dispatch for the `dtl` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtl_core::evaluation::{
    self, DatasetKind, RiskGenerator, SmoothTarget,
};
use dtl_core::{fit, FitConfig, LossKind};

use crate::io::manifest::RunManifest;
use crate::io::{dataset, mesh, model};

/// Delaunay triangulation learner: fitting, prediction, dataset
/// generation, mesh export and the experiment suite.
#[derive(Debug, Parser)]
#[command(name = "dtl", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model to a CSV dataset and save it as JSON.
    Fit(FitArgs),
    /// Evaluate a saved model at query points.
    Predict(PredictArgs),
    /// Generate a synthetic dataset.
    Generate(GenerateArgs),
    /// Export the fitted surface mesh of a saved model.
    ExportMesh(ExportMeshArgs),
    /// Run one experiment from the verification suite.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LossArg {
    Squared,
    Absolute,
    Exponential,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Squared => LossKind::SquaredError,
            LossArg::Absolute => LossKind::AbsoluteError,
            LossArg::Exponential => LossKind::ExponentialMargin,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Training dataset (CSV with columns x1..xp, y).
    #[arg(long)]
    data: PathBuf,
    /// Regularization strength.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Loss at the training points.
    #[arg(long, value_enum, default_value = "squared")]
    loss: LossArg,
    /// Adam step size.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Convergence threshold on the parameter step norm
    /// (default: 1e-6 times the response norm).
    #[arg(long)]
    eta: Option<f64>,
    /// Iteration budget.
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Recorded in the output for reproducibility; the fit itself is
    /// deterministic. Adam runs with beta1 = 0.9, beta2 = 0.999,
    /// epsilon = 1e-8.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model path (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Saved model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Query points (CSV with columns x1..xp; a y column is ignored).
    #[arg(long)]
    queries: PathBuf,
    /// Output predictions path (CSV).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Saddle,
    Arctan,
    Linear,
    Moons,
    Circles,
}

impl From<KindArg> for DatasetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Saddle => DatasetKind::Saddle,
            KindArg::Arctan => DatasetKind::ArcTan,
            KindArg::Linear => DatasetKind::LinearPlane,
            KindArg::Moons => DatasetKind::Moons,
            KindArg::Circles => DatasetKind::Circles,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator name.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of points.
    #[arg(long)]
    n: usize,
    /// Response noise (regression) or coordinate jitter (classification)
    /// standard deviation.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset path (CSV).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshFormat {
    Off,
    Json,
}

#[derive(Debug, Args)]
struct ExportMeshArgs {
    /// Saved model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Output mesh path.
    #[arg(long)]
    out: PathBuf,
    /// OFF (feature dimension 1 or 2) or JSON (any dimension).
    #[arg(long, value_enum, default_value = "off")]
    format: MeshFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentName {
    /// Pointwise geometric-loss comparison against random triangulations.
    Optimality,
    /// Covering-edge-length decay rate across sample sizes.
    Scaling,
    /// Held-out regression error against the true function.
    Consistency,
    /// Classification risk against the Bayes bound.
    Risk,
    /// Convergence of the interpolant gradient.
    Adaptivity,
    /// L2 interpolation error decay for smooth noiseless targets.
    Interperror,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RiskKindArg {
    Moons,
    Circles,
    Coinflip,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Quadratic,
    Affine,
    Saddle,
}

impl From<TargetArg> for SmoothTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Quadratic => SmoothTarget::QuadraticBowl,
            TargetArg::Affine => SmoothTarget::Affine,
            TargetArg::Saddle => SmoothTarget::Saddle,
        }
    }
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Which experiment to run.
    #[arg(long, value_enum)]
    name: ExperimentName,
    /// Feature dimension (optimality, scaling).
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Training size (optimality, risk).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Query count per condition (optimality, scaling).
    #[arg(long, default_value_t = 500)]
    queries: usize,
    /// Number of alternative triangulations (optimality).
    #[arg(long, default_value_t = 20)]
    alternatives: usize,
    /// Comma-separated sample sizes (scaling, consistency, adaptivity,
    /// interperror).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Dataset generator (consistency, adaptivity).
    #[arg(long, value_enum, default_value = "saddle")]
    kind: KindArg,
    /// Smooth target (interperror).
    #[arg(long, value_enum, default_value = "quadratic")]
    target: TargetArg,
    /// Risk generator shape (risk).
    #[arg(long, value_enum, default_value = "moons")]
    generator: RiskKindArg,
    /// Label flip probability (risk).
    #[arg(long, default_value_t = 0.1)]
    flip: f64,
    /// Held-out test points (risk).
    #[arg(long, default_value_t = 2000)]
    n_test: usize,
    /// Response noise passed to the generator (consistency).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Loss for fitted models (consistency).
    #[arg(long, value_enum, default_value = "squared")]
    loss: LossArg,
    /// Regularization strength for fitted models (consistency, risk).
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output report path (JSON); a CSV summary is written beside it.
    #[arg(long)]
    out: PathBuf,
}

/// Runs the tool; returns the process exit code. Usage errors exit 1,
/// data and model errors exit 2.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> crate::io::Result<()> {
    match command {
        Command::Fit(args) => run_fit(args),
        Command::Predict(args) => run_predict(args),
        Command::Generate(args) => run_generate(args),
        Command::ExportMesh(args) => run_export_mesh(args),
        Command::Experiment(args) => run_experiment(args),
    }
}

fn run_fit(args: FitArgs) -> crate::io::Result<()> {
    let (points, responses) = dataset::read_dataset(&args.data)?;
    let config = FitConfig {
        lambda: args.lambda,
        loss: args.loss.into(),
        step_size: args.step,
        eta: args.eta,
        max_iters: args.max_iters,
        seed: args.seed,
        ..FitConfig::default()
    };
    let (model, state) = fit(&points, &responses, &config)?;
    model::save_model(&args.out, &model)?;
    RunManifest::new("fit")
        .arg("data", args.data.display())
        .arg("lambda", args.lambda)
        .arg("loss", model::loss_to_str(model.loss()))
        .arg("step", args.step)
        .arg("eta", args.eta.map_or_else(|| "auto".into(), |e| e.to_string()))
        .arg("max_iters", args.max_iters)
        .arg("seed", args.seed)
        .arg("iterations_run", state.t)
        .arg("out", args.out.display())
        .write_beside(&args.out)?;
    Ok(())
}

fn run_predict(args: PredictArgs) -> crate::io::Result<()> {
    let model = model::load_model(&args.model)?;
    let queries = dataset::read_queries(&args.queries)?;
    let values = model.predict(&queries)?;
    dataset::write_predictions(&args.out, &queries, &values)?;
    RunManifest::new("predict")
        .arg("model", args.model.display())
        .arg("queries", args.queries.display())
        .arg("out", args.out.display())
        .write_beside(&args.out)?;
    Ok(())
}

fn run_generate(args: GenerateArgs) -> crate::io::Result<()> {
    let kind: DatasetKind = args.kind.into();
    let (points, responses) = evaluation::generate_dataset(kind, args.n, args.noise, args.seed)?;
    dataset::write_dataset(&args.out, &points, &responses)?;
    RunManifest::new("generate")
        .arg("kind", format!("{:?}", kind))
        .arg("n", args.n)
        .arg("noise", args.noise)
        .arg("seed", args.seed)
        .arg("out", args.out.display())
        .write_beside(&args.out)?;
    Ok(())
}

fn run_export_mesh(args: ExportMeshArgs) -> crate::io::Result<()> {
    let model = model::load_model(&args.model)?;
    match args.format {
        MeshFormat::Off => mesh::write_surface_off(&args.out, &model)?,
        MeshFormat::Json => mesh::write_surface_json(&args.out, &model)?,
    }
    RunManifest::new("export-mesh")
        .arg("model", args.model.display())
        .arg("format", format!("{:?}", args.format).to_lowercase())
        .arg("out", args.out.display())
        .write_beside(&args.out)?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> crate::io::Result<()> {
    let json = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, json + "\n").map_err(|e| crate::io::io_err(path, e))
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> crate::io::Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| crate::io::io_err(path, e))
}

fn csv_path(json_path: &Path) -> PathBuf {
    json_path.with_extension("csv")
}

fn run_experiment(args: ExperimentArgs) -> crate::io::Result<()> {
    let sizes_or = |default: &[usize]| -> Vec<usize> {
        args.sizes.clone().unwrap_or_else(|| default.to_vec())
    };
    let csv = csv_path(&args.out);
    let mut manifest = RunManifest::new("experiment")
        .arg("name", format!("{:?}", args.name).to_lowercase())
        .arg("seed", args.seed)
        .arg("out", args.out.display());
    match args.name {
        ExperimentName::Optimality => {
            let report = evaluation::optimality_experiment(
                args.n,
                args.p,
                args.queries,
                args.alternatives,
                args.seed,
            )?;
            write_json(&args.out, &report)?;
            let rows: Vec<String> = report
                .mean_loss_alternatives
                .iter()
                .enumerate()
                .map(|(i, alt)| format!("{i},{},{alt}", report.mean_loss_delaunay))
                .collect();
            write_csv(&csv, "alternative,mean_loss_delaunay,mean_loss_alternative", &rows)?;
            manifest = manifest
                .arg("p", args.p)
                .arg("n", args.n)
                .arg("queries", args.queries)
                .arg("alternatives", args.alternatives);
        }
        ExperimentName::Scaling => {
            let sizes = sizes_or(&[100, 400, 1600, 6400]);
            let report =
                evaluation::scaling_experiment(args.p, &sizes, args.queries, args.seed)?;
            write_json(&args.out, &report)?;
            let rows: Vec<String> = report
                .sample_sizes
                .iter()
                .zip(&report.mean_t)
                .map(|(n, t)| format!("{n},{t},{}", report.fitted_slope))
                .collect();
            write_csv(&csv, "n,mean_t,fitted_slope", &rows)?;
            manifest = manifest
                .arg("p", args.p)
                .arg("sizes", join(&sizes))
                .arg("queries", args.queries);
        }
        ExperimentName::Consistency => {
            let sizes = sizes_or(&[50, 200, 800]);
            let report = evaluation::consistency_experiment(
                args.kind.into(),
                args.noise,
                args.loss.into(),
                args.lambda,
                &sizes,
                args.seed,
            )?;
            write_json(&args.out, &report)?;
            let rows: Vec<String> = report
                .sample_sizes
                .iter()
                .zip(&report.test_mse)
                .map(|(n, mse)| format!("{n},{mse}"))
                .collect();
            write_csv(&csv, "n,test_mse", &rows)?;
            manifest = manifest
                .arg("kind", format!("{:?}", DatasetKind::from(args.kind)))
                .arg("noise", args.noise)
                .arg("lambda", args.lambda)
                .arg("sizes", join(&sizes));
        }
        ExperimentName::Risk => {
            let generator = match args.generator {
                RiskKindArg::Moons => RiskGenerator::MoonsFlip { flip: args.flip },
                RiskKindArg::Circles => RiskGenerator::CirclesFlip { flip: args.flip },
                RiskKindArg::Coinflip => RiskGenerator::ConstantHalf,
            };
            let report = evaluation::classification_risk_experiment(
                generator,
                args.n,
                args.n_test,
                args.lambda,
                args.seed,
            )?;
            write_json(&args.out, &report)?;
            let row = format!(
                "{},{},{},{},{},{},{}",
                report.n,
                report.n_test,
                report.lambda,
                report.report.bayes_risk,
                report.report.bound,
                report.report.empirical_dtl_risk,
                report.empirical_1nn_risk
            );
            write_csv(
                &csv,
                "n,n_test,lambda,bayes_risk,bound,empirical_dtl_risk,empirical_1nn_risk",
                &[row],
            )?;
            manifest = manifest
                .arg("generator", format!("{:?}", args.generator).to_lowercase())
                .arg("flip", args.flip)
                .arg("n", args.n)
                .arg("n_test", args.n_test)
                .arg("lambda", args.lambda);
        }
        ExperimentName::Adaptivity => {
            let sizes = sizes_or(&[100, 400, 1600]);
            let report = evaluation::local_adaptivity_experiment(
                args.kind.into(),
                &sizes,
                args.seed,
            )?;
            write_json(&args.out, &report)?;
            let rows: Vec<String> = report
                .sample_sizes
                .iter()
                .zip(&report.mean_gradient_error)
                .map(|(n, e)| format!("{n},{e}"))
                .collect();
            write_csv(&csv, "n,mean_gradient_error", &rows)?;
            manifest = manifest
                .arg("kind", format!("{:?}", DatasetKind::from(args.kind)))
                .arg("sizes", join(&sizes));
        }
        ExperimentName::Interperror => {
            let sizes = sizes_or(&[100, 400, 1600]);
            let report = evaluation::interpolation_error_experiment(
                args.target.into(),
                &sizes,
                args.seed,
            )?;
            write_json(&args.out, &report)?;
            let rows: Vec<String> = report
                .sample_sizes
                .iter()
                .zip(&report.l2_error)
                .map(|(n, e)| format!("{n},{e}"))
                .collect();
            write_csv(&csv, "n,l2_error", &rows)?;
            manifest = manifest
                .arg("target", format!("{:?}", SmoothTarget::from(args.target)))
                .arg("sizes", join(&sizes));
        }
    }
    manifest.write_beside(&args.out)?;
    Ok(())
}

fn join(sizes: &[usize]) -> String {
    sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}
