//! Command-line front end: `generate`, `run` and `eval`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 input/output or format
//! error, 4 violated solver constraint (negative data, invalid affinity).

mod config;

pub use config::ConfigFile;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cluster::{build_assignment, centroids, labels_from_factor, Orientation};
use crate::datasets::{make_blobs, make_circles, BlobCenters, BlobsConfig, LabeledDataset};
use crate::error::{Error, Result};
use crate::io::{load_labels, load_matrix, save_labels, save_matrix, save_metadata};
use crate::kernels::{kernel_matrix, KernelSpec};
use crate::kmeans::{kernel_kmeans, lloyd};
use crate::linalg::DenseMatrix;
use crate::metrics::{nmi, purity};
use crate::nmf::{nmf_anls, nmf_mu, snmf, SnmfParams};
use crate::solver::{FactorInit, RunReport, SolverConfig};
use crate::spectral::{
    cluster_nmf_with_init, convex_nmf_with_init, nsc_with_init, pnmf_with_init, semi_nmf_with_init,
    symnmf_with_init,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CONSTRAINT: i32 = 4;

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Dimension(_) | Error::Label { .. } => EXIT_CONFIG,
        Error::Format { .. }
        | Error::Parse { .. }
        | Error::Io { .. }
        | Error::NonFinite { .. }
        | Error::NotSquare { .. } => EXIT_IO,
        Error::Asymmetric { .. }
        | Error::EmptyCluster(_)
        | Error::Volume(_)
        | Error::Affinity(_)
        | Error::Degree(_)
        | Error::Nonnegativity { .. }
        | Error::Projection(_) => EXIT_CONSTRAINT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mfclust",
    version,
    about = "Clustering with k-means, kernel k-means and nonnegative matrix factorizations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as data.csv, labels.csv and meta.txt.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Run a clustering algorithm on a data or affinity matrix.
    Run(RunArgs),
    /// Print purity and NMI of predicted labels against reference labels.
    Eval(EvalArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Isotropic Gaussian blobs with balanced cluster sizes.
    Blobs(BlobsArgs),
    /// Two noisy concentric rings.
    Circles(CirclesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// Centre j at spread * e_j in R^k.
    Axes,
    /// Centres evenly spaced on a circle of radius spread.
    Circle,
    /// Centres 2 * spread apart on a line.
    Line,
}

#[derive(Debug, Args)]
pub struct BlobsArgs {
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 5.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 0.3)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = Layout::Axes)]
    pub layout: Layout,
    /// Shift every feature so its minimum is zero.
    #[arg(long)]
    pub nonnegative: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CirclesArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Inner radius over outer radius.
    #[arg(
        long,
        alias = "ratio",
        default_value_t = 0.4,
        allow_hyphen_values = true
    )]
    pub radius_ratio: f64,
    #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Lloyd,
    KernelKmeans,
    NmfMu,
    NmfAnls,
    Snmf,
    Symnmf,
    Pnmf,
    Nsc,
    SemiNmf,
    ConvexNmf,
    ClusterNmf,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lloyd => "lloyd",
            Algorithm::KernelKmeans => "kernel-kmeans",
            Algorithm::NmfMu => "nmf-mu",
            Algorithm::NmfAnls => "nmf-anls",
            Algorithm::Snmf => "snmf",
            Algorithm::Symnmf => "symnmf",
            Algorithm::Pnmf => "pnmf",
            Algorithm::Nsc => "nsc",
            Algorithm::SemiNmf => "semi-nmf",
            Algorithm::ConvexNmf => "convex-nmf",
            Algorithm::ClusterNmf => "cluster-nmf",
        }
    }

    /// Consumes a kernel or affinity matrix instead of raw data.
    pub fn uses_affinity(self) -> bool {
        matches!(
            self,
            Algorithm::KernelKmeans | Algorithm::Symnmf | Algorithm::Nsc
        )
    }

    fn is_nmf(self) -> bool {
        matches!(
            self,
            Algorithm::NmfMu | Algorithm::NmfAnls | Algorithm::Snmf
        )
    }

    fn accepts_warm_start(self) -> bool {
        matches!(
            self,
            Algorithm::Symnmf
                | Algorithm::Pnmf
                | Algorithm::Nsc
                | Algorithm::SemiNmf
                | Algorithm::ConvexNmf
                | Algorithm::ClusterNmf
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Linear,
    Rbf,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum InitMode {
    /// Seeded uniform random factors.
    #[default]
    Random,
    /// Labels from a seeded Lloyd run (needs raw data input).
    Lloyd,
}

/// Flags of `run`. Every option can also come from `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// File of key=value lines using the long flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Data matrix CSV, one observation per column.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Precomputed n x n affinity (kernel-kmeans, symnmf, nsc only).
    #[arg(long)]
    pub affinity: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelKind>,
    /// RBF width; defaults to 1 / (m * median squared distance).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial degree (default 2).
    #[arg(long)]
    pub degree: Option<u32>,
    /// Polynomial offset (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub coef: Option<f64>,
    /// snmf shrinkage on W (default 0).
    #[arg(long)]
    pub eta: Option<f64>,
    /// snmf sparsity on H (default 0.1).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Read the input file as one observation per row.
    #[arg(long)]
    pub transpose: bool,
    /// Scale W to unit columns before reading labels from H (NMF solvers).
    #[arg(long)]
    pub normalize_factors: bool,
    #[arg(long, value_enum)]
    pub init: Option<InitMode>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Data { path: PathBuf, transpose: bool },
    Affinity(PathBuf),
}

/// A fully resolved and validated `run` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub k: usize,
    pub input: InputSource,
    pub kernel: Option<KernelSpec>,
    pub params: Option<SnmfParams>,
    pub cfg: SolverConfig,
    pub init: InitMode,
    pub normalize_factors: bool,
    pub output_dir: PathBuf,
}

fn pick<T: std::str::FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

fn pick_enum<T: ValueEnum>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    file.raw(key)
        .map(|v| {
            T::from_str(v, true)
                .map_err(|_| Error::config(format!("config key {key}: unknown value {v:?}")))
        })
        .transpose()
}

fn pick_flag(flag: bool, file: &ConfigFile, key: &str) -> Result<bool> {
    Ok(flag || pick::<bool>(None, file, key)?.unwrap_or(false))
}

impl RunSpec {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let algorithm = pick_enum(args.algorithm, &file, "algorithm")?
            .ok_or_else(|| Error::config("--algorithm is required"))?;
        let k = pick(args.k, &file, "k")?.ok_or_else(|| Error::config("--k is required"))?;
        let output_dir = pick(args.output_dir.clone(), &file, "output-dir")?
            .ok_or_else(|| Error::config("--output-dir is required"))?;
        let input = pick(args.input.clone(), &file, "input")?;
        let affinity = pick(args.affinity.clone(), &file, "affinity")?;
        let transpose = pick_flag(args.transpose, &file, "transpose")?;
        let normalize_factors = pick_flag(args.normalize_factors, &file, "normalize-factors")?;
        let kernel_kind = pick_enum(args.kernel, &file, "kernel")?;
        let gamma = pick(args.gamma, &file, "gamma")?;
        let degree = pick(args.degree, &file, "degree")?;
        let coef = pick(args.coef, &file, "coef")?;
        let eta = pick(args.eta, &file, "eta")?;
        let beta = pick(args.beta, &file, "beta")?;
        let init = pick_enum(args.init, &file, "init")?.unwrap_or_default();
        let name = algorithm.name();

        let input = match (input, affinity) {
            (Some(_), Some(_)) => {
                return Err(Error::config("--input and --affinity are exclusive"))
            }
            (None, None) => return Err(Error::config("one of --input or --affinity is required")),
            (Some(path), None) => InputSource::Data { path, transpose },
            (None, Some(path)) => {
                if !algorithm.uses_affinity() {
                    return Err(Error::config(format!("{name} does not accept --affinity")));
                }
                if kernel_kind.is_some() {
                    return Err(Error::config("--kernel cannot be combined with --affinity"));
                }
                InputSource::Affinity(path)
            }
        };

        if gamma.is_some() && kernel_kind != Some(KernelKind::Rbf) {
            return Err(Error::config("--gamma needs --kernel rbf"));
        }
        if (degree.is_some() || coef.is_some()) && kernel_kind != Some(KernelKind::Polynomial) {
            return Err(Error::config(
                "--degree and --coef need --kernel polynomial",
            ));
        }
        let kernel = kernel_kind.map(|kind| match kind {
            KernelKind::Linear => KernelSpec::Linear,
            KernelKind::Rbf => KernelSpec::Rbf { gamma },
            KernelKind::Polynomial => KernelSpec::Polynomial {
                degree: degree.unwrap_or(2),
                coef: coef.unwrap_or(1.0),
            },
        });
        if let Some(spec) = &kernel {
            if !algorithm.uses_affinity() {
                return Err(Error::config(format!("{name} does not accept --kernel")));
            }
            spec.validate()?;
        }
        if algorithm.uses_affinity()
            && matches!(input, InputSource::Data { .. })
            && kernel.is_none()
        {
            return Err(Error::config(format!(
                "{name} on raw data needs --kernel (or pass --affinity)"
            )));
        }

        let params = if algorithm == Algorithm::Snmf {
            let p = SnmfParams {
                eta: eta.unwrap_or(0.0),
                beta: beta.unwrap_or(0.1),
            };
            p.validate()?;
            Some(p)
        } else if eta.is_some() || beta.is_some() {
            return Err(Error::config("--eta and --beta apply to snmf only"));
        } else {
            None
        };

        if init == InitMode::Lloyd {
            if !algorithm.accepts_warm_start() {
                return Err(Error::config(format!("{name} has no warm start")));
            }
            if !matches!(input, InputSource::Data { .. }) {
                return Err(Error::config("--init lloyd needs raw data via --input"));
            }
        }
        if normalize_factors && !algorithm.is_nmf() {
            return Err(Error::config(
                "--normalize-factors applies to nmf-mu, nmf-anls and snmf",
            ));
        }

        let defaults = SolverConfig::default();
        let cfg = SolverConfig {
            seed: pick(args.seed, &file, "seed")?.unwrap_or(defaults.seed),
            max_iter: pick(args.max_iter, &file, "max-iter")?.unwrap_or(defaults.max_iter),
            tol: pick(args.tol, &file, "tol")?.unwrap_or(defaults.tol),
            epsilon: pick(args.epsilon, &file, "epsilon")?.unwrap_or(defaults.epsilon),
            restarts: pick(args.restarts, &file, "restarts")?.unwrap_or(defaults.restarts),
        };
        cfg.validate()?;

        Ok(Self {
            algorithm,
            k,
            input,
            kernel,
            params,
            cfg,
            init,
            normalize_factors,
            output_dir,
        })
    }
}

/// Solver result plus the factor matrices to export, by file stem.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub n: usize,
    pub factors: Vec<(&'static str, DenseMatrix)>,
}

fn load_affinity(path: &Path) -> Result<DenseMatrix> {
    let a = load_matrix(path, false)?;
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a)
}

/// Loads the input, runs the solver and collects its factors. Writes nothing.
pub fn execute_run(spec: &RunSpec) -> Result<RunOutput> {
    let (k, cfg) = (spec.k, &spec.cfg);
    let (data, affinity) = match &spec.input {
        InputSource::Data { path, transpose } => {
            let x = load_matrix(path, *transpose)?;
            let a = match &spec.kernel {
                Some(kernel) => Some(kernel_matrix(&x, kernel)?),
                None => None,
            };
            (Some(x), a)
        }
        InputSource::Affinity(path) => (None, Some(load_affinity(path)?)),
    };
    let init = match (spec.init, &data) {
        (InitMode::Lloyd, Some(x)) => FactorInit::Labels(lloyd(x, k, cfg)?.labels),
        _ => FactorInit::Random,
    };
    let x = || data.as_ref().expect("raw data input was validated");
    let a = || affinity.as_ref().expect("affinity input was validated");
    let n = data.as_ref().map_or_else(|| a().rows(), |x| x.cols());

    let (report, factors) = match spec.algorithm {
        Algorithm::Lloyd => {
            let r = lloyd(x(), k, cfg)?;
            let c = centroids(x(), &build_assignment(&r.labels, k)?)?;
            (r, vec![("centroids", c)])
        }
        Algorithm::KernelKmeans => (kernel_kmeans(a(), k, cfg)?, vec![]),
        Algorithm::NmfMu | Algorithm::NmfAnls | Algorithm::Snmf => {
            let (mut f, mut r) = match spec.algorithm {
                Algorithm::NmfMu => nmf_mu(x(), k, cfg)?,
                Algorithm::NmfAnls => nmf_anls(x(), k, cfg)?,
                _ => snmf(
                    x(),
                    k,
                    spec.params.as_ref().expect("snmf params resolved"),
                    cfg,
                )?,
            };
            if spec.normalize_factors {
                f = f.normalized();
                r.labels = labels_from_factor(&f.h, Orientation::Cols).labels;
            }
            (r, vec![("W", f.w), ("H", f.h)])
        }
        Algorithm::Symnmf => {
            let (f, r) = symnmf_with_init(a(), k, cfg, &init)?;
            (r, vec![("G", f.g)])
        }
        Algorithm::Pnmf => {
            // clustering observations: factor X^T so that G is n x k
            let (f, r) = pnmf_with_init(&x().transpose(), k, cfg, &init)?;
            (r, vec![("G", f.g)])
        }
        Algorithm::Nsc => {
            let (f, r) = nsc_with_init(a(), k, cfg, &init)?;
            (r, vec![("Gamma", f.gamma)])
        }
        Algorithm::SemiNmf | Algorithm::ConvexNmf => {
            let solve = if spec.algorithm == Algorithm::SemiNmf {
                semi_nmf_with_init
            } else {
                convex_nmf_with_init
            };
            let (f, r) = solve(x(), k, cfg, &init)?;
            (r, vec![("F", f.f), ("B", f.b)])
        }
        Algorithm::ClusterNmf => {
            let (f, r) = cluster_nmf_with_init(x(), k, cfg, &init)?;
            (r, vec![("G", f.g)])
        }
    };
    Ok(RunOutput { report, n, factors })
}

#[derive(Serialize)]
struct ReportJson<'a> {
    algorithm: &'a str,
    k: usize,
    n: usize,
    seed: u64,
    iterations: usize,
    objective: f64,
    wall_time_ms: f64,
    restarts_used: usize,
    labels: &'a [usize],
    objective_trace: &'a [f64],
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes labels.csv, objective_trace.csv, report.json and one CSV per factor.
pub fn write_run_output(spec: &RunSpec, out: &RunOutput) -> Result<()> {
    let dir = &spec.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let r = &out.report;
    save_labels(&r.labels, dir.join("labels.csv"))?;
    let trace: String = r
        .objective_trace
        .iter()
        .map(|v| format!("{v:?}\n"))
        .collect();
    write_text(&dir.join("objective_trace.csv"), &trace)?;
    let json = ReportJson {
        algorithm: spec.algorithm.name(),
        k: spec.k,
        n: out.n,
        seed: spec.cfg.seed,
        iterations: r.iterations,
        objective: r.objective,
        wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
        restarts_used: r.restarts_used,
        labels: &r.labels,
        objective_trace: &r.objective_trace,
    };
    let mut text = serde_json::to_string_pretty(&json).expect("plain data serializes");
    text.push('\n');
    write_text(&dir.join("report.json"), &text)?;
    for (name, m) in &out.factors {
        save_matrix(m, dir.join(format!("{name}.csv")))?;
    }
    Ok(())
}

fn write_dataset(d: &LabeledDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_matrix(&d.x, dir.join("data.csv"))?;
    save_labels(&d.labels, dir.join("labels.csv"))?;
    save_metadata(&d.meta, dir.join("meta.txt"))
}

fn generate(kind: &GenerateKind) -> Result<(LabeledDataset, &Path)> {
    match kind {
        GenerateKind::Blobs(b) => {
            let centers = match b.layout {
                Layout::Axes => BlobCenters::Axes {
                    spread: b.spread,
                    dim: b.k,
                },
                Layout::Circle => BlobCenters::Circle { spread: b.spread },
                Layout::Line => BlobCenters::Line { spread: b.spread },
            };
            let cfg = BlobsConfig {
                n: b.n,
                k: b.k,
                centers,
                sigma: b.sigma,
                seed: b.seed,
                nonnegative: b.nonnegative,
            };
            Ok((make_blobs(&cfg)?, &b.output_dir))
        }
        GenerateKind::Circles(c) => Ok((
            make_circles(c.n, c.radius_ratio, c.noise, c.seed)?,
            &c.output_dir,
        )),
    }
}

struct Failure {
    code: i32,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

fn execute(command: &Command, stdout: &mut impl Write) -> std::result::Result<(), Failure> {
    let say = |out: &mut dyn Write, line: String| {
        writeln!(out, "{line}").map_err(|e| Failure::from(Error::io("<stdout>", e)))
    };
    match command {
        Command::Generate { kind } => {
            let (d, dir) = generate(kind)?;
            write_dataset(&d, dir)?;
            say(
                stdout,
                format!(
                    "{}: {} observations, {} features -> {}",
                    d.meta.generator,
                    d.x.cols(),
                    d.x.rows(),
                    dir.display()
                ),
            )
        }
        Command::Run(args) => {
            let spec = RunSpec::resolve(args)?;
            let out = execute_run(&spec)?;
            write_run_output(&spec, &out)?;
            say(
                stdout,
                format!(
                    "{}: k={} objective={:?} iterations={} restarts={}",
                    spec.algorithm.name(),
                    spec.k,
                    out.report.objective,
                    out.report.iterations,
                    out.report.restarts_used
                ),
            )
        }
        Command::Eval(args) => {
            let as_io = |error: Error| Failure {
                code: EXIT_IO,
                error,
            };
            let pred = load_labels(&args.pred).map_err(as_io)?;
            let truth = load_labels(&args.truth).map_err(as_io)?;
            let p = purity(&pred, &truth).map_err(as_io)?;
            let m = nmi(&pred, &truth).map_err(as_io)?;
            say(stdout, format!("purity,{p:?}"))?;
            say(stdout, format!("nmi,{m:?}"))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Diagnostics go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli.command, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.error);
            f.code
        }
    }
}
