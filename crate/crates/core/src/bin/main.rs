use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use resolvent_lab::densities::{self, DistributionModel};
use resolvent_lab::ensembles::{self, EnsembleSpec};
use resolvent_lab::harness::{
    self, read_samples_csv, write_samples_csv, ExperimentConfig, ExperimentKind,
};
use resolvent_lab::resolvent;
use resolvent_lab::stats::{self, MapKind, DEFAULT_TAIL_WINDOW};
use resolvent_lab::{Error, ExperimentReport, Result};

#[derive(Parser)]
#[command(
    name = "resolvent-lab",
    version,
    about = "Resolvent statistics of random matrices"
)]
struct Cli {
    /// Base seed (overrides a config file's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (overrides a config file's workers).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the large sample sizes of the original runs.
    #[arg(long, global = true)]
    full: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a distribution on a grid and write CSV.
    Density(DensityArgs),
    /// Draw samples from an ensemble statistic or a distribution and write CSV.
    Sample(SampleArgs),
    /// Run, list or template experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Fit the power-law tail of a samples file.
    FitTail(FitTailArgs),
    /// Compare a samples file with its image under an inversion map.
    CheckSymmetry(SymmetryArgs),
    /// Summarize the report(s) under a directory.
    Report { dir: PathBuf },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run the experiment described by a JSON config file.
    Run { config: PathBuf },
    /// List the experiments and the artifact each one regenerates.
    List,
    /// Print a default config for an experiment.
    Template { experiment: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    FiniteN,
    Regime1,
    Regime2,
    Regime3,
    Student,
    Gaussian,
    InverseGamma,
    Cauchy,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Matrix size of the finite-N law.
    #[arg(long)]
    n: Option<usize>,
    /// `|z|` of the finite-N law.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Complex center as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    center: Option<Complex64>,
    #[arg(long)]
    variance: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    location: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `lo:hi:count`. For complex laws the grid runs along the real offset from the center.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: (f64, f64, usize),
    /// Optional imaginary-offset grid turning complex laws into a 2-D table.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    imag_grid: Option<(f64, f64, usize)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleKind {
    Ginibre,
    Ginue,
    Haar,
    Product,
    Gue,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum StatisticKind {
    /// `[G]11` from matrix draws.
    G11,
    /// Normalized resolvent trace.
    Trace,
    /// `[G]11` from the exact finite-N Ginibre law.
    Exact,
    /// Largest eigenvalue modulus.
    SpectralRadius,
}

#[derive(Args)]
struct SampleArgs {
    /// Draw from a distribution instead of an ensemble.
    #[arg(long, value_enum, conflicts_with_all = ["ensemble", "statistic"])]
    model: Option<ModelKind>,
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleKind>,
    #[arg(long, value_enum, default_value = "g11")]
    statistic: StatisticKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    /// Spectral point `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<Complex64>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    center: Option<Complex64>,
    #[arg(long)]
    variance: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    location: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args)]
struct ColumnArgs {
    /// Columns holding the real and imaginary parts, as `re_col,im_col`.
    #[arg(long, default_value = "re,im")]
    columns: String,
}

#[derive(Args)]
struct FitTailArgs {
    csv: PathBuf,
    #[command(flatten)]
    columns: ColumnArgs,
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    center: Complex64,
    /// Quantile window `lo,hi`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    window: Option<(f64, f64)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Inv,
    InvConj,
    Sqrt2Inv,
}

#[derive(Args)]
struct SymmetryArgs {
    csv: PathBuf,
    #[command(flatten)]
    columns: ColumnArgs,
    #[arg(long, value_enum)]
    map: MapArg,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    let re = a
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("real part '{a}': {e}"))?;
    let im = b
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("imaginary part '{b}': {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let c = parse_complex(s)?;
    Ok((c.re, c.im))
}

fn parse_grid(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    }
    let lo = parts[0].parse::<f64>().map_err(|e| format!("lo: {e}"))?;
    let hi = parts[1].parse::<f64>().map_err(|e| format!("hi: {e}"))?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|e| format!("count: {e}"))?;
    if count < 1 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(format!("grid needs lo <= hi and count >= 1, got '{s}'"));
    }
    Ok((lo, hi, count))
}

fn grid_points((lo, hi, count): (f64, f64, usize)) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

fn need<T>(v: Option<T>, flag: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("--{flag} is required for {model}")))
}

#[allow(clippy::too_many_arguments)]
fn build_model(
    kind: ModelKind,
    n: Option<usize>,
    r: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    center: Option<Complex64>,
    variance: Option<f64>,
    nu: Option<f64>,
    location: Option<f64>,
    scale: Option<f64>,
) -> Result<DistributionModel> {
    let origin = Complex64::new(0.0, 0.0);
    let model = match kind {
        ModelKind::FiniteN => DistributionModel::FiniteNVarianceLaw {
            n: need(n, "n", "finite-n")?,
            r: need(r, "r", "finite-n")?,
        },
        ModelKind::Regime1 => DistributionModel::Regime1Limit,
        ModelKind::Regime2 => DistributionModel::Regime2VarianceLaw,
        ModelKind::Regime3 => DistributionModel::Regime3VarianceLaw {
            alpha: need(alpha, "alpha", "regime3")?,
        },
        ModelKind::Student => DistributionModel::ComplexStudent {
            beta: need(beta, "beta", "student")?,
            center: center.unwrap_or(origin),
        },
        ModelKind::Gaussian => DistributionModel::ComplexGaussian {
            mean: center.unwrap_or(origin),
            variance: variance.unwrap_or(1.0),
        },
        ModelKind::InverseGamma => DistributionModel::InverseGamma {
            nu: need(nu, "nu", "inverse-gamma")?,
            beta: need(beta, "beta", "inverse-gamma")?,
        },
        ModelKind::Cauchy => DistributionModel::CauchyHermitian {
            location: location.unwrap_or(0.0),
            scale: need(scale, "scale", "cauchy")?,
        },
    };
    model.validate()?;
    Ok(model)
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn density(cli: &Cli, a: &DensityArgs) -> Result<()> {
    let m = &a.model;
    let model = build_model(
        m.model, m.n, m.r, m.alpha, m.beta, m.center, m.variance, m.nu, m.location, m.scale,
    )?;
    let mut w = csv::Writer::from_writer(output(&cli.out)?);
    let xs = grid_points(a.grid);
    if model.is_complex() {
        let c = model.center();
        let radial = model.radial_cdf()?;
        let ys = a.imag_grid.map(grid_points).unwrap_or_else(|| vec![0.0]);
        w.write_record(["re", "im", "pdf", "radial_cdf"])?;
        for &y in &ys {
            for &x in &xs {
                let omega = c + Complex64::new(x, y);
                let pdf = model.pdf_complex(omega)?;
                let cdf = radial.eval((omega - c).norm());
                w.write_record([
                    format!("{:e}", omega.re),
                    format!("{:e}", omega.im),
                    format!("{pdf:e}"),
                    format!("{cdf:e}"),
                ])?;
            }
        }
    } else {
        if a.imag_grid.is_some() {
            return Err(Error::Config(
                "--imag-grid only applies to complex laws".into(),
            ));
        }
        w.write_record(["x", "pdf", "cdf"])?;
        for &x in &xs {
            let (pdf, cdf) =
                if x > 0.0 || matches!(model, DistributionModel::CauchyHermitian { .. }) {
                    (model.pdf(x)?, model.cdf(x)?)
                } else {
                    (0.0, 0.0)
                };
            w.write_record([format!("{x:e}"), format!("{pdf:e}"), format!("{cdf:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<()> {
    let seed = cli.seed.unwrap_or(1);
    let workers = cli.workers.unwrap_or(1);
    let path = cli
        .out
        .clone()
        .ok_or_else(|| Error::Config("sample needs --out <file.csv>".into()))?;
    if let Some(kind) = a.model {
        let model = build_model(
            kind, a.n, a.r, a.alpha, a.beta, a.center, a.variance, a.nu, a.location, a.scale,
        )?;
        let batch = densities::sample(&model, a.count, seed)?;
        return write_samples_csv(&path, &batch.values, &[]);
    }
    let kind = need(
        a.ensemble,
        "ensemble",
        "ensemble sampling (or pass --model)",
    )?;
    let n = need(a.n, "n", "ensemble sampling")?;
    let tau = || need(a.tau, "tau", "ginue and product ensembles");
    let ensemble = match kind {
        EnsembleKind::Ginibre => EnsembleSpec::Ginibre { n },
        EnsembleKind::Ginue => EnsembleSpec::GinUE { n, tau: tau()? },
        EnsembleKind::Haar => EnsembleSpec::HaarUnitary { n },
        EnsembleKind::Product => EnsembleSpec::ProductABC { n, tau: tau()? },
        EnsembleKind::Gue => EnsembleSpec::GUE { n },
    };
    ensemble.validate()?;
    if a.statistic == StatisticKind::SpectralRadius {
        let radii: Vec<Complex64> =
            resolvent_lab::pool::run_indexed(0..a.count as u64, workers, |i| {
                ensembles::spectral_radius(
                    &ensemble.sample(resolvent_lab::rng::derive_seed(seed, i))?,
                )
                .map(|r| Complex64::new(r, 0.0))
            })
            .into_iter()
            .collect::<Result<_>>()?;
        return write_samples_csv(&path, &radii, &[]);
    }
    let z = need(a.z, "z", "resolvent statistics")?;
    let batch = match a.statistic {
        StatisticKind::G11 => resolvent::sample_g11_matrix(&ensemble, z, a.count, seed, workers)?,
        StatisticKind::Trace => {
            resolvent::sample_stieltjes_matrix(&ensemble, z, a.count, seed, workers)?
        }
        StatisticKind::Exact => {
            if !matches!(ensemble, EnsembleSpec::Ginibre { .. }) {
                return Err(Error::Config(
                    "--statistic exact needs --ensemble ginibre".into(),
                ));
            }
            resolvent::sample_g11_exact(n, z, a.count, seed)?
        }
        StatisticKind::SpectralRadius => unreachable!(),
    };
    if batch.rejections > 0 {
        log::warn!("{} draws were rejected and resampled", batch.rejections);
    }
    write_samples_csv(&path, &batch.values, &[])
}

fn load_values(path: &Path, columns: &str) -> Result<Vec<Complex64>> {
    let (re_col, im_col) = columns.split_once(',').ok_or_else(|| {
        Error::Config(format!("--columns expects re_col,im_col, got '{columns}'"))
    })?;
    let mut rd = csv::Reader::from_path(path)?;
    let headers = rd.headers()?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!("column '{name}' not found in {}", path.display()))
        })
    };
    let (i, j) = (find(re_col)?, find(im_col)?);
    if (i, j) == (1, 2) {
        return Ok(read_samples_csv(File::open(path)?)?
            .iter()
            .map(|r| r.value())
            .collect());
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let p = |k: usize| {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{}: {e}", &headers[k])))
        };
        out.push(Complex64::new(p(i)?, p(j)?));
    }
    Ok(out)
}

fn print_json<T: serde::Serialize>(cli: &Cli, v: &T) -> Result<()> {
    let mut w = output(&cli.out)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fit_tail(cli: &Cli, a: &FitTailArgs) -> Result<()> {
    let values = load_values(&a.csv, &a.columns.columns)?;
    let (lo, hi) = a.window.unwrap_or(DEFAULT_TAIL_WINDOW);
    let fit = stats::tail_fit(&values, a.center, lo, hi)?;
    print_json(cli, &fit)
}

fn check_symmetry(cli: &Cli, a: &SymmetryArgs) -> Result<()> {
    let values = load_values(&a.csv, &a.columns.columns)?;
    let map = match a.map {
        MapArg::Inv => MapKind::Reciprocal,
        MapArg::InvConj => MapKind::ReciprocalConjugate,
        MapArg::Sqrt2Inv => MapKind::Sqrt2Reciprocal,
    };
    let report = stats::inversion_symmetry(&values, map)?;
    if report.warning {
        log::warn!(
            "{} of {} values were below the inversion floor",
            report.dropped,
            values.len()
        );
    }
    print_json(cli, &report)
}

fn run_experiment(cli: &Cli, path: &Path) -> Result<()> {
    let mut config = ExperimentConfig::from_file(path)?;
    if cli.full {
        config = config.full_scale();
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    if let Some(o) = &cli.out {
        config.output_dir = o.clone();
    }
    let report = harness::run(&config)?;
    print_summary(&report, &mut io::stdout())?;
    Ok(())
}

fn print_summary(report: &ExperimentReport, w: &mut impl Write) -> Result<()> {
    writeln!(
        w,
        "{} ({}) n_samples={} seed={} -> {}",
        report.experiment,
        report.config.ensemble.name(),
        report.config.n_samples,
        report.config.seed,
        report.config.output_dir.display()
    )?;
    for (k, v) in &report.ks {
        writeln!(w, "  ks       {k:<28} {v:.5}")?;
    }
    for (k, v) in &report.estimates {
        writeln!(w, "  estimate {k:<28} {v:.6}")?;
    }
    for (k, v) in &report.complex_estimates {
        writeln!(w, "  estimate {k:<28} {:.6}{:+.6}i", v.re, v.im)?;
    }
    writeln!(
        w,
        "  rejections {}  wall {:.1}s",
        report.rejections, report.timing.total_seconds
    )?;
    Ok(())
}

fn report(dir: &Path) -> Result<()> {
    let mut dirs = Vec::new();
    if dir.join(harness::REPORT_FILE).is_file() {
        dirs.push(dir.to_path_buf());
    } else {
        for entry in std::fs::read_dir(dir)? {
            let p = entry?.path();
            if p.join(harness::REPORT_FILE).is_file() {
                dirs.push(p);
            }
        }
        dirs.sort();
    }
    if dirs.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no {} under {}",
            harness::REPORT_FILE,
            dir.display()
        )));
    }
    let mut out = io::stdout().lock();
    for d in dirs {
        print_summary(&ExperimentReport::load(&d)?, &mut out)?;
    }
    Ok(())
}

fn experiment(cli: &Cli, cmd: &ExperimentCommand) -> Result<()> {
    match cmd {
        ExperimentCommand::Run { config } => run_experiment(cli, config),
        ExperimentCommand::List => {
            let mut out = io::stdout().lock();
            for k in ExperimentKind::ALL {
                writeln!(
                    out,
                    "{:<20} {:<60} {}",
                    k.name(),
                    k.artifact(),
                    k.description()
                )?;
            }
            Ok(())
        }
        ExperimentCommand::Template { experiment } => {
            let kind: ExperimentKind = experiment.parse()?;
            let mut cfg = ExperimentConfig::template(kind);
            if cli.full {
                cfg = cfg.full_scale();
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(w) = cli.workers {
                cfg.workers = w;
            }
            let mut w = output(&cli.out)?;
            writeln!(w, "{}", cfg.to_json()?)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain { .. } | Error::Parse(_) | Error::Json(_) => 2,
        Error::Partial { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Density(a) => density(&cli, a),
        Command::Sample(a) => sample(&cli, a),
        Command::Experiment(cmd) => experiment(&cli, cmd),
        Command::FitTail(a) => fit_tail(&cli, a),
        Command::CheckSymmetry(a) => check_symmetry(&cli, a),
        Command::Report { dir } => report(dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
