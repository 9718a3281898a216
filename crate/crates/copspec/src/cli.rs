//! Command-line interface: subcommands for simulation, fitting, estimation,
//! reference spectra, both bootstrap diagnostics, re-plotting and
//! self-calibration. Flags override config-file keys; exit codes are 0 on
//! success, 1 for usage errors, 2 for data errors and 3 for numerical
//! failures.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bootstrap::{
    algorithm2_pvalues, run_parametric_bootstrap, self_calibration_check, typical_regions,
    EstimatorConfig, ModelClass,
};
use crate::error::{Error, Result};
use crate::io::{
    emit_detail_plot, emit_grid_plot, emit_summary_plot, ingest_csv, persist_ensemble,
    read_estimate_csv, read_pvalue_csv, write_atomic, write_estimate_csv, write_series_csv,
    ConfigFile, PlotDocument,
};
use crate::kernel::KernelSpec;
use crate::models::{parse_model, simulate, ModelSpec, SimConfig};
use crate::reference::{gaussian_copula_spectrum, mc_copula_spectrum};
use crate::series::{FrequencyGrid, QuantileGrid, TimeSeries};

#[derive(Parser)]
#[command(
    name = "copspec",
    version,
    about = "Copula spectral density estimation and parametric-bootstrap model diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a parametric model to CSV
    Simulate(SimulateArgs),
    /// Fit a model class to a series
    Fit(FitArgs),
    /// Estimate the copula spectral density of a series
    Estimate(EstimateArgs),
    /// True copula spectra of a model (analytic for AR/ARMA, Monte Carlo otherwise)
    Reference(ReferenceArgs),
    /// Typical-region diagnostic: bootstrap bands plus the data estimate
    Regions(RegionsArgs),
    /// Uniform-in-quantile p-value diagnostic per frequency
    Pvalues(PvaluesArgs),
    /// Re-render plots from previously written CSV files
    Plot(PlotArgs),
    /// Self-calibration rates: coverage and P(p_min <= alpha) over repetitions
    Calibrate(CalibrateArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Flat key = value configuration file; explicit flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for all written files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model text, e.g. "ar(0.5)" or "garch11(omega=0.01,alpha=0.4,beta=0.5)"
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long, default_value_t = 0)]
    replicate: u64,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Interpret the input column as prices and analyze log-returns
    #[arg(long)]
    log_returns: bool,
    /// Model class: ar | arma | arch1 | garch11 | egarch11
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    log_returns: bool,
    /// Comma-separated quantile levels (default 0.1,0.5,0.9)
    #[arg(long)]
    taus: Option<String>,
    /// Comma-separated frequencies in [0, pi] (default 2*pi*j/64, j = 0..32)
    #[arg(long)]
    omegas: Option<String>,
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct ReferenceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    taus: Option<String>,
    #[arg(long)]
    omegas: Option<String>,
    /// Force the Monte Carlo route even for linear models
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    sim_length: usize,
    #[arg(long, default_value_t = 120)]
    max_lag: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RegionsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    log_returns: bool,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Number of bootstrap replicates
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    taus: Option<String>,
    #[arg(long)]
    omegas: Option<String>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the replicate ensemble as ensemble.bin
    #[arg(long)]
    save_ensemble: bool,
}

#[derive(Args)]
struct PvaluesArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    log_returns: bool,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// Quantile levels for M (default 0.05,0.10,...,0.95)
    #[arg(long)]
    taus: Option<String>,
    #[arg(long)]
    omegas: Option<String>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit a detail plot at the grid frequency nearest this value
    #[arg(long)]
    detail_omega: Option<f64>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Estimate CSV (tau1,tau2,omega,re,im) to render as a 3x3 grid
    #[arg(long)]
    estimate: Option<PathBuf>,
    /// Summary p-value CSV (omega,p_min) to render
    #[arg(long)]
    pvalues: Option<PathBuf>,
    #[arg(long)]
    taus: Option<String>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// True data-generating model text
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    taus: Option<String>,
    #[arg(long)]
    omegas: Option<String>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Parse argv and run; returns the process exit code.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Reference(args) => run_reference(args),
        Command::Regions(args) => run_regions(args),
        Command::Pvalues(args) => run_pvalues(args),
        Command::Plot(args) => run_plot(args),
        Command::Calibrate(args) => run_calibrate(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

// ---- config/flag resolution helpers ----

struct Resolved {
    config: ConfigFile,
    out_dir: PathBuf,
}

fn resolve_common(common: &CommonArgs) -> Result<Resolved> {
    let config = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out_dir = common
        .out
        .clone()
        .or_else(|| config.get("out_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Resolved { config, out_dir })
}

fn parse_levels(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number `{tok}` in level list")))
        })
        .collect()
}

fn resolve_taus(flag: &Option<String>, cfg: &ConfigFile, default: QuantileGrid) -> Result<QuantileGrid> {
    match flag {
        Some(text) => QuantileGrid::new(parse_levels(text)?),
        None => match cfg.get_f64_list("taus")? {
            Some(levels) => QuantileGrid::new(levels),
            None => Ok(default),
        },
    }
}

fn resolve_omegas(flag: &Option<String>, cfg: &ConfigFile) -> Result<FrequencyGrid> {
    match flag {
        Some(text) => FrequencyGrid::new(parse_levels(text)?),
        None => match cfg.get_f64_list("omegas")? {
            Some(omegas) => FrequencyGrid::new(omegas),
            None => Ok(FrequencyGrid::fourier_default()),
        },
    }
}

fn resolve_kernel(flag: Option<f64>, cfg: &ConfigFile) -> Result<KernelSpec> {
    if let Some(kind) = cfg.get("kernel") {
        if !kind.eq_ignore_ascii_case("epanechnikov") {
            return Err(Error::InvalidInput(format!("unknown kernel `{kind}`")));
        }
    }
    let bandwidth = flag.or(cfg.get_f64("bandwidth")?).unwrap_or(0.1);
    KernelSpec::epanechnikov(bandwidth)
}

fn resolve_class(
    class: &Option<String>,
    p: Option<usize>,
    q: Option<usize>,
    cfg: &ConfigFile,
) -> Result<ModelClass> {
    let name = class
        .clone()
        .or_else(|| cfg.get("class").map(str::to_string))
        .ok_or_else(|| Error::InvalidInput("missing --class".into()))?;
    let p = match p {
        Some(v) => Some(v),
        None => cfg.get_usize("p")?,
    };
    let q = match q {
        Some(v) => Some(v),
        None => cfg.get_usize("q")?,
    };
    match name.to_ascii_lowercase().as_str() {
        "ar" => Ok(ModelClass::Ar(p.ok_or_else(|| Error::InvalidInput("ar class needs --p".into()))?)),
        "arma" => Ok(ModelClass::Arma(
            p.ok_or_else(|| Error::InvalidInput("arma class needs --p".into()))?,
            q.ok_or_else(|| Error::InvalidInput("arma class needs --q".into()))?,
        )),
        "arch1" => Ok(ModelClass::Arch1),
        "garch11" => Ok(ModelClass::Garch11),
        "egarch11" => Ok(ModelClass::Egarch11),
        other => Err(Error::InvalidInput(format!("unknown model class `{other}`"))),
    }
}

fn resolve_model(flag: &Option<String>, cfg: &ConfigFile) -> Result<ModelSpec> {
    let text = flag
        .clone()
        .or_else(|| cfg.get("model").map(str::to_string))
        .ok_or_else(|| Error::InvalidInput("missing --model".into()))?;
    parse_model(&text)
}

fn resolve_input(
    input: &Option<PathBuf>,
    log_returns_flag: bool,
    cfg: &ConfigFile,
) -> Result<TimeSeries> {
    let path = input
        .clone()
        .or_else(|| cfg.get("input").map(PathBuf::from))
        .ok_or_else(|| Error::InvalidInput("missing --input".into()))?;
    let log_returns = log_returns_flag || cfg.get_bool("log_returns")?.unwrap_or(false);
    ingest_csv(&path, log_returns)
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    write_atomic(&path, bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_plot(dir: &Path, stem: &str, doc: &PlotDocument) -> Result<()> {
    write_out(dir, &format!("{stem}.svg"), doc.svg.as_bytes())?;
    write_out(dir, &format!("{stem}.csv"), doc.csv.as_bytes())
}

// ---- subcommand bodies ----

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let spec = resolve_model(&args.model, &ctx.config)?;
    let n = args
        .n
        .or(ctx.config.get_usize("n")?)
        .ok_or_else(|| Error::InvalidInput("missing --n".into()))?;
    let seed = args.seed.or(ctx.config.get_u64("seed")?).unwrap_or(0);
    let burn_in = args
        .burn_in
        .or(ctx.config.get_usize("burn_in")?)
        .unwrap_or(SimConfig::DEFAULT_BURN_IN);
    let cfg = SimConfig::new(n, seed).with_burn_in(burn_in).with_replicate(args.replicate);
    let series = simulate(&spec, &cfg)?;
    write_out(&ctx.out_dir, "simulated.csv", write_series_csv(&series).as_bytes())
}

fn run_fit(args: FitArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let data = resolve_input(&args.input, args.log_returns, &ctx.config)?;
    let class = resolve_class(&args.class, args.p, args.q, &ctx.config)?;
    let fit = class.fit(&data)?;
    let text = fit.to_text();
    println!("{text}");
    write_out(&ctx.out_dir, "fit.txt", format!("{text}\n").as_bytes())
}

fn run_estimate(args: EstimateArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let data = resolve_input(&args.input, args.log_returns, &ctx.config)?;
    let taus = resolve_taus(&args.taus, &ctx.config, QuantileGrid::display_default())?;
    let omegas = resolve_omegas(&args.omegas, &ctx.config)?;
    let kernel = resolve_kernel(args.bandwidth, &ctx.config)?;
    let estimate = crate::spectra::smoothed_estimate(&data, &taus, &omegas, &kernel)?;
    write_out(&ctx.out_dir, "estimate.csv", write_estimate_csv(&estimate).as_bytes())?;
    if let Ok(doc) = emit_grid_plot(&estimate, None, &display_subset(&taus)) {
        write_plot(&ctx.out_dir, "grid", &doc)?;
    }
    Ok(())
}

/// The grid plot wants {0.1, 0.5, 0.9} when available, otherwise whatever
/// (up to three) levels the estimate carries.
fn display_subset(taus: &QuantileGrid) -> QuantileGrid {
    let preferred = [0.1, 0.5, 0.9];
    if preferred.iter().all(|&t| taus.index_of(t).is_some()) {
        return QuantileGrid::new(preferred.to_vec()).expect("static grid");
    }
    taus.clone()
}

fn run_reference(args: ReferenceArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let spec = resolve_model(&args.model, &ctx.config)?;
    let taus = resolve_taus(&args.taus, &ctx.config, QuantileGrid::display_default())?;
    let omegas = resolve_omegas(&args.omegas, &ctx.config)?;
    let analytic_ok = matches!(spec, ModelSpec::Ar { .. } | ModelSpec::Arma { .. });
    let truth = if analytic_ok && !args.mc {
        gaussian_copula_spectrum(&spec, &taus, &omegas, 64)?
    } else {
        let seed = args.seed.or(ctx.config.get_u64("seed")?).unwrap_or(0);
        mc_copula_spectrum(&spec, &taus, &omegas, args.max_lag, args.sim_length, seed)?.estimate
    };
    write_out(&ctx.out_dir, "reference.csv", write_estimate_csv(&truth).as_bytes())?;
    if let Ok(doc) = emit_grid_plot(&truth, None, &display_subset(&taus)) {
        write_plot(&ctx.out_dir, "grid", &doc)?;
    }
    Ok(())
}

fn run_regions(args: RegionsArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let data = resolve_input(&args.input, args.log_returns, &ctx.config)?;
    let class = resolve_class(&args.class, args.p, args.q, &ctx.config)?;
    let taus = resolve_taus(&args.taus, &ctx.config, QuantileGrid::display_default())?;
    let omegas = resolve_omegas(&args.omegas, &ctx.config)?;
    let kernel = resolve_kernel(args.bandwidth, &ctx.config)?;
    let r = args.r.or(ctx.config.get_usize("r")?).unwrap_or(1000);
    let alpha = args.alpha.or(ctx.config.get_f64("alpha")?).unwrap_or(0.05);
    let seed = args.seed.or(ctx.config.get_u64("seed")?).unwrap_or(0);

    let config = EstimatorConfig::new(taus.clone(), omegas, kernel);
    let ensemble = run_parametric_bootstrap(&data, class, r, &config, seed)?;
    let estimate = config.estimate(&data)?;
    let regions = typical_regions(&ensemble, alpha)?;

    write_out(&ctx.out_dir, "fit.txt", format!("{}\n", ensemble.fitted.to_text()).as_bytes())?;
    write_out(&ctx.out_dir, "estimate.csv", write_estimate_csv(&estimate).as_bytes())?;
    let doc = emit_grid_plot(&estimate, Some(&regions), &display_subset(&taus))?;
    write_out(&ctx.out_dir, "grid.svg", doc.svg.as_bytes())?;
    write_out(&ctx.out_dir, "regions.csv", doc.csv.as_bytes())?;
    if args.save_ensemble {
        write_out(&ctx.out_dir, "ensemble.bin", &persist_ensemble(&ensemble)?)?;
    }
    Ok(())
}

fn run_pvalues(args: PvaluesArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let data = resolve_input(&args.input, args.log_returns, &ctx.config)?;
    let class = resolve_class(&args.class, args.p, args.q, &ctx.config)?;
    let taus = resolve_taus(&args.taus, &ctx.config, QuantileGrid::pvalue_default())?;
    let omegas = resolve_omegas(&args.omegas, &ctx.config)?;
    let kernel = resolve_kernel(args.bandwidth, &ctx.config)?;
    let r = args.r.or(ctx.config.get_usize("r")?).unwrap_or(1000);
    let beta = args.beta.or(ctx.config.get_f64("beta")?).unwrap_or(0.1);
    let seed = args.seed.or(ctx.config.get_u64("seed")?).unwrap_or(0);

    let config = EstimatorConfig::new(taus, omegas, kernel);
    let ensemble = run_parametric_bootstrap(&data, class, r, &config, seed)?;
    let estimate = config.estimate(&data)?;
    let field = algorithm2_pvalues(&ensemble, &estimate, beta)?;
    for warning in &field.warnings {
        eprintln!("warning: {warning}");
    }

    write_out(&ctx.out_dir, "fit.txt", format!("{}\n", ensemble.fitted.to_text()).as_bytes())?;
    let summary = emit_summary_plot(&field)?;
    write_out(&ctx.out_dir, "summary.svg", summary.svg.as_bytes())?;
    write_out(&ctx.out_dir, "pvalues.csv", summary.csv.as_bytes())?;
    if let Some(target) = args.detail_omega {
        let snapped = field
            .omegas
            .omegas()
            .iter()
            .copied()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .expect("non-empty grid");
        let detail = emit_detail_plot(&field, snapped)?;
        write_plot(&ctx.out_dir, "detail", &detail)?;
    }
    Ok(())
}

fn run_plot(args: PlotArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    match (&args.estimate, &args.pvalues) {
        (Some(path), None) => {
            let estimate = read_estimate_csv(&std::fs::read_to_string(path)?)?;
            let taus = match &args.taus {
                Some(text) => QuantileGrid::new(parse_levels(text)?)?,
                None => display_subset(estimate.taus()),
            };
            let doc = emit_grid_plot(&estimate, None, &taus)?;
            write_plot(&ctx.out_dir, "grid", &doc)
        }
        (None, Some(path)) => {
            let rows = read_pvalue_csv(&std::fs::read_to_string(path)?)?;
            let doc = summary_from_rows(&rows)?;
            write_out(&ctx.out_dir, "summary.svg", doc.svg.as_bytes())
        }
        _ => Err(Error::InvalidInput(
            "plot needs exactly one of --estimate or --pvalues".into(),
        )),
    }
}

/// Rebuild a minimal p-value field (p_min only) for re-plotting.
fn summary_from_rows(rows: &[(f64, f64)]) -> Result<PlotDocument> {
    let omegas = FrequencyGrid::new(rows.iter().map(|r| r.0).collect())?;
    let p_min: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let r = p_min
        .iter()
        .filter(|&&p| p > 0.0)
        .fold(f64::INFINITY, |acc, &p| acc.min(p));
    let r = if r.is_finite() && r > 0.0 { (1.0 / r).round().max(2.0) as usize } else { 100 };
    let field = crate::bootstrap::PValueField {
        levels: QuantileGrid::new(vec![0.5])?,
        omegas,
        r,
        beta: 0.1,
        p_re: vec![1.0; rows.len()],
        p_im: vec![1.0; rows.len()],
        sign_re: vec![1; rows.len()],
        sign_im: vec![1; rows.len()],
        p_min,
        warnings: Vec::new(),
    };
    emit_summary_plot(&field)
}

fn run_calibrate(args: CalibrateArgs) -> Result<()> {
    let ctx = resolve_common(&args.common)?;
    let truth = resolve_model(&args.model, &ctx.config)?;
    let class = resolve_class(&args.class, args.p, args.q, &ctx.config)?;
    let taus = resolve_taus(&args.taus, &ctx.config, QuantileGrid::pvalue_default())?;
    let omegas = resolve_omegas(&args.omegas, &ctx.config)?;
    let kernel = resolve_kernel(args.bandwidth, &ctx.config)?;
    let n = args
        .n
        .or(ctx.config.get_usize("n")?)
        .ok_or_else(|| Error::InvalidInput("missing --n".into()))?;
    let r = args.r.or(ctx.config.get_usize("r")?).unwrap_or(1000);
    let reps = args.reps.unwrap_or(200);
    let alpha = args.alpha.or(ctx.config.get_f64("alpha")?).unwrap_or(0.05);
    let beta = args.beta.or(ctx.config.get_f64("beta")?).unwrap_or(0.1);
    let seed = args.seed.or(ctx.config.get_u64("seed")?).unwrap_or(0);

    let config = EstimatorConfig::new(taus, omegas, kernel);
    let report =
        self_calibration_check(&truth, class, n, r, reps, alpha, beta, &config, seed)?;

    let mut csv = String::from("kind,tau1,tau2,omega,rate,se\n");
    let levels = report.taus.levels();
    for (i, &t1) in levels.iter().enumerate() {
        for (j, &t2) in levels.iter().enumerate() {
            for (k, &w) in report.omegas.omegas().iter().enumerate() {
                let rate = report.coverage_re_at(i, j, k);
                csv.push_str(&format!(
                    "coverage_re,{t1},{t2},{w},{rate},{}\n",
                    report.binomial_se(rate)
                ));
                let rate = report.coverage_im_at(i, j, k);
                csv.push_str(&format!(
                    "coverage_im,{t1},{t2},{w},{rate},{}\n",
                    report.binomial_se(rate)
                ));
            }
        }
    }
    for (k, &w) in report.omegas.omegas().iter().enumerate() {
        let rate = report.pmin_le_alpha[k];
        csv.push_str(&format!("pmin_le_alpha,,,{w},{rate},{}\n", report.binomial_se(rate)));
    }
    write_out(&ctx.out_dir, "calibration.csv", csv.as_bytes())?;
    let interior: Vec<f64> = report
        .omegas
        .omegas()
        .iter()
        .zip(&report.pmin_le_alpha)
        .filter(|(&w, _)| w > 0.0 && w < PI)
        .map(|(_, &rate)| rate)
        .collect();
    if !interior.is_empty() {
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        println!("mean interior P(p_min <= {alpha}) = {mean:.4}");
    }
    Ok(())
}
