//! The `hurstlab` command line. Every subcommand is a thin wrapper over the
//! library; errors surface as `error[<category>]: <message>` on one line.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::asymptotics::{
    a_constant, hurst_sampling_law, medl_median_variance, medl_population_median,
    medla_median_variance, medla_population_median, normality_diagnostics, q_constant, NormalLaw,
};
use crate::error::{HurstError, Result};
use crate::estimators::{estimate_hurst, level_series, LevelRange, Method};
use crate::io::{
    read_signal, write_report, write_signal, DecompositionDoc, Payload, ReportFormat, RunManifest,
    SampleEncoding, SignalFormat,
};
use crate::simharness::{compare_methods, run_experiment_with_threads, ExperimentConfig};
use crate::synthesis::{fgn_to_fbm, generate_fgn, FgnSpec, Signal};
use crate::transform::{dwt, level_acf, max_level, ndwt, WaveletFilter};

/// Environment variable capping Monte Carlo worker threads (0 = automatic).
pub const THREADS_ENV: &str = "HURSTLAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "hurstlab",
    version,
    about = "Hurst exponent estimation from wavelet spectra"
)]
pub struct Cli {
    /// Random seed (synthesis, MEDLA resampling, simulation base seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format: text|bin for `synth`, json|csv elsewhere.
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Suppress the summary printed to stdout.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate fractional Gaussian noise or fractional Brownian motion.
    Synth(SynthArgs),
    /// Wavelet-decompose a signal.
    Transform(TransformArgs),
    /// Autocorrelation of one decomposition level.
    Acf(AcfArgs),
    /// Estimate the Hurst exponent of a signal.
    Estimate(EstimateArgs),
    /// Closed-form medians and variances of the median estimators.
    Theory(TheoryArgs),
    /// Monte Carlo comparison of all estimators on synthetic fBm.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PathKind {
    Fgn,
    Fbm,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum TransformMode {
    Ndwt,
    Dwt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AcfSeries {
    /// Raw detail coefficients.
    Coeff,
    /// Squared coefficients (the Traditional method's summands).
    Energy,
    /// log2 mid-energies (Soltani).
    MidEnergy,
    /// ln of squared coefficients (MEDL).
    LogEnergy,
    /// ln of resampled pair-averaged energies (MEDLA).
    PairLog,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input signal file.
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Input encoding: auto|text|csv|bin.
    #[arg(long, default_value = "auto")]
    pub in_format: String,

    /// CSV column name (default: first numeric column).
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value = "fbm")]
    pub kind: PathKind,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    /// Decomposition depth (default: J - 1).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "ndwt")]
    pub mode: TransformMode,
}

#[derive(Debug, Args)]
pub struct AcfArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Level j (J - 1 is the finest).
    #[arg(long, allow_hyphen_values = true)]
    pub level: i32,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "ndwt")]
    pub mode: TransformMode,
    #[arg(long, value_enum, default_value = "coeff")]
    pub series: AcfSeries,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// medl|medla|soltani|traditional|all, comma separated.
    #[arg(long, default_value = "all")]
    pub method: String,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    #[arg(long)]
    pub depth: Option<usize>,
    /// `jlo:jhi`, absolute (`4:9`) or relative to J (`Jm7:Jm2`).
    #[arg(long, default_value = "Jm7:Jm2")]
    pub levels: String,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub method: String,
    /// Values per level.
    #[arg(long)]
    pub n: usize,
    /// Number of levels in the regression.
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub level: i32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "0.3,0.5,0.7")]
    pub hurst: String,
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    #[arg(long, default_value_t = 300)]
    pub reps: usize,
    #[arg(long, default_value = "haar")]
    pub wavelet: String,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value = "Jm7:Jm2")]
    pub levels: String,
    #[arg(long, default_value = "all")]
    pub methods: String,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// CSV table with Mean/Variance/Bias-squared/MSE rows.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// Parse `args` (including the program name) and run.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let raw: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = Cli::try_parse_from(&raw).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => e.exit(),
        _ => HurstError::InvalidParameter(
            e.to_string()
                .lines()
                .next()
                .unwrap_or("usage error")
                .to_string(),
        ),
    })?;
    run(cli, &raw)
}

pub fn run(cli: Cli, raw_args: &[String]) -> Result<()> {
    let started = Instant::now();
    let ctx = Context {
        seed: cli.seed,
        format: cli.format.clone(),
        out: cli.out.clone(),
        quiet: cli.quiet,
        raw_args,
        started,
    };
    match &cli.command {
        Command::Synth(a) => synth(&ctx, a),
        Command::Transform(a) => transform(&ctx, a),
        Command::Acf(a) => acf(&ctx, a),
        Command::Estimate(a) => estimate(&ctx, a),
        Command::Theory(a) => theory(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
    }
}

struct Context<'a> {
    seed: Option<u64>,
    format: Option<String>,
    out: Option<PathBuf>,
    quiet: bool,
    raw_args: &'a [String],
    started: Instant,
}

impl Context<'_> {
    fn manifest(&self, config: serde_json::Value) -> RunManifest {
        RunManifest::new(self.raw_args, config)
    }

    fn finish(&self, manifest: &mut RunManifest) {
        manifest.finish(self.started.elapsed().as_secs_f64());
    }

    fn report_format(&self, default: ReportFormat) -> Result<ReportFormat> {
        self.format.as_deref().map_or(Ok(default), str::parse)
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    /// Write to `--out` or print to stdout.
    fn emit(
        &self,
        payload: Payload<'_>,
        format: ReportFormat,
        manifest: &RunManifest,
    ) -> Result<()> {
        match &self.out {
            Some(path) => write_report(payload, path, format, Some(manifest)),
            None => {
                print!(
                    "{}",
                    crate::io::render_report(payload, format, Some(manifest))?
                );
                Ok(())
            }
        }
    }
}

fn load(input: &InputArgs) -> Result<Signal> {
    let format: SignalFormat = input.in_format.parse()?;
    read_signal(&input.input, format, input.column.as_deref())
}

fn default_depth(n: usize, depth: Option<usize>) -> usize {
    depth.unwrap_or_else(|| max_level(n).saturating_sub(1).max(1))
}

fn synth(ctx: &Context, a: &SynthArgs) -> Result<()> {
    let seed = ctx.seed.unwrap_or(0);
    let spec = FgnSpec::new(a.hurst, a.n, a.sigma, seed)?;
    let noise = generate_fgn(&spec)?;
    let signal = match a.kind {
        PathKind::Fgn => noise,
        PathKind::Fbm => fgn_to_fbm(&noise),
    };
    let encoding = match ctx.format.as_deref().unwrap_or("text") {
        "text" | "txt" => SampleEncoding::Text,
        "bin" => SampleEncoding::Bin,
        other => {
            return Err(HurstError::UnsupportedFormat {
                format: other.into(),
                payload: "signal".into(),
            })
        }
    };
    let mut manifest = ctx.manifest(json!({
        "spec": spec,
        "kind": format!("{:?}", a.kind).to_lowercase(),
    }));
    ctx.finish(&mut manifest);
    match &ctx.out {
        Some(path) => {
            write_signal(path, &signal, encoding)?;
            crate::io::write_manifest_sidecar(path, &manifest)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&crate::io::encode_samples(signal.samples(), encoding))?;
        }
    }
    Ok(())
}

enum AnyDecomposition {
    Ndwt(crate::transform::NdwtDecomposition),
    Dwt(crate::transform::DwtDecomposition),
}

impl AnyDecomposition {
    fn level(&self, j: i32) -> Option<&[f64]> {
        match self {
            AnyDecomposition::Ndwt(d) => d.level(j),
            AnyDecomposition::Dwt(d) => d.level(j),
        }
    }
}

fn decompose(
    signal: &Signal,
    wavelet: &str,
    depth: Option<usize>,
    mode: TransformMode,
) -> Result<AnyDecomposition> {
    let filter = WaveletFilter::by_name(wavelet)?;
    let depth = default_depth(signal.len(), depth);
    Ok(match mode {
        TransformMode::Ndwt => AnyDecomposition::Ndwt(ndwt(signal, &filter, depth)?),
        TransformMode::Dwt => AnyDecomposition::Dwt(dwt(signal, &filter, depth)?),
    })
}

fn transform(ctx: &Context, a: &TransformArgs) -> Result<()> {
    let signal = load(&a.input)?;
    let decomp = decompose(&signal, &a.wavelet, a.depth, a.mode)?;
    let doc = match &decomp {
        AnyDecomposition::Ndwt(d) => DecompositionDoc::from_ndwt(d),
        AnyDecomposition::Dwt(d) => DecompositionDoc::from_dwt(d, &a.wavelet.to_ascii_lowercase()),
    };
    let mut manifest = ctx.manifest(json!({
        "wavelet": doc.wavelet, "depth": doc.depth, "mode": doc.mode,
    }));
    manifest.add_input(&a.input.input, &signal);
    ctx.finish(&mut manifest);
    let format = ctx.report_format(ReportFormat::Json)?;
    ctx.emit(Payload::Decomposition(&doc), format, &manifest)
}

fn acf(ctx: &Context, a: &AcfArgs) -> Result<()> {
    let signal = load(&a.input)?;
    let decomp = decompose(&signal, &a.wavelet, a.depth, a.mode)?;
    let missing = || HurstError::RangeInvalid {
        j_lo: a.level,
        j_hi: a.level,
        reason: "level not present in the decomposition".into(),
    };
    let coeffs = decomp.level(a.level).ok_or_else(missing)?;
    let series: Vec<f64> = match (a.series, &decomp) {
        (AcfSeries::Coeff, _) => coeffs.to_vec(),
        (AcfSeries::Energy, _) => coeffs.iter().map(|d| d * d).collect(),
        (AcfSeries::LogEnergy, _) => coeffs.iter().map(|d| (d * d).ln()).collect(),
        (AcfSeries::MidEnergy, AnyDecomposition::Ndwt(d)) => {
            level_series(d, Method::Soltani, a.level, 0)?
        }
        (AcfSeries::PairLog, AnyDecomposition::Ndwt(d)) => {
            level_series(d, Method::Medla, a.level, ctx.seed.unwrap_or(0))?
        }
        _ => {
            return Err(HurstError::InvalidParameter(
                "mid-energy and pair-log series need --mode ndwt".into(),
            ))
        }
    };
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(HurstError::DegenerateLevel {
            level: a.level,
            excluded: i,
            total: series.len(),
        });
    }
    let r = level_acf(&series, a.max_lag)?;
    let mut manifest = ctx.manifest(json!({
        "wavelet": a.wavelet, "level": a.level, "max_lag": a.max_lag,
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "series": format!("{:?}", a.series).to_lowercase(),
    }));
    manifest.add_input(&a.input.input, &signal);
    ctx.finish(&mut manifest);
    let format = ctx.report_format(ReportFormat::Csv)?;
    ctx.emit(Payload::Acf(&r), format, &manifest)
}

fn estimate(ctx: &Context, a: &EstimateArgs) -> Result<()> {
    let signal = load(&a.input)?;
    let filter = WaveletFilter::by_name(&a.wavelet)?;
    let depth = default_depth(signal.len(), a.depth);
    let decomp = ndwt(&signal, &filter, depth)?;
    let range = LevelRange::parse(&a.levels, decomp.j_max())?;
    let methods = Method::parse_list(&a.method)?;
    let seed = ctx.seed.unwrap_or(0);
    let estimates = methods
        .iter()
        .map(|&m| estimate_hurst(&decomp, m, range, Some(seed)))
        .collect::<Result<Vec<_>>>()?;

    let mut manifest = ctx.manifest(json!({
        "wavelet": filter.name, "depth": depth, "levels": range,
        "methods": methods, "seed": seed, "j_max": decomp.j_max(),
    }));
    manifest.add_input(&a.input.input, &signal);
    ctx.finish(&mut manifest);
    if ctx.out.is_some() {
        for e in &estimates {
            ctx.say(format!("{:<12} H = {:.4}", e.method.label(), e.hurst));
        }
    }
    let format = ctx.report_format(ReportFormat::Json)?;
    ctx.emit(Payload::Estimates(&estimates), format, &manifest)
}

fn theory(ctx: &Context, a: &TheoryArgs) -> Result<()> {
    let method: Method = a.method.parse()?;
    if a.sigma2.is_nan() || a.sigma2 <= 0.0 {
        return Err(HurstError::InvalidParameter(
            "sigma2 must be positive".into(),
        ));
    }
    let law = hurst_sampling_law(method, a.n, a.m)?;
    let median_variance = match method {
        Method::Medl => medl_median_variance(a.n)?,
        _ => medla_median_variance(a.n)?,
    };
    let population_median = a.hurst.map(|h| match method {
        Method::Medl => medl_population_median(h, a.sigma2, a.level),
        _ => medla_population_median(h, a.sigma2, a.level),
    });
    let doc = json!({
        "method": method,
        "n": a.n,
        "m": a.m,
        "constants": { "q": q_constant(), "a": a_constant() },
        "level_median_variance": median_variance,
        "hurst_law": {
            "mean": a.hurst,
            "variance": law.variance,
            "std_dev": law.std_dev(),
        },
        "population_median": population_median.map(|y| json!({
            "hurst": a.hurst, "sigma2": a.sigma2, "level": a.level, "value": y,
        })),
        "note": law.note,
    });
    let mut manifest = ctx.manifest(json!({ "method": method, "n": a.n, "m": a.m }));
    ctx.finish(&mut manifest);
    ctx.emit(Payload::Document(&doc), ReportFormat::Json, &manifest)
}

fn thread_cap() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().map_err(|_| {
            HurstError::InvalidParameter(format!("{THREADS_ENV} must be a non-negative integer"))
        }),
        _ => Ok(0),
    }
}

fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<()> {
    let hursts = a
        .hurst
        .split(',')
        .map(|h| {
            h.trim()
                .parse::<f64>()
                .map_err(|_| HurstError::InvalidParameter(format!("bad hurst value `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let config = ExperimentConfig {
        hursts,
        n: a.n,
        reps: a.reps,
        wavelet: a.wavelet.to_ascii_lowercase(),
        depth: a.depth,
        levels: LevelRange::parse(&a.levels, max_level(a.n))?,
        methods: Method::parse_list(&a.methods)?,
        base_seed: ctx.seed.unwrap_or(0),
        sigma: a.sigma,
    };
    let report = run_experiment_with_threads(&config, thread_cap()?)?;
    let ranking = if config.methods.len() >= 2 {
        Some(compare_methods(&report)?)
    } else {
        None
    };
    let diagnostics = report
        .cells
        .iter()
        .filter(|c| c.method.uses_natural_log() && c.estimates.len() >= 30)
        .map(|c| {
            let law = hurst_sampling_law(c.method, config.n, config.levels.count())?;
            let fitted = normality_diagnostics(&c.estimates, NormalLaw::fitted(&c.estimates))?;
            let asymptotic = normality_diagnostics(&c.estimates, law.centered_at(c.hurst))?;
            Ok(json!({
                "hurst": c.hurst,
                "method": c.method,
                "asymptotic_law": law,
                "against_fitted_normal": fitted,
                "against_asymptotic_law": asymptotic,
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut manifest = ctx.manifest(serde_json::to_value(&config)?);
    ctx.finish(&mut manifest);

    for h in &config.hursts {
        let line: Vec<String> = report
            .cells
            .iter()
            .filter(|c| c.hurst == *h)
            .map(|c| format!("{} {:.4} (mse {:.4})", c.method.label(), c.mean, c.mse))
            .collect();
        ctx.say(format!("H = {h}: {}", line.join(", ")));
    }

    let doc = json!({
        "report": report,
        "ranking": ranking,
        "normality": diagnostics,
    });
    if let Some(table) = &a.table {
        write_report(
            Payload::Simulation(&report),
            table,
            ReportFormat::Csv,
            Some(&manifest),
        )?;
    }
    match (&ctx.out, a.table.is_some()) {
        (Some(_), _) => ctx.emit(Payload::Document(&doc), ReportFormat::Json, &manifest),
        (None, true) => Ok(()),
        (None, false) => ctx.emit(
            Payload::Simulation(&report),
            ctx.report_format(ReportFormat::Csv)?,
            &manifest,
        ),
    }
}

/// Entry point for the binary: exit code 0 on success, 1 with a single
/// `error[category]: message` line on failure.
pub fn main_with_exit() -> ! {
    match run_from(std::env::args_os()) {
        Ok(()) => std::process::exit(0),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.category());
            std::process::exit(1)
        }
    }
}
