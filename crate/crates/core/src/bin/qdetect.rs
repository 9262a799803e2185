use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdetect::channel::ChannelParams;
use qdetect::error::{Error, Result};
use qdetect::experiment::{
    design_record, fading_sweep, reproduce_tables, run_roc, write_gain_csv, write_roc_csv, ExperimentSpec,
    QuantizerMethod, TableOptions,
};
use qdetect::fusion::{FusionMode, SymbolSummand};
use qdetect::model::{AmplitudeLaw, DesignAveraging, ScenarioConfig, ThresholdVector};
use qdetect::quantizer::{
    kth_root_quantizer, optimize_thresholds, CacheKey, CacheRecord, ObjectiveKind, OptimizerSettings, ThresholdCache,
};

/// Smallest trial count accepted for reported curves.
const MIN_REPORTED_TRIALS: usize = 1000;

#[derive(Parser)]
#[command(name = "qdetect", version, about = "Quantized distributed detection of a point source")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design quantizer thresholds.
    Optimize(OptimizeArgs),
    /// Simulate one ROC curve.
    Roc(RocArgs),
    /// DDT detection table for MAE and MJD quantizers, with gains.
    Tables(TablesArgs),
    /// MAE quantizers over the Rayleigh channel under both fusion rules.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// a_max^2 / sigma^2 in dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Number of sensors K.
    #[arg(long, default_value_t = 25)]
    sensors: usize,
    /// Amplitude ratio L = A_max / A_min.
    #[arg(long, default_value_t = 10.0)]
    ratio_l: f64,
    #[arg(long, default_value_t = 1.0)]
    a_max: f64,
    /// Amplitude law of the simulated source and of the fusion likelihoods.
    #[arg(long, value_enum, default_value_t = Law::LogUniform)]
    amplitude_law: Law,
    /// Amplitude law averaged over by the design objectives.
    #[arg(long, value_enum, default_value_t = Law::UniformDisk)]
    design_law: Law,
    /// Average the per-amplitude objective, or evaluate it on the averaged pmf.
    #[arg(long, value_enum, default_value_t = Averaging::PerAmplitude)]
    design_averaging: Averaging,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    LogUniform,
    UniformDisk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Averaging {
    PerAmplitude,
    Pooled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Mae,
    Mjd,
    Kthroot,
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Channel {
    Ddt,
    Rayleigh,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fusion {
    Optimal,
    Suboptimal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Summand {
    Index,
    Llr,
}

impl ScenarioArgs {
    fn config(&self, levels: usize) -> Result<ScenarioConfig> {
        let law = |l: Law| match l {
            Law::LogUniform => AmplitudeLaw::LogUniform,
            Law::UniformDisk => AmplitudeLaw::UniformDisk,
        };
        let cfg = ScenarioConfig {
            snr_db: self.snr_db,
            sensor_count: self.sensors,
            amplitude_ratio: self.ratio_l,
            levels,
            a_max: self.a_max,
            amplitude_law: law(self.amplitude_law),
            design_law: law(self.design_law),
            design_averaging: match self.design_averaging {
                Averaging::PerAmplitude => DesignAveraging::PerAmplitude,
                Averaging::Pooled => DesignAveraging::PooledPmf,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// mae or mjd; kthroot prints the binary K-th root cut for each --pfa-grid target.
    #[arg(long, value_enum, default_value_t = Method::Mae)]
    method: Method,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pfa_grid: Vec<f64>,
    /// Override the default grid step (in units of sigma).
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    refine_passes: Option<usize>,
    /// Store the designed thresholds in this cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 2)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = Method::Mae)]
    method: Method,
    /// With `none`, the non-quantized DDT curve is produced as the reference.
    #[arg(long, value_enum, default_value_t = Channel::Ddt)]
    channel: Channel,
    #[arg(long, value_enum, default_value_t = Fusion::Optimal)]
    fusion: Fusion,
    /// P sigma_h^2 / sigma_n^2 in dB, with P = sigma_h^2 = 1.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    channel_snr_db: f64,
    /// Summands of the sub-optimal rule.
    #[arg(long, value_enum, default_value_t = Summand::Index)]
    summand: Summand,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
    pfa_grid: Vec<f64>,
    /// Explicit comma-separated thresholds.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    thresholds: Option<Vec<f64>>,
    /// Lower-cell H0 mass of the K-th root quantizer, instead of the per-target rule.
    #[arg(long)]
    kth_root_mass: Option<f64>,
    /// Threshold cache consulted for MAE/MJD; missing designs are computed.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
    levels: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
    pfa_grid: Vec<f64>,
    #[arg(long, default_value = "thresholds.cache")]
    cache: PathBuf,
    /// Design and store any thresholds missing from the cache first.
    #[arg(long)]
    fill_cache: bool,
    /// CSV of every simulated ROC point.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the gain rows.
    #[arg(long)]
    gain_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
    levels: Vec<usize>,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    channel_snr_db: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.99")]
    pfa_grid: Vec<f64>,
    #[arg(long, default_value = "thresholds.cache")]
    cache: PathBuf,
    #[arg(long)]
    fill_cache: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_REPORTED_TRIALS {
        return Err(Error::Config(format!("at least {MIN_REPORTED_TRIALS} trials are required, got {trials}")));
    }
    Ok(())
}

fn objective_of(method: Method) -> Result<ObjectiveKind> {
    match method {
        Method::Mae => Ok(ObjectiveKind::AverageEntropy),
        Method::Mjd => Ok(ObjectiveKind::JDivergence),
        _ => Err(Error::Config("threshold design needs --method mae or mjd".into())),
    }
}

fn optimize(args: &OptimizeArgs) -> Result<()> {
    let cfg = args.scenario.config(args.levels)?;
    if args.method == Method::Kthroot {
        for &p in &args.pfa_grid {
            let (t, p0) = kth_root_quantizer(p, &cfg)?;
            println!("pfa={p} no_alarm_mass={p0} cuts={t}");
        }
        return Ok(());
    }
    let kind = objective_of(args.method)?;
    let mut settings = OptimizerSettings::default_for(kind, cfg.levels, cfg.sigma());
    if let Some(step) = args.grid_step {
        settings.grid_step = step * cfg.sigma();
    }
    if let Some(passes) = args.refine_passes {
        settings.refine_passes = passes;
    }
    let r = optimize_thresholds(kind, &cfg, &settings)?;
    println!("method={kind} levels={} cuts={} objective={}", cfg.levels, r.thresholds, r.objective);
    if let Some(path) = &args.cache {
        let mut cache = ThresholdCache::load(path)?;
        cache.insert(CacheRecord {
            key: CacheKey::for_config(kind, &cfg),
            thresholds: r.thresholds,
            objective: r.objective,
            design_law: cfg.design_law,
            averaging: cfg.design_averaging,
            settings: settings.fingerprint(),
        });
        cache.save(path)?;
    }
    Ok(())
}

fn roc(args: &RocArgs) -> Result<()> {
    check_trials(args.trials)?;
    let cfg = args.scenario.config(args.levels)?;
    let (method, fusion) = match (args.method, args.channel, args.fusion) {
        (Method::None, _, _) => (QuantizerMethod::NonQuantized, FusionMode::DdtNonQuantized),
        (m, Channel::Ddt, _) => (quantizer_method(m), FusionMode::DdtQuantized),
        (m, Channel::Rayleigh, Fusion::Optimal) => (quantizer_method(m), FusionMode::FadingOptimal),
        (m, Channel::Rayleigh, Fusion::Suboptimal) => (quantizer_method(m), FusionMode::FadingSubOptimal),
    };
    let mut spec = ExperimentSpec::new(cfg, method, fusion)
        .with_trials(args.trials, args.seed)
        .with_pfa_grid(args.pfa_grid.clone());
    if fusion.is_fading() {
        spec = spec.with_channel(ChannelParams::from_channel_snr_db(args.channel_snr_db, cfg.levels)?);
    }
    spec.summand = match args.summand {
        Summand::Index => SymbolSummand::Index,
        Summand::Llr => SymbolSummand::LogLikelihoodRatio,
    };
    spec.kth_root_mass = args.kth_root_mass;
    if let Some(cuts) = &args.thresholds {
        spec.thresholds = Some(ThresholdVector::for_levels(cuts.clone(), cfg.levels)?);
    } else if let (Some(kind), Some(path)) = (method.objective(), &args.cache) {
        let mut cache = ThresholdCache::load(path)?;
        match cache.thresholds_for(kind, &cfg) {
            Ok(r) => spec.thresholds = Some(r.thresholds.clone()),
            Err(Error::MissingCacheEntry(_)) => {
                let record = design_record(kind, &cfg)?;
                spec.thresholds = Some(record.thresholds.clone());
                cache.insert(record);
                cache.save(path)?;
            }
            Err(e) => return Err(e),
        }
    }
    let curve = run_roc(&spec)?;
    let mut out = output(&args.out)?;
    write_roc_csv(&[curve], &mut out)?;
    out.flush()?;
    Ok(())
}

fn quantizer_method(m: Method) -> QuantizerMethod {
    match m {
        Method::Mae => QuantizerMethod::Mae,
        Method::Mjd => QuantizerMethod::Mjd,
        Method::Kthroot => QuantizerMethod::KthRoot,
        Method::None => QuantizerMethod::NonQuantized,
    }
}

/// Loads the cache and, if asked, designs whatever `kinds x levels` is missing.
fn prepared_cache(path: &Path, base: &ScenarioConfig, levels: &[usize], kinds: &[ObjectiveKind], fill: bool) -> Result<ThresholdCache> {
    let mut cache = ThresholdCache::load(path)?;
    if fill {
        let mut changed = false;
        for &m in levels {
            let cfg = base.with_levels(m);
            for &kind in kinds {
                if cache.thresholds_for(kind, &cfg).is_err() {
                    eprintln!("designing {kind} thresholds for {m} levels");
                    cache.insert(design_record(kind, &cfg)?);
                    changed = true;
                }
            }
        }
        if changed {
            cache.save(path)?;
        }
    }
    Ok(cache)
}

fn tables(args: &TablesArgs) -> Result<()> {
    check_trials(args.trials)?;
    let base = args.scenario.config(2)?;
    let kinds = [ObjectiveKind::AverageEntropy, ObjectiveKind::JDivergence];
    let cache = prepared_cache(&args.cache, &base, &args.levels, &kinds, args.fill_cache)?;
    let options = TableOptions { levels: args.levels.clone(), pfa_grid: args.pfa_grid.clone(), trials: args.trials, seed: args.seed };
    let report = reproduce_tables(&base, &cache, &options)?;
    print!("{}", report.render());
    if let Some(path) = &args.out {
        let mut curves = report.curves.clone();
        curves.push(report.nonquantized.clone());
        write_roc_csv(&curves, BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &args.gain_out {
        write_gain_csv(&report, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    check_trials(args.trials)?;
    let base = args.scenario.config(2)?;
    let cache = prepared_cache(&args.cache, &base, &args.levels, &[ObjectiveKind::AverageEntropy], args.fill_cache)?;
    let options = TableOptions { levels: args.levels.clone(), pfa_grid: args.pfa_grid.clone(), trials: args.trials, seed: args.seed };
    let curves = fading_sweep(&base, &cache, args.channel_snr_db, &options)?;
    let mut out = output(&args.out)?;
    write_roc_csv(&curves, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Roc(a) => roc(a),
        Command::Tables(a) => tables(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
