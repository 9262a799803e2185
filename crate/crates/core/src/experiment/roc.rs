//! Monte Carlo ROC curves.
//!
//! Trials are simulated in fixed-size chunks. Chunk `c` under hypothesis `h`
//! draws from its own ChaCha8 stream of the master seed, so the sample of
//! statistics is the same whatever the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::calibrate::SortedSample;
use super::{ExperimentSpec, QuantizerMethod};
use crate::channel::{symbol_log_likelihood_offsets, transmit, ChannelParams};
use crate::error::Result;
use crate::fusion::{
    argmax_first, saturating_sum, symbol_llr_table, FadingLlr, FusionMode, NonQuantizedLlr, SymbolSummand,
};
use crate::model::{Hypothesis, RocCurve, RocMetadata, RocPoint, ThresholdVector};
use crate::quantizer::{averaged_pmf_h1, kth_root_from_mass, kth_root_quantizer, optimize_thresholds, pmf_h0, OptimizerSettings};
use crate::signal::generate_observations;

/// Trials per random stream.
pub const TRIAL_CHUNK: usize = 1000;

fn stream_id(hypothesis: Hypothesis, chunk: usize) -> u64 {
    let h = match hypothesis {
        Hypothesis::H0 => 0u64,
        Hypothesis::H1 => 1u64,
    };
    (h << 40) | chunk as u64
}

/// Per-trial statistic given the sensor observations and the trial's random stream.
trait TrialStatistic: Sync {
    fn evaluate(&self, values: &[f64], rng: &mut ChaCha8Rng) -> f64;
}

struct Unquantized(NonQuantizedLlr);

impl TrialStatistic for Unquantized {
    fn evaluate(&self, values: &[f64], _: &mut ChaCha8Rng) -> f64 {
        self.0.total(values)
    }
}

/// Quantized symbols fused directly or sent over the fading channel.
struct Quantized {
    thresholds: ThresholdVector,
    mode: FusionMode,
    summand: SymbolSummand,
    /// `ln(p1_m / p0_m)` per cell.
    table: Vec<f64>,
    fading: Option<(FadingLlr, Vec<ChannelParams>)>,
}

impl Quantized {
    /// `sum_m n_m ln(p1_m / p0_m)` in cell order, so equal count vectors give identical values.
    fn from_counts(&self, counts: &[usize]) -> f64 {
        saturating_sum(counts.iter().zip(&self.table).filter(|(&n, _)| n > 0).map(|(&n, &l)| n as f64 * l))
    }
}

impl TrialStatistic for Quantized {
    fn evaluate(&self, values: &[f64], rng: &mut ChaCha8Rng) -> f64 {
        let levels = self.thresholds.levels();
        match self.mode {
            FusionMode::DdtQuantized => {
                let mut counts = vec![0usize; levels];
                for &y in values {
                    counts[self.thresholds.quantize(y) - 1] += 1;
                }
                self.from_counts(&counts)
            }
            FusionMode::FadingOptimal => {
                let (llr, params) = self.fading.as_ref().expect("fading link prepared");
                let mut scratch = vec![0.0; levels];
                let terms = values.iter().zip(params).map(|(&y, p)| {
                    let obs = transmit(self.thresholds.quantize(y), p, rng).expect("symbol within range");
                    llr.sensor(&obs, p, &mut scratch)
                });
                saturating_sum(terms.collect::<Vec<_>>())
            }
            FusionMode::FadingSubOptimal => {
                let (_, params) = self.fading.as_ref().expect("fading link prepared");
                let mut offsets = vec![0.0; levels];
                let mut counts = vec![0usize; levels];
                for (&y, p) in values.iter().zip(params) {
                    let obs = transmit(self.thresholds.quantize(y), p, rng).expect("symbol within range");
                    symbol_log_likelihood_offsets(&obs, p, &mut offsets);
                    counts[argmax_first(&offsets)] += 1;
                }
                match self.summand {
                    SymbolSummand::Index => counts.iter().enumerate().map(|(m, &n)| (m * n) as f64).sum(),
                    SymbolSummand::LogLikelihoodRatio => self.from_counts(&counts),
                }
            }
            FusionMode::DdtNonQuantized => unreachable!("unquantized statistics use Unquantized"),
        }
    }
}

fn simulate<S: TrialStatistic>(spec: &ExperimentSpec, statistic: &S, hypothesis: Hypothesis) -> Vec<f64> {
    let chunks = spec.trials.div_ceil(TRIAL_CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(stream_id(hypothesis, c));
            let n = TRIAL_CHUNK.min(spec.trials - c * TRIAL_CHUNK);
            (0..n)
                .map(|_| {
                    let obs = generate_observations(hypothesis, &spec.scenario, &mut rng);
                    statistic.evaluate(&obs.values, &mut rng)
                })
                .collect()
        })
        .collect();
    parts.concat()
}

/// Calibrated operating points for the given targets.
fn operating_points<S: TrialStatistic>(spec: &ExperimentSpec, statistic: &S, targets: &[f64]) -> Result<Vec<RocPoint>> {
    let h0 = SortedSample::new(&simulate(spec, statistic, Hypothesis::H0))?;
    let h1 = SortedSample::new(&simulate(spec, statistic, Hypothesis::H1))?;
    targets
        .iter()
        .map(|&p_fa| {
            let (t, gamma) = h0.calibrate(p_fa)?;
            let p_d = h1.exceedance(t, gamma);
            Ok(RocPoint { p_fa, p_d, p_d_stderr: (p_d * (1.0 - p_d) / h1.len() as f64).sqrt() })
        })
        .collect()
}

fn quantized_statistic(spec: &ExperimentSpec, thresholds: ThresholdVector) -> Result<Quantized> {
    let p0 = pmf_h0(&thresholds, &spec.scenario);
    let p1 = averaged_pmf_h1(&thresholds, &spec.scenario)?;
    let table = symbol_llr_table(&p0, &p1)?;
    let fading = match &spec.channel {
        Some(ch) => {
            let params = match &spec.sensor_powers {
                Some(powers) => powers.iter().map(|&p| ChannelParams { received_power: p, ..*ch }).collect(),
                None => vec![*ch; spec.scenario.sensor_count],
            };
            Some((FadingLlr::new(&p0, &p1)?, params))
        }
        None => None,
    };
    Ok(Quantized { thresholds, mode: spec.fusion_mode, summand: spec.summand, table, fading })
}

/// Simulates `spec.trials` realizations under each hypothesis and reports the
/// detection probability at every target false-alarm rate.
///
/// Thresholds are calibrated on the simulated H0 statistics with boundary
/// randomization, and `p_d` is the expected alarm rate of that randomized rule
/// over the H1 sample.
pub fn run_roc(spec: &ExperimentSpec) -> Result<RocCurve> {
    spec.validate()?;
    let cfg = &spec.scenario;
    let points = match spec.quantizer_method {
        QuantizerMethod::NonQuantized => {
            let stat = Unquantized(NonQuantizedLlr::new(cfg, spec.quadrature_points)?);
            operating_points(spec, &stat, &spec.pfa_grid)?
        }
        QuantizerMethod::Mae | QuantizerMethod::Mjd => {
            let thresholds = match &spec.thresholds {
                Some(t) => t.clone(),
                None => {
                    let kind = spec.quantizer_method.objective().expect("entropy-based method");
                    let settings = OptimizerSettings::default_for(kind, cfg.levels, cfg.sigma());
                    optimize_thresholds(kind, cfg, &settings)?.thresholds
                }
            };
            operating_points(spec, &quantized_statistic(spec, thresholds)?, &spec.pfa_grid)?
        }
        QuantizerMethod::KthRoot => match (&spec.thresholds, spec.kth_root_mass) {
            (Some(t), _) => operating_points(spec, &quantized_statistic(spec, t.clone())?, &spec.pfa_grid)?,
            (None, Some(mass)) => {
                let t = kth_root_from_mass(mass, cfg)?;
                operating_points(spec, &quantized_statistic(spec, t)?, &spec.pfa_grid)?
            }
            (None, None) => {
                // The sensor threshold depends on the target, so each grid point is its own experiment.
                let mut points = Vec::with_capacity(spec.pfa_grid.len());
                for &p_fa in &spec.pfa_grid {
                    if p_fa <= 0.0 || p_fa >= 1.0 {
                        points.push(RocPoint { p_fa, p_d: p_fa, p_d_stderr: 0.0 });
                        continue;
                    }
                    let (t, _) = kth_root_quantizer(p_fa, cfg)?;
                    points.extend(operating_points(spec, &quantized_statistic(spec, t)?, &[p_fa])?);
                }
                points
            }
        },
    };
    let fusion = match spec.fusion_mode {
        FusionMode::DdtNonQuantized | FusionMode::DdtQuantized => "lrt",
        FusionMode::FadingOptimal => "optimal",
        FusionMode::FadingSubOptimal => "suboptimal",
    };
    let levels = if spec.quantizer_method == QuantizerMethod::NonQuantized { 0 } else { cfg.levels };
    RocCurve::new(
        points,
        RocMetadata {
            method: spec.quantizer_method.tag().to_string(),
            levels,
            channel: spec.channel_tag().to_string(),
            fusion: fusion.to_string(),
            trials: spec.trials,
            seed: spec.seed,
        },
    )
}
