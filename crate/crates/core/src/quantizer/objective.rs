//! Quantizer design objectives: average output entropy and J-divergence.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::info::{entropy_of, j_of};
use super::pmf::{averaged_pmf_with_prior, expect_over_prior, fill_cell_masses};
use crate::error::{Error, Result};
use crate::model::{DesignAveraging, ScenarioConfig, ThresholdVector};
use crate::signal::{sample_amplitude, AmplitudePrior};

/// Absolute quadrature tolerance used for objective values.
pub const OBJECTIVE_QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    /// Maximum average entropy (MAE).
    AverageEntropy,
    /// Maximum J-divergence (MJD).
    JDivergence,
}

impl ObjectiveKind {
    pub fn tag(self) -> &'static str {
        match self {
            ObjectiveKind::AverageEntropy => "mae",
            ObjectiveKind::JDivergence => "mjd",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mae" => Ok(ObjectiveKind::AverageEntropy),
            "mjd" => Ok(ObjectiveKind::JDivergence),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

/// Average entropy `F_av = (F_H0 + F_H1) / 2` in bits.
///
/// `F_H1` is the expected per-sensor cell entropy over the design amplitude law,
/// or the entropy of the averaged H1 pmf under [`DesignAveraging::PooledPmf`].
pub fn average_entropy_objective(thresholds: &ThresholdVector, config: &ScenarioConfig) -> Result<f64> {
    let sigma = config.sigma();
    let prior = AmplitudePrior::design(config);
    let cuts = thresholds.cuts();
    let levels = thresholds.levels();
    let mut h0 = vec![0.0; levels];
    fill_cell_masses(cuts, 0.0, sigma, &mut h0);
    let f_h0 = entropy_of(&h0);

    let f_h1 = match config.design_averaging {
        DesignAveraging::PerAmplitude => {
            let v = expect_over_prior(&prior, 1, OBJECTIVE_QUADRATURE_TOL, |a, out| {
                let mut masses = [0.0; MAX_INLINE_LEVELS];
                out[0] = entropy_of(cells(cuts, a, sigma, &mut masses, levels));
            })?;
            v[0]
        }
        DesignAveraging::PooledPmf => {
            entropy_of(averaged_pmf_with_prior(thresholds, &prior, sigma)?.masses())
        }
    };
    Ok(0.5 * (f_h0 + f_h1))
}

/// Expected J-divergence between the conditional H1 pmf and the H0 pmf, in bits.
pub fn jd_objective(thresholds: &ThresholdVector, config: &ScenarioConfig) -> Result<f64> {
    let sigma = config.sigma();
    let prior = AmplitudePrior::design(config);
    let cuts = thresholds.cuts();
    let levels = thresholds.levels();
    let mut h0 = vec![0.0; levels];
    fill_cell_masses(cuts, 0.0, sigma, &mut h0);

    match config.design_averaging {
        DesignAveraging::PerAmplitude => {
            let v = expect_over_prior(&prior, 1, OBJECTIVE_QUADRATURE_TOL, |a, out| {
                let mut masses = [0.0; MAX_INLINE_LEVELS];
                out[0] = j_of(cells(cuts, a, sigma, &mut masses, levels), &h0);
            })?;
            Ok(v[0])
        }
        DesignAveraging::PooledPmf => {
            let h1 = averaged_pmf_with_prior(thresholds, &prior, sigma)?;
            Ok(j_of(h1.masses(), &h0))
        }
    }
}

pub fn objective_value(kind: ObjectiveKind, thresholds: &ThresholdVector, config: &ScenarioConfig) -> Result<f64> {
    match kind {
        ObjectiveKind::AverageEntropy => average_entropy_objective(thresholds, config),
        ObjectiveKind::JDivergence => jd_objective(thresholds, config),
    }
}

const MAX_INLINE_LEVELS: usize = 64;

fn cells<'a>(cuts: &[f64], mean: f64, sigma: f64, buf: &'a mut [f64; MAX_INLINE_LEVELS], levels: usize) -> &'a [f64] {
    assert!(levels <= MAX_INLINE_LEVELS, "at most {MAX_INLINE_LEVELS} quantizer levels supported");
    let out = &mut buf[..levels];
    fill_cell_masses(cuts, mean, sigma, out);
    out
}

/// Monte Carlo ("histogram") estimate of an objective.
///
/// Draws `samples` amplitudes from the design law and a noise realization per
/// draw, bins the resulting observations (and `samples` noise-only observations),
/// and evaluates the objective on the empirical pmfs. With
/// [`DesignAveraging::PerAmplitude`] the H1 term cannot be estimated from
/// pooled bins, so the pooled reading is used regardless.
pub fn histogram_objective(
    kind: ObjectiveKind,
    thresholds: &ThresholdVector,
    config: &ScenarioConfig,
    samples: usize,
    seed: u64,
) -> f64 {
    let sigma = config.sigma();
    let prior = AmplitudePrior::design(config);
    let levels = thresholds.levels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h0 = vec![0u64; levels];
    let mut h1 = vec![0u64; levels];
    for _ in 0..samples {
        let eps: f64 = rng.sample(StandardNormal);
        h0[thresholds.quantize(sigma * eps) - 1] += 1;
        let a = sample_amplitude(rng.random::<f64>(), &prior);
        let eps: f64 = rng.sample(StandardNormal);
        h1[thresholds.quantize(a + sigma * eps) - 1] += 1;
    }
    let n = samples as f64;
    let p0: Vec<f64> = h0.iter().map(|&c| c as f64 / n).collect();
    let p1: Vec<f64> = h1.iter().map(|&c| c as f64 / n).collect();
    match kind {
        ObjectiveKind::AverageEntropy => 0.5 * (entropy_of(&p0) + entropy_of(&p1)),
        ObjectiveKind::JDivergence => j_of(&p1, &p0),
    }
}
