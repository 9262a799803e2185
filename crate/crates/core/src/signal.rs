//! Point-source amplitude prior, sensor observation generation and Gaussian
//! helpers.
//!
//! Amplitudes under H1 are `A_k = a_max * alpha_k` with the attenuation folded
//! into the draw. Both supported laws have closed-form inverse CDFs, so every
//! expectation over the prior can be written as an integral over `u in [0, 1]`
//! of `g(F^{-1}(u))`.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf;

use crate::error::{Error, Result};
use crate::model::{AmplitudeLaw, Hypothesis, ScenarioConfig};

/// Distribution of the received amplitude at a sensor in range of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePrior {
    pub ratio: f64,
    pub a_max: f64,
    pub law: AmplitudeLaw,
}

impl AmplitudePrior {
    pub fn new(ratio: f64, a_max: f64, law: AmplitudeLaw) -> Result<Self> {
        if !(ratio >= 1.0 && ratio.is_finite()) {
            return Err(Error::Config(format!("amplitude ratio must be >= 1, got {ratio}")));
        }
        if !(a_max > 0.0 && a_max.is_finite()) {
            return Err(Error::Config(format!("a_max must be positive, got {a_max}")));
        }
        Ok(AmplitudePrior { ratio, a_max, law })
    }

    /// Log-uniform prior, density `1 / (a ln L)`.
    pub fn log_uniform(ratio: f64, a_max: f64) -> Result<Self> {
        Self::new(ratio, a_max, AmplitudeLaw::LogUniform)
    }

    /// Prior used to simulate observations and in fusion likelihoods.
    pub fn detection(config: &ScenarioConfig) -> Self {
        AmplitudePrior { ratio: config.amplitude_ratio, a_max: config.a_max, law: config.amplitude_law }
    }

    /// Prior over which quantizer design objectives are averaged.
    pub fn design(config: &ScenarioConfig) -> Self {
        AmplitudePrior { ratio: config.amplitude_ratio, a_max: config.a_max, law: config.design_law }
    }

    pub fn a_min(&self) -> f64 {
        self.a_max / self.ratio
    }

    /// `L = 1`: every sensor sees `a_max`.
    pub fn is_point_mass(&self) -> bool {
        self.ratio == 1.0
    }

    /// Inverse CDF; maps `u in [0, 1]` onto `[a_max / L, a_max]`.
    pub fn quantile(&self, u: f64) -> f64 {
        if self.is_point_mass() {
            return self.a_max;
        }
        let l = self.ratio;
        let a = match self.law {
            AmplitudeLaw::LogUniform => self.a_max * l.powf(u - 1.0),
            AmplitudeLaw::UniformDisk => self.a_max / (1.0 + (1.0 - u) * (l * l - 1.0)).sqrt(),
        };
        a.clamp(self.a_min(), self.a_max)
    }

    pub fn cdf(&self, a: f64) -> f64 {
        if a < self.a_min() {
            return 0.0;
        }
        if a >= self.a_max {
            return 1.0;
        }
        let l = self.ratio;
        match self.law {
            AmplitudeLaw::LogUniform => (a * l / self.a_max).ln() / l.ln(),
            AmplitudeLaw::UniformDisk => {
                let r = self.a_max / a;
                1.0 - (r * r - 1.0) / (l * l - 1.0)
            }
        }
    }
}

/// Prior density at `a`; zero outside `[a_max/L, a_max]`.
///
/// A point-mass prior (`L = 1`) has no density and yields [`Error::DegeneratePrior`].
pub fn amplitude_pdf(a: f64, prior: &AmplitudePrior) -> Result<f64> {
    if prior.is_point_mass() {
        return Err(Error::DegeneratePrior);
    }
    if a < prior.a_min() || a > prior.a_max {
        return Ok(0.0);
    }
    let l = prior.ratio;
    Ok(match prior.law {
        AmplitudeLaw::LogUniform => 1.0 / (a * l.ln()),
        AmplitudeLaw::UniformDisk => 2.0 * prior.a_max * prior.a_max / (a.powi(3) * (l * l - 1.0)),
    })
}

/// Draws an amplitude from a uniform variate by the inverse-CDF method.
pub fn sample_amplitude(u: f64, prior: &AmplitudePrior) -> f64 {
    prior.quantile(u.clamp(0.0, 1.0))
}

/// One snapshot of all sensor observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorObservations {
    pub values: Vec<f64>,
    pub hypothesis: Hypothesis,
    /// Per-sensor amplitudes; empty under H0.
    pub amplitudes: Vec<f64>,
}

/// Simulates `y_k = eps_k` (H0) or `y_k = A_k + eps_k` (H1) for every sensor.
pub fn generate_observations<R: Rng + ?Sized>(
    hypothesis: Hypothesis,
    config: &ScenarioConfig,
    rng: &mut R,
) -> SensorObservations {
    let sigma = config.sigma();
    let prior = AmplitudePrior::detection(config);
    let k = config.sensor_count;
    let mut values = Vec::with_capacity(k);
    let mut amplitudes = Vec::new();
    match hypothesis {
        Hypothesis::H0 => {
            for _ in 0..k {
                let eps: f64 = rng.sample(StandardNormal);
                values.push(sigma * eps);
            }
        }
        Hypothesis::H1 => {
            amplitudes.reserve(k);
            for _ in 0..k {
                let a = sample_amplitude(rng.random::<f64>(), &prior);
                let eps: f64 = rng.sample(StandardNormal);
                amplitudes.push(a);
                values.push(a + sigma * eps);
            }
        }
    }
    SensorObservations { values, hypothesis, amplitudes }
}

/// Standard normal CDF.
pub fn gaussian_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile, polished with Newton steps on [`gaussian_cdf`].
pub fn gaussian_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    for _ in 0..2 {
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density < 1e-300 {
            break;
        }
        x -= (gaussian_cdf(x) - p) / density;
    }
    x
}
