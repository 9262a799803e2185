//! Non-coherent M-FSK over a Rayleigh block-fading link.
//!
//! Symbol `m` is the basis vector `e_m` scaled by `sqrt(P_k)`. The fusion
//! center receives `y = h sqrt(P_k) e_m + n` with `h ~ CN(0, sigma_h^2)` and
//! `n ~ CN(0, sigma_n^2 I)`, so conditioned on the symbol `y` is zero-mean
//! complex Gaussian with diagonal covariance: `P_k sigma_h^2 + sigma_n^2` on
//! entry `m` and `sigma_n^2` elsewhere. Only the squared envelopes `|y_j|^2`
//! matter for detection.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Received data-symbol power `P_k`.
    pub received_power: f64,
    pub fading_variance: f64,
    pub noise_variance: f64,
    pub levels: usize,
}

impl ChannelParams {
    pub fn new(received_power: f64, fading_variance: f64, noise_variance: f64, levels: usize) -> Result<Self> {
        let p = ChannelParams { received_power, fading_variance, noise_variance, levels };
        p.validate()?;
        Ok(p)
    }

    /// Unit power and fading variance with noise set from the channel SNR
    /// `P_k sigma_h^2 / sigma_n^2` in dB.
    pub fn from_channel_snr_db(channel_snr_db: f64, levels: usize) -> Result<Self> {
        Self::new(1.0, 1.0, 10f64.powf(-channel_snr_db / 10.0), levels)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.received_power >= 0.0 && self.received_power.is_finite()) {
            return Err(Error::Config(format!("received power must be >= 0, got {}", self.received_power)));
        }
        if !(self.fading_variance > 0.0 && self.fading_variance.is_finite()) {
            return Err(Error::Config(format!("fading variance must be positive, got {}", self.fading_variance)));
        }
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::Config(format!("noise variance must be positive, got {}", self.noise_variance)));
        }
        if self.levels < 2 {
            return Err(Error::Config(format!("M-FSK needs at least 2 tones, got {}", self.levels)));
        }
        Ok(())
    }

    /// Average received signal energy `P_k sigma_h^2`.
    pub fn signal_energy(&self) -> f64 {
        self.received_power * self.fading_variance
    }

    /// `P_k sigma_h^2 / sigma_n^2` in dB.
    pub fn channel_snr_db(&self) -> f64 {
        10.0 * (self.signal_energy() / self.noise_variance).log10()
    }

    fn check_symbol(&self, symbol: usize) -> Result<()> {
        if symbol < 1 || symbol > self.levels {
            return Err(Error::Domain(format!("symbol {symbol} outside 1..={}", self.levels)));
        }
        Ok(())
    }
}

/// Received vector for one sensor, with its squared envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelObservation {
    vector: Vec<Complex64>,
    envelopes: Vec<f64>,
}

impl ChannelObservation {
    pub fn new(vector: Vec<Complex64>) -> Self {
        let envelopes = vector.iter().map(|z| z.norm_sqr()).collect();
        ChannelObservation { vector, envelopes }
    }

    /// Observation from envelopes alone; the phases are set to zero.
    pub fn from_envelopes(envelopes: &[f64]) -> Self {
        Self::new(envelopes.iter().map(|e| Complex64::new(e.max(0.0).sqrt(), 0.0)).collect())
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    pub fn envelopes(&self) -> &[f64] {
        &self.envelopes
    }

    pub fn levels(&self) -> usize {
        self.vector.len()
    }
}

/// Baseband FSK symbol `sqrt(P_k) e_m` for the 1-based symbol `m`.
pub fn modulate(symbol: usize, params: &ChannelParams) -> Result<Vec<f64>> {
    params.check_symbol(symbol)?;
    let mut v = vec![0.0; params.levels];
    v[symbol - 1] = params.received_power.sqrt();
    Ok(v)
}

fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Sends one symbol through the fading channel.
pub fn transmit<R: Rng + ?Sized>(symbol: usize, params: &ChannelParams, rng: &mut R) -> Result<ChannelObservation> {
    params.check_symbol(symbol)?;
    let h = complex_gaussian(params.fading_variance, rng);
    let amplitude = params.received_power.sqrt();
    let vector = (1..=params.levels)
        .map(|j| {
            let noise = complex_gaussian(params.noise_variance, rng);
            if j == symbol {
                h * amplitude + noise
            } else {
                noise
            }
        })
        .collect();
    Ok(ChannelObservation::new(vector))
}

/// Symbol-dependent part of the log-likelihood,
/// `g |y_m|^2 - ln(1 + P sigma_h^2 / sigma_n^2)` with
/// `g = P sigma_h^2 / (sigma_n^2 (P sigma_h^2 + sigma_n^2))`, for every symbol.
pub(crate) fn symbol_log_likelihood_offsets(obs: &ChannelObservation, params: &ChannelParams, out: &mut [f64]) {
    let s = params.signal_energy();
    let n = params.noise_variance;
    let gain = s / (n * (s + n));
    let penalty = (s / n).ln_1p();
    for (slot, &e) in out.iter_mut().zip(obs.envelopes()) {
        *slot = gain * e - penalty;
    }
}

/// Log density of the received vector given symbol `m`: zero-mean circular
/// complex Gaussian with the symbol's diagonal covariance.
pub fn symbol_log_likelihood(obs: &ChannelObservation, symbol: usize, params: &ChannelParams) -> Result<f64> {
    params.check_symbol(symbol)?;
    if obs.levels() != params.levels {
        return Err(Error::Domain(format!(
            "observation has {} tones, channel has {}",
            obs.levels(),
            params.levels
        )));
    }
    let n = params.noise_variance;
    let m = params.levels as f64;
    let total_energy: f64 = obs.envelopes().iter().sum();
    let base = -m * (std::f64::consts::PI * n).ln() - total_energy / n;
    let s = params.signal_energy();
    let e = obs.envelopes()[symbol - 1];
    Ok(base + s / (n * (s + n)) * e - (s / n).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(p: f64, noise: f64, m: usize) -> ChannelParams {
        ChannelParams::new(p, 1.0, noise, m).unwrap()
    }

    #[test]
    fn modulate_basis_vectors() {
        assert_eq!(modulate(2, &params(1.0, 1.0, 4)).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(modulate(1, &params(4.0, 1.0, 2)).unwrap(), vec![2.0, 0.0]);
        assert!(matches!(modulate(5, &params(1.0, 1.0, 4)), Err(Error::Domain(_))));
        assert!(modulate(0, &params(1.0, 1.0, 4)).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ChannelParams::new(1.0, 0.0, 1.0, 2).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 0.0, 2).is_err());
        assert!(ChannelParams::new(-1.0, 1.0, 1.0, 2).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 1.0, 1).is_err());
        let p = ChannelParams::from_channel_snr_db(10.0, 4).unwrap();
        assert!((p.channel_snr_db() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_limit_concentrates_energy() {
        let p = params(1.0, 1e-12, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in 1..=4 {
            let obs = transmit(m, &p, &mut rng).unwrap();
            let peak = obs.envelopes()[m - 1];
            let others: f64 = obs.envelopes().iter().enumerate().filter(|(j, _)| *j != m - 1).map(|(_, e)| e).sum();
            assert!(peak > 1e4 * others, "symbol {m}: {peak} vs {others}");
        }
    }

    #[test]
    fn envelope_moments_match_covariance() {
        let p = params(2.0, 0.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 1_000_000;
        let mut sum = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for _ in 0..n {
            let obs = transmit(2, &p, &mut rng).unwrap();
            for j in 0..3 {
                let e = obs.envelopes()[j];
                sum[j] += e;
                sq[j] += e * e;
            }
        }
        let expected = [0.5, 2.0 * 1.0 + 0.5, 0.5];
        for j in 0..3 {
            let mean = sum[j] / n as f64;
            let var = sq[j] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - expected[j]).abs() < 3.0 * se, "tone {j}: {mean} vs {}", expected[j]);
        }
    }

    #[test]
    fn uninformative_channel_gives_flat_likelihood() {
        let p = params(0.0, 1.0, 3);
        let obs = ChannelObservation::from_envelopes(&[0.3, 2.5, 0.9]);
        let l: Vec<f64> = (1..=3).map(|m| symbol_log_likelihood(&obs, m, &p).unwrap()).collect();
        assert!(l.iter().all(|v| (v - l[0]).abs() < 1e-15));
    }

    #[test]
    fn likelihood_argmax_follows_envelopes() {
        let p = params(1.0, 0.2, 3);
        let obs = ChannelObservation::from_envelopes(&[0.1, 2.0, 0.3]);
        let l: Vec<f64> = (1..=3).map(|m| symbol_log_likelihood(&obs, m, &p).unwrap()).collect();
        assert!(l[1] > l[0] && l[1] > l[2]);
    }

    #[test]
    fn log_likelihood_matches_density_formula() {
        // Direct evaluation of the complex Gaussian density with diagonal covariance.
        let p = params(1.5, 0.7, 2);
        let s = p.signal_energy();
        let y = vec![Complex64::new(0.4, -1.1), Complex64::new(-0.2, 0.3)];
        let obs = ChannelObservation::new(y.clone());
        for m in 1..=2 {
            let mut density = 1.0;
            for (j, z) in y.iter().enumerate() {
                let var = if j + 1 == m { s + p.noise_variance } else { p.noise_variance };
                density *= (-z.norm_sqr() / var).exp() / (std::f64::consts::PI * var);
            }
            let ll = symbol_log_likelihood(&obs, m, &p).unwrap();
            assert!((ll.exp() - density).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // M = 2: the density factorizes over tones and depends on |y_j|^2 only,
        // so integrate in polar coordinates over each tone: int 2 pi r f(r) dr.
        let p = params(1.0, 0.5, 2);
        let s = p.signal_energy();
        let n = p.noise_variance;
        let radial = |var: f64| {
            let (v, _) = crate::quadrature::integrate_scalar(
                |r| 2.0 * std::f64::consts::PI * r * (-r * r / var).exp() / (std::f64::consts::PI * var),
                0.0,
                40.0,
                1e-13,
                400,
            )
            .unwrap();
            v
        };
        let total = radial(s + n) * radial(n);
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn differences_depend_only_on_involved_envelopes() {
        let p = params(1.0, 0.3, 4);
        let a = ChannelObservation::from_envelopes(&[0.5, 1.5, 0.2, 0.9]);
        let b = ChannelObservation::from_envelopes(&[0.5, 1.5, 7.0, 0.01]);
        let diff = |o: &ChannelObservation| {
            symbol_log_likelihood(o, 1, &p).unwrap() - symbol_log_likelihood(o, 2, &p).unwrap()
        };
        assert!((diff(&a) - diff(&b)).abs() < 1e-12);
    }

    #[test]
    fn offsets_agree_with_full_likelihood_up_to_constant() {
        let p = params(1.0, 0.3, 3);
        let obs = ChannelObservation::from_envelopes(&[0.5, 1.5, 0.2]);
        let mut off = [0.0; 3];
        symbol_log_likelihood_offsets(&obs, &p, &mut off);
        let full: Vec<f64> = (1..=3).map(|m| symbol_log_likelihood(&obs, m, &p).unwrap()).collect();
        let c = full[0] - off[0];
        for m in 0..3 {
            assert!((full[m] - off[m] - c).abs() < 1e-12);
        }
    }
}
