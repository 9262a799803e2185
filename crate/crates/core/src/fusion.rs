//! Fusion-center decision statistics.
//!
//! Every likelihood-ratio statistic is a sum of per-sensor terms computed in
//! the log domain. Statistics that can be infinite (a symbol impossible under
//! H0) are returned as `f64::INFINITY` and rank above all finite values.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::channel::{symbol_log_likelihood_offsets, ChannelObservation, ChannelParams};
use crate::error::{Error, Result};
use crate::model::{CellPmf, Hypothesis, ScenarioConfig};
use crate::quadrature::GaussLegendre;
use crate::signal::{AmplitudePrior, SensorObservations};

/// Default Gauss-Legendre order for the marginal amplitude integral.
pub const DEFAULT_QUADRATURE_POINTS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionMode {
    /// Unquantized observations delivered error-free.
    DdtNonQuantized,
    /// Quantized symbols delivered error-free, fused by the symbol LRT.
    DdtQuantized,
    /// Symbol-marginalized LRT on the received fading-channel vectors.
    FadingOptimal,
    /// ML symbol decisions followed by a counting rule.
    FadingSubOptimal,
}

impl FusionMode {
    pub fn tag(self) -> &'static str {
        match self {
            FusionMode::DdtNonQuantized => "ddt-nonquantized",
            FusionMode::DdtQuantized => "ddt-quantized",
            FusionMode::FadingOptimal => "optimal",
            FusionMode::FadingSubOptimal => "suboptimal",
        }
    }

    pub fn is_fading(self) -> bool {
        matches!(self, FusionMode::FadingOptimal | FusionMode::FadingSubOptimal)
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ddt-nonquantized" => Ok(FusionMode::DdtNonQuantized),
            "ddt-quantized" => Ok(FusionMode::DdtQuantized),
            "optimal" => Ok(FusionMode::FadingOptimal),
            "suboptimal" => Ok(FusionMode::FadingSubOptimal),
            other => Err(Error::Config(format!("unknown fusion mode `{other}`"))),
        }
    }
}

/// Per-symbol summands for the sub-optimal rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SymbolSummand {
    /// Zero-based symbol index; the alarm count when `M = 2`.
    #[default]
    Index,
    /// Log ratio of the averaged H1 and H0 cell masses.
    LogLikelihoodRatio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionStatistic {
    pub value: f64,
    pub mode: FusionMode,
}

/// Per-sensor marginal LLR of an unquantized observation, with the quadrature
/// rule and amplitude nodes prepared once.
#[derive(Debug, Clone)]
pub struct NonQuantizedLlr {
    sigma: f64,
    amplitudes: Vec<f64>,
    log_weights: Vec<f64>,
    point_mass: bool,
}

impl NonQuantizedLlr {
    pub fn new(config: &ScenarioConfig, quadrature_points: usize) -> Result<Self> {
        config.validate()?;
        if quadrature_points < 8 {
            return Err(Error::Config(format!("need at least 8 quadrature points, got {quadrature_points}")));
        }
        let prior = AmplitudePrior::detection(config);
        if prior.is_point_mass() {
            return Ok(NonQuantizedLlr {
                sigma: config.sigma(),
                amplitudes: vec![prior.a_max],
                log_weights: vec![0.0],
                point_mass: true,
            });
        }
        // Integrate over the prior's probability axis: int_0^1 exp(l(F^{-1}(u))) du.
        let rule = GaussLegendre::new(quadrature_points);
        Ok(NonQuantizedLlr {
            sigma: config.sigma(),
            amplitudes: rule.nodes().iter().map(|&u| prior.quantile(u)).collect(),
            log_weights: rule.weights().iter().map(|w| w.ln()).collect(),
            point_mass: false,
        })
    }

    /// `log E_A exp((A y - A^2/2) / sigma^2)`.
    pub fn sensor(&self, y: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        if self.point_mass {
            let a = self.amplitudes[0];
            return (a * y - 0.5 * a * a) / s2;
        }
        let exponent = |i: usize| {
            let a = self.amplitudes[i];
            self.log_weights[i] + (a * y - 0.5 * a * a) / s2
        };
        let peak = (0..self.amplitudes.len()).map(exponent).fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = (0..self.amplitudes.len()).map(|i| (exponent(i) - peak).exp()).sum();
        peak + sum.ln()
    }

    pub fn total(&self, values: &[f64]) -> f64 {
        values.iter().map(|&y| self.sensor(y)).sum()
    }
}

/// Marginal LLR of unquantized observations, averaging the Gaussian likelihood
/// over the amplitude prior.
pub fn llr_ddt_nonquantized(
    observations: &SensorObservations,
    config: &ScenarioConfig,
    quadrature_points: usize,
) -> Result<DecisionStatistic> {
    let llr = NonQuantizedLlr::new(config, quadrature_points)?;
    let value = llr.total(&observations.values);
    if value.is_nan() {
        return Err(Error::Integration { estimate: value, tolerance: 0.0 });
    }
    Ok(DecisionStatistic { value, mode: FusionMode::DdtNonQuantized })
}

/// `ln(p1_m / p0_m)` for every cell, with `+inf` where `p0_m = 0 < p1_m` and
/// `-inf` where `p1_m = 0 < p0_m`. Cells empty under both are given 0.
pub fn symbol_llr_table(pmf_h0: &CellPmf, pmf_h1: &CellPmf) -> Result<Vec<f64>> {
    if pmf_h0.levels() != pmf_h1.levels() {
        return Err(Error::Domain("pmfs have different numbers of cells".into()));
    }
    Ok(pmf_h0
        .masses()
        .iter()
        .zip(pmf_h1.masses())
        .map(|(&p0, &p1)| match (p0 > 0.0, p1 > 0.0) {
            (true, true) => (p1 / p0).ln(),
            (false, true) => f64::INFINITY,
            (true, false) => f64::NEG_INFINITY,
            (false, false) => 0.0,
        })
        .collect())
}

/// Sum of per-symbol values in which `+inf` dominates `-inf`.
pub(crate) fn saturating_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut total = 0.0;
    let mut neg_inf = false;
    for t in terms {
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        if t == f64::NEG_INFINITY {
            neg_inf = true;
        } else {
            total += t;
        }
    }
    if neg_inf {
        f64::NEG_INFINITY
    } else {
        total
    }
}

fn check_symbols(symbols: &[usize], levels: usize) -> Result<()> {
    match symbols.iter().find(|&&m| m < 1 || m > levels) {
        Some(m) => Err(Error::Domain(format!("symbol {m} outside 1..={levels}"))),
        None => Ok(()),
    }
}

/// Equal-gain symbol LRT: `sum_k ln(p1_{m_k} / p0_{m_k})`.
pub fn llr_ddt_quantized(symbols: &[usize], pmf_h0: &CellPmf, pmf_h1_avg: &CellPmf) -> Result<DecisionStatistic> {
    check_symbols(symbols, pmf_h0.levels())?;
    let table = symbol_llr_table(pmf_h0, pmf_h1_avg)?;
    let value = saturating_sum(symbols.iter().map(|&m| table[m - 1]));
    Ok(DecisionStatistic { value, mode: FusionMode::DdtQuantized })
}

/// Per-sensor terms of [`llr_fading_optimal`] with the pmfs held once.
#[derive(Debug, Clone)]
pub struct FadingLlr {
    p0: Vec<f64>,
    p1: Vec<f64>,
}

impl FadingLlr {
    pub fn new(pmf_h0: &CellPmf, pmf_h1_avg: &CellPmf) -> Result<Self> {
        if pmf_h0.levels() != pmf_h1_avg.levels() {
            return Err(Error::Domain("pmfs have different numbers of cells".into()));
        }
        Ok(FadingLlr { p0: pmf_h0.masses().to_vec(), p1: pmf_h1_avg.masses().to_vec() })
    }

    /// `ln sum_m f(y|m) p1_m - ln sum_m f(y|m) p0_m` for one sensor.
    pub fn sensor(&self, obs: &ChannelObservation, params: &ChannelParams, scratch: &mut [f64]) -> f64 {
        if params.signal_energy() == 0.0 {
            return 0.0;
        }
        let offsets = &mut scratch[..params.levels];
        symbol_log_likelihood_offsets(obs, params, offsets);
        log_mixture(offsets, &self.p1) - log_mixture(offsets, &self.p0)
    }
}

/// `ln sum_m exp(d_m) w_m`, shifted by the largest `d_m` with positive weight.
fn log_mixture(d: &[f64], w: &[f64]) -> f64 {
    let peak = d
        .iter()
        .zip(w)
        .filter(|(_, &wm)| wm > 0.0)
        .map(|(&dm, _)| dm)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = d.iter().zip(w).filter(|(_, &wm)| wm > 0.0).map(|(&dm, &wm)| wm * (dm - peak).exp()).sum();
    peak + sum.ln()
}

/// Optimal fusion over the fading channel: the symbol-marginalized LRT.
pub fn llr_fading_optimal(
    channel_obs: &[ChannelObservation],
    pmf_h0: &CellPmf,
    pmf_h1_avg: &CellPmf,
    params: &ChannelParams,
) -> Result<DecisionStatistic> {
    params.validate()?;
    if pmf_h0.levels() != params.levels {
        return Err(Error::Domain(format!(
            "pmfs have {} cells but the channel carries {} tones",
            pmf_h0.levels(),
            params.levels
        )));
    }
    if let Some(o) = channel_obs.iter().find(|o| o.levels() != params.levels) {
        return Err(Error::Domain(format!("observation with {} tones on an {}-tone channel", o.levels(), params.levels)));
    }
    let llr = FadingLlr::new(pmf_h0, pmf_h1_avg)?;
    let mut scratch = vec![0.0; params.levels];
    let value = saturating_sum(channel_obs.iter().map(|o| llr.sensor(o, params, &mut scratch)));
    Ok(DecisionStatistic { value, mode: FusionMode::FadingOptimal })
}

/// ML symbol decision; ties go to the smallest index.
pub fn ml_symbol_decision(obs: &ChannelObservation, params: &ChannelParams) -> usize {
    let mut offsets = vec![0.0; params.levels];
    symbol_log_likelihood_offsets(obs, params, &mut offsets);
    argmax_first(&offsets) + 1
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Sum of zero-based symbol indices.
pub fn count_fusion(symbols: &[usize]) -> DecisionStatistic {
    let value = symbols.iter().map(|&m| m.saturating_sub(1) as f64).sum();
    DecisionStatistic { value, mode: FusionMode::FadingSubOptimal }
}

/// Sub-optimal rule with per-symbol log-ratio summands instead of indices.
pub fn llr_summand_fusion(symbols: &[usize], pmf_h0: &CellPmf, pmf_h1_avg: &CellPmf) -> Result<DecisionStatistic> {
    let s = llr_ddt_quantized(symbols, pmf_h0, pmf_h1_avg)?;
    Ok(DecisionStatistic { value: s.value, mode: FusionMode::FadingSubOptimal })
}

/// Neyman-Pearson decision with a coin toss on the boundary.
pub fn randomized_np_decision<R: Rng + ?Sized>(
    statistic: f64,
    threshold: f64,
    boundary_accept_prob: f64,
    rng: &mut R,
) -> Hypothesis {
    if statistic > threshold {
        Hypothesis::H1
    } else if statistic < threshold {
        Hypothesis::H0
    } else if rng.random::<f64>() < boundary_accept_prob {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

/// Known-amplitude LLR `(A y - A^2/2) / sigma^2`, an increasing affine map of `y`.
pub fn llr_affine_known_mean(y: f64, mean_amplitude: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    -mean_amplitude * mean_amplitude / (2.0 * s2) + mean_amplitude / s2 * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::transmit;
    use crate::model::ThresholdVector;
    use crate::quadrature::integrate_scalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(values: Vec<f64>) -> SensorObservations {
        SensorObservations { values, hypothesis: Hypothesis::H0, amplitudes: vec![] }
    }

    fn pmf(m: &[f64]) -> CellPmf {
        CellPmf::new(m.to_vec()).unwrap()
    }

    #[test]
    fn known_signal_llr() {
        let c = ScenarioConfig { amplitude_ratio: 1.0, ..ScenarioConfig::default() };
        let s = llr_ddt_nonquantized(&obs(vec![1.0]), &c, 16).unwrap();
        assert!((s.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_observation_llr_matches_quadrature() {
        let c = ScenarioConfig::default();
        // log int exp(-A^2/2) / (A ln 10) dA over [0.1, 1], adaptive quadrature in A
        let (v, _) = integrate_scalar(|a| (-0.5 * a * a).exp() / (a * 10f64.ln()), 0.1, 1.0, 1e-14, 400).unwrap();
        let per_sensor = v.ln();
        assert!((per_sensor - -0.100_146_026_277_960_08).abs() < 1e-12);
        let s = llr_ddt_nonquantized(&obs(vec![0.0; 25]), &c, 48).unwrap();
        assert!((s.value - 25.0 * per_sensor).abs() < 1e-10 * 25.0);
        assert!(s.value < 0.0);
    }

    #[test]
    fn nonquantized_quadrature_converges() {
        let c = ScenarioConfig::default();
        for y in [-4.0, -1.0, 0.3, 2.0, 6.0] {
            let a = llr_ddt_nonquantized(&obs(vec![y]), &c, 24).unwrap().value;
            let b = llr_ddt_nonquantized(&obs(vec![y]), &c, 48).unwrap().value;
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3), "y={y}: {a} vs {b}");
        }
        assert!(llr_ddt_nonquantized(&obs(vec![0.0]), &c, 4).is_err());
    }

    #[test]
    fn nonquantized_is_increasing_in_y() {
        let llr = NonQuantizedLlr::new(&ScenarioConfig::default(), 48).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in -50..50 {
            let v = llr.sensor(i as f64 * 0.1);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn quantized_llr_examples() {
        let p0 = pmf(&[0.5, 0.5]);
        let p1 = pmf(&[0.25, 0.75]);
        assert_eq!(llr_ddt_quantized(&[1, 2, 2], &p0, &p0).unwrap().value, 0.0);
        let one = llr_ddt_quantized(&[2], &p0, &p1).unwrap().value;
        assert!((one - 1.5f64.ln()).abs() < 1e-15);
        let symbols: Vec<usize> = (0..25).map(|k| 1 + k % 2).collect();
        let total = llr_ddt_quantized(&symbols, &p0, &p1).unwrap().value;
        let parts: f64 = symbols.iter().map(|&m| llr_ddt_quantized(&[m], &p0, &p1).unwrap().value).sum();
        assert!((total - parts).abs() < 1e-12);
        let p0z = pmf(&[1.0, 0.0]);
        assert_eq!(llr_ddt_quantized(&[1, 2], &p0z, &p1).unwrap().value, f64::INFINITY);
        assert!(llr_ddt_quantized(&[3], &p0, &p1).is_err());
    }

    #[test]
    fn count_fusion_examples() {
        assert_eq!(count_fusion(&[2, 1, 2, 2]).value, 3.0);
        assert_eq!(count_fusion(&[1, 1, 1]).value, 0.0);
        assert_eq!(count_fusion(&[4, 4]).value, 6.0);
    }

    #[test]
    fn ml_decisions() {
        let p = ChannelParams::new(1.0, 1.0, 0.1, 3).unwrap();
        assert_eq!(ml_symbol_decision(&ChannelObservation::from_envelopes(&[0.1, 2.0, 0.3]), &p), 2);
        let p2 = ChannelParams::new(1.0, 1.0, 0.1, 2).unwrap();
        assert_eq!(ml_symbol_decision(&ChannelObservation::from_envelopes(&[1.0, 1.0]), &p2), 1);
    }

    #[test]
    fn noiseless_decoding_rate() {
        let p = ChannelParams::new(1.0, 1.0, 1e-12, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut correct = 0;
        for t in 0..10_000 {
            let m = 1 + t % 4;
            if ml_symbol_decision(&transmit(m, &p, &mut rng).unwrap(), &p) == m {
                correct += 1;
            }
        }
        assert!(correct as f64 / 10_000.0 >= 0.999);
    }

    #[test]
    fn fading_llr_degenerate_cases() {
        let p = ChannelParams::new(1.0, 1.0, 0.5, 2).unwrap();
        let p0 = pmf(&[0.6, 0.4]);
        let p1 = pmf(&[0.3, 0.7]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ys: Vec<ChannelObservation> = (0..5).map(|k| transmit(1 + k % 2, &p, &mut rng).unwrap()).collect();
        assert_eq!(llr_fading_optimal(&ys, &p0, &p0, &p).unwrap().value, 0.0);
        let silent = ChannelParams::new(0.0, 1.0, 0.5, 2).unwrap();
        assert_eq!(llr_fading_optimal(&ys, &p0, &p1, &silent).unwrap().value, 0.0);
        let total = llr_fading_optimal(&ys, &p0, &p1, &p).unwrap().value;
        let parts: f64 = ys.iter().map(|y| llr_fading_optimal(std::slice::from_ref(y), &p0, &p1, &p).unwrap().value).sum();
        assert!((total - parts).abs() < 1e-12);
    }

    #[test]
    fn fading_llr_matches_direct_mixture() {
        let p = ChannelParams::new(1.0, 1.0, 0.5, 3).unwrap();
        let p0 = pmf(&[0.5, 0.3, 0.2]);
        let p1 = pmf(&[0.2, 0.3, 0.5]);
        let y = ChannelObservation::from_envelopes(&[0.4, 1.1, 2.3]);
        let mix = |w: &CellPmf| -> f64 {
            (1..=3)
                .map(|m| crate::channel::symbol_log_likelihood(&y, m, &p).unwrap().exp() * w.mass(m))
                .sum::<f64>()
                .ln()
        };
        let direct = mix(&p1) - mix(&p0);
        let got = llr_fading_optimal(std::slice::from_ref(&y), &p0, &p1, &p).unwrap().value;
        assert!((got - direct).abs() < 1e-12);
    }

    #[test]
    fn fading_llr_tends_to_quantized_llr() {
        let p = ChannelParams::new(1.0, 1.0, 1e-10, 4).unwrap();
        let p0 = pmf(&[0.4, 0.3, 0.2, 0.1]);
        let p1 = pmf(&[0.1, 0.2, 0.3, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for t in 0..1000 {
            let y = transmit(1 + t % 4, &p, &mut rng).unwrap();
            let fading = llr_fading_optimal(std::slice::from_ref(&y), &p0, &p1, &p).unwrap().value;
            let decoded = ml_symbol_decision(&y, &p);
            let ddt = llr_ddt_quantized(&[decoded], &p0, &p1).unwrap().value;
            assert!((fading - ddt).abs() < 1e-4);
        }
    }

    #[test]
    fn randomized_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(randomized_np_decision(5.0, 3.0, 0.0, &mut rng), Hypothesis::H1);
        assert_eq!(randomized_np_decision(1.0, 3.0, 1.0, &mut rng), Hypothesis::H0);
        assert_eq!(randomized_np_decision(3.0, 3.0, 1.0, &mut rng), Hypothesis::H1);
        assert_eq!(randomized_np_decision(3.0, 3.0, 0.0, &mut rng), Hypothesis::H0);
        let hits = (0..10_000)
            .filter(|_| randomized_np_decision(3.0, 3.0, 0.5, &mut rng) == Hypothesis::H1)
            .count();
        assert!((hits as f64 / 10_000.0 - 0.5).abs() < 0.01, "{hits}");
    }

    #[test]
    fn affine_llr_examples() {
        assert_eq!(llr_affine_known_mean(0.5, 1.0, 1.0), 0.0);
        assert_eq!(llr_affine_known_mean(1.0, 1.0, 1.0), 0.5);
        let t = ThresholdVector::new(vec![-0.3, 0.2, 0.9]).unwrap();
        let (a, s) = (0.7, 1.3);
        let mapped = t.affine(a / (s * s), -a * a / (2.0 * s * s)).unwrap();
        for i in 0..1000 {
            let y = -3.0 + i as f64 * 0.006;
            assert_eq!(t.quantize(y), mapped.quantize(llr_affine_known_mean(y, a, s)));
        }
    }

    #[test]
    fn saturating_sum_rules() {
        assert_eq!(saturating_sum([1.0, f64::INFINITY, f64::NEG_INFINITY]), f64::INFINITY);
        assert_eq!(saturating_sum([1.0, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_eq!(saturating_sum([1.0, 2.0]), 3.0);
    }

    #[test]
    fn mode_tags_round_trip() {
        for m in [FusionMode::DdtNonQuantized, FusionMode::DdtQuantized, FusionMode::FadingOptimal, FusionMode::FadingSubOptimal] {
            assert_eq!(m.tag().parse::<FusionMode>().unwrap(), m);
        }
    }
}
