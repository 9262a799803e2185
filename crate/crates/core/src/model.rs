//! Shared domain types: hypotheses, scenario parameters, quantizer cut points,
//! cell probability masses and ROC curves.
//!
//! Quantizer cells and FSK symbols are numbered `1..=M` on every public
//! interface; slices are indexed `0..M` internally.

use std::fmt;

use crate::error::{Error, Result};

/// Binary hypothesis at the fusion center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// No event: observations are noise only.
    H0,
    /// Point source present.
    H1,
}

/// How received amplitudes are distributed across the sensors in range of the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmplitudeLaw {
    /// Density `1 / (a ln L)` on `[a_max/L, a_max]`.
    LogUniform,
    /// Sensors placed uniformly over the ring `r_min <= r <= L r_min` with amplitude
    /// inversely proportional to distance, giving density `2 a_max^2 / (a^3 (L^2 - 1))`.
    UniformDisk,
}

impl AmplitudeLaw {
    pub fn name(self) -> &'static str {
        match self {
            AmplitudeLaw::LogUniform => "log-uniform",
            AmplitudeLaw::UniformDisk => "uniform-disk",
        }
    }
}

impl std::str::FromStr for AmplitudeLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-uniform" => Ok(AmplitudeLaw::LogUniform),
            "uniform-disk" => Ok(AmplitudeLaw::UniformDisk),
            other => Err(Error::Config(format!("unknown amplitude law `{other}`"))),
        }
    }
}

/// How the H1 side of a design objective is averaged over the amplitude distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DesignAveraging {
    /// Expectation of the per-amplitude quantity (entropy or J-divergence).
    #[default]
    PerAmplitude,
    /// The quantity evaluated on the amplitude-averaged H1 cell pmf.
    PooledPmf,
}

/// Global experiment parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// `10 log10(a_max^2 / sigma^2)`.
    pub snr_db: f64,
    /// Number of sensors `K` reporting to the fusion center.
    pub sensor_count: usize,
    /// `L = A_max / A_min`.
    pub amplitude_ratio: f64,
    /// Quantization levels `M`.
    pub levels: usize,
    pub a_max: f64,
    /// Amplitude law used to generate H1 observations and in the fusion likelihoods.
    pub amplitude_law: AmplitudeLaw,
    /// Amplitude law over which quantizer design objectives are averaged.
    pub design_law: AmplitudeLaw,
    pub design_averaging: DesignAveraging,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            snr_db: 0.0,
            sensor_count: 25,
            amplitude_ratio: 10.0,
            levels: 2,
            a_max: 1.0,
            amplitude_law: AmplitudeLaw::LogUniform,
            design_law: AmplitudeLaw::UniformDisk,
            design_averaging: DesignAveraging::PerAmplitude,
        }
    }
}

impl ScenarioConfig {
    pub fn new(snr_db: f64, sensor_count: usize, amplitude_ratio: f64, levels: usize) -> Result<Self> {
        let config = ScenarioConfig {
            snr_db,
            sensor_count,
            amplitude_ratio,
            levels,
            ..ScenarioConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_levels(self, levels: usize) -> Self {
        ScenarioConfig { levels, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.snr_db.is_finite() {
            return Err(Error::Config(format!("snr_db must be finite, got {}", self.snr_db)));
        }
        if self.sensor_count < 1 {
            return Err(Error::Config("sensor_count must be at least 1".into()));
        }
        if !(self.amplitude_ratio >= 1.0 && self.amplitude_ratio.is_finite()) {
            return Err(Error::Config(format!(
                "amplitude_ratio must be a finite value >= 1, got {}",
                self.amplitude_ratio
            )));
        }
        if self.levels < 2 {
            return Err(Error::Config(format!("levels must be at least 2, got {}", self.levels)));
        }
        if !(self.a_max > 0.0 && self.a_max.is_finite()) {
            return Err(Error::Config(format!("a_max must be positive, got {}", self.a_max)));
        }
        Ok(())
    }

    /// Smallest amplitude in the prior support.
    pub fn a_min(&self) -> f64 {
        self.a_max / self.amplitude_ratio
    }

    pub fn sigma(&self) -> f64 {
        snr_to_sigma(self)
    }
}

/// Noise standard deviation implied by the scenario SNR: `a_max * 10^(-snr_db / 20)`.
pub fn snr_to_sigma(config: &ScenarioConfig) -> f64 {
    config.a_max * 10f64.powf(-config.snr_db / 20.0)
}

/// Strictly ascending quantizer cut points `beta_1 < ... < beta_{M-1}`.
///
/// The outer edges `beta_0 = -inf` and `beta_M = +inf` are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector {
    cuts: Vec<f64>,
}

impl ThresholdVector {
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if let Some(bad) = cuts.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("threshold {bad} is not finite")));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("thresholds must be strictly ascending: {cuts:?}")));
        }
        Ok(ThresholdVector { cuts })
    }

    /// Builds a vector and checks it matches `levels - 1` cut points.
    pub fn for_levels(cuts: Vec<f64>, levels: usize) -> Result<Self> {
        if cuts.len() + 1 != levels {
            return Err(Error::Config(format!(
                "{} thresholds given for {levels} levels",
                cuts.len()
            )));
        }
        Self::new(cuts)
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Number of quantizer cells, `cuts + 1`.
    pub fn levels(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Quantizes an observation to its 1-based cell index.
    ///
    /// Cell `m` covers `(beta_{m-1}, beta_m]`.
    pub fn quantize(&self, y: f64) -> usize {
        self.cuts.partition_point(|&c| c < y) + 1
    }

    /// Applies `beta -> scale * beta + shift` (with `scale > 0`) to every cut.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("affine scale must be positive, got {scale}")));
        }
        Self::new(self.cuts.iter().map(|c| scale * c + shift).collect())
    }
}

impl fmt::Display for ThresholdVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.cuts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:.4}")?;
        }
        write!(f, "]")
    }
}

/// Tolerance on the total mass of a [`CellPmf`].
pub const PMF_SUM_TOLERANCE: f64 = 1e-9;

/// Probability masses of the `M` quantizer cells under one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPmf {
    masses: Vec<f64>,
}

impl CellPmf {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Domain("a pmf needs at least one cell".into()));
        }
        if let Some(bad) = masses.iter().find(|m| !(**m >= 0.0 && **m <= 1.0)) {
            return Err(Error::Domain(format!("mass {bad} outside [0, 1]")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::Domain(format!("masses sum to {total}, not 1")));
        }
        Ok(CellPmf { masses })
    }

    /// Builds a pmf from masses known to be valid up to rounding; clamps tiny
    /// negative values produced by differencing CDFs.
    pub(crate) fn from_raw(masses: Vec<f64>) -> Result<Self> {
        Self::new(masses.into_iter().map(|m| m.clamp(0.0, 1.0)).collect())
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn levels(&self) -> usize {
        self.masses.len()
    }

    /// Mass of the 1-based cell `m`.
    pub fn mass(&self, m: usize) -> f64 {
        self.masses[m - 1]
    }
}

/// One ROC operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_d: f64,
    /// Binomial standard error of `p_d`.
    pub p_d_stderr: f64,
}

/// Labels attached to a curve for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RocMetadata {
    pub method: String,
    pub levels: usize,
    pub channel: String,
    pub fusion: String,
    pub trials: usize,
    pub seed: u64,
}

/// Operating points sorted by `p_fa`, with `p_d` made non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    pub metadata: RocMetadata,
}

impl RocCurve {
    /// Sorts by `p_fa` and applies the running-maximum cleanup to `p_d`.
    pub fn new(mut points: Vec<RocPoint>, metadata: RocMetadata) -> Result<Self> {
        for p in &points {
            if !(0.0..=1.0).contains(&p.p_fa) || !(0.0..=1.0).contains(&p.p_d) {
                return Err(Error::Domain(format!(
                    "ROC point ({}, {}) outside the unit square",
                    p.p_fa, p.p_d
                )));
            }
        }
        points.sort_by(|a, b| a.p_fa.total_cmp(&b.p_fa));
        let mut running = 0.0f64;
        for p in &mut points {
            running = running.max(p.p_d);
            p.p_d = running;
        }
        Ok(RocCurve { points, metadata })
    }

    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    /// Detection probability at an exact grid `p_fa`, if present.
    pub fn p_d_at(&self, p_fa: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| (p.p_fa - p_fa).abs() < 1e-12)
            .map(|p| p.p_d)
    }

    pub fn point_at(&self, p_fa: f64) -> Option<&RocPoint> {
        self.points.iter().find(|p| (p.p_fa - p_fa).abs() < 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_from_snr() {
        let mut c = ScenarioConfig::default();
        assert_eq!(snr_to_sigma(&c), 1.0);
        c.snr_db = 20.0;
        assert!((snr_to_sigma(&c) - 0.1).abs() < 1e-15);
        c.snr_db = 0.0;
        c.a_max = 2.0;
        assert_eq!(snr_to_sigma(&c), 2.0);
    }

    #[test]
    fn sigma_strictly_decreasing_in_snr() {
        let mut prev = f64::INFINITY;
        for i in -40..=40 {
            let c = ScenarioConfig { snr_db: i as f64 * 0.5, ..ScenarioConfig::default() };
            let s = snr_to_sigma(&c);
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn config_validation() {
        assert!(ScenarioConfig::new(0.0, 25, 10.0, 2).is_ok());
        assert!(ScenarioConfig::new(0.0, 0, 10.0, 2).is_err());
        assert!(ScenarioConfig::new(0.0, 25, 0.5, 2).is_err());
        assert!(ScenarioConfig::new(0.0, 25, 10.0, 1).is_err());
        let bad = ScenarioConfig { a_max: 0.0, ..ScenarioConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn thresholds_must_ascend() {
        assert!(ThresholdVector::new(vec![-1.0, 0.0, 1.0]).is_ok());
        assert!(ThresholdVector::new(vec![0.0, 0.0]).is_err());
        assert!(ThresholdVector::new(vec![1.0, -1.0]).is_err());
        assert!(ThresholdVector::new(vec![f64::NAN]).is_err());
        assert!(ThresholdVector::for_levels(vec![0.0], 3).is_err());
        assert!(ThresholdVector::new(vec![]).is_ok());
    }

    #[test]
    fn quantize_is_one_based() {
        let t = ThresholdVector::new(vec![-1.0, 1.0]).unwrap();
        assert_eq!(t.quantize(-5.0), 1);
        assert_eq!(t.quantize(-1.0), 1);
        assert_eq!(t.quantize(0.0), 2);
        assert_eq!(t.quantize(1.0), 2);
        assert_eq!(t.quantize(1.5), 3);
        assert_eq!(ThresholdVector::new(vec![]).unwrap().quantize(3.0), 1);
    }

    #[test]
    fn pmf_validation() {
        assert!(CellPmf::new(vec![0.5, 0.5]).is_ok());
        assert!(CellPmf::new(vec![-0.1, 1.1]).is_err());
        assert!(CellPmf::new(vec![0.5, 0.4]).is_err());
        assert!(CellPmf::new(vec![]).is_err());
        assert!(CellPmf::new(vec![0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn roc_cleanup_sorts_and_makes_monotone() {
        let meta = RocMetadata {
            method: "mae".into(),
            levels: 2,
            channel: "ddt".into(),
            fusion: "optimal".into(),
            trials: 10,
            seed: 1,
        };
        let pts = vec![
            RocPoint { p_fa: 0.3, p_d: 0.6, p_d_stderr: 0.0 },
            RocPoint { p_fa: 0.1, p_d: 0.5, p_d_stderr: 0.0 },
            RocPoint { p_fa: 0.2, p_d: 0.45, p_d_stderr: 0.0 },
        ];
        let roc = RocCurve::new(pts, meta.clone()).unwrap();
        let pd: Vec<f64> = roc.points().iter().map(|p| p.p_d).collect();
        assert_eq!(pd, vec![0.5, 0.5, 0.6]);
        assert_eq!(roc.p_d_at(0.2), Some(0.5));
        let bad = vec![RocPoint { p_fa: 1.2, p_d: 0.5, p_d_stderr: 0.0 }];
        assert!(RocCurve::new(bad, meta).is_err());
    }
}
