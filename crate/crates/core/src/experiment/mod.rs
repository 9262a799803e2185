//! Monte Carlo ROC estimation, threshold calibration, table reproduction and
//! CSV output.

mod calibrate;
mod csv;
mod roc;
mod tables;

pub use calibrate::{calibrate_threshold, SortedSample};
pub use csv::{write_gain_csv, write_roc_csv, ROC_CSV_HEADER};
pub use roc::{run_roc, TRIAL_CHUNK};
pub use tables::{design_record, fading_sweep, reproduce_tables, GainReport, GainRow, TableOptions};

use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::fusion::{FusionMode, SymbolSummand, DEFAULT_QUADRATURE_POINTS};
use crate::model::{ScenarioConfig, ThresholdVector};
use crate::quantizer::ObjectiveKind;

/// Default false-alarm grid of the DDT tables.
pub const TABLE_PFA_GRID: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantizerMethod {
    Mae,
    Mjd,
    KthRoot,
    NonQuantized,
}

impl QuantizerMethod {
    pub fn tag(self) -> &'static str {
        match self {
            QuantizerMethod::Mae => "mae",
            QuantizerMethod::Mjd => "mjd",
            QuantizerMethod::KthRoot => "kthroot",
            QuantizerMethod::NonQuantized => "none",
        }
    }

    /// Design objective, for the entropy-based methods.
    pub fn objective(self) -> Option<ObjectiveKind> {
        match self {
            QuantizerMethod::Mae => Some(ObjectiveKind::AverageEntropy),
            QuantizerMethod::Mjd => Some(ObjectiveKind::JDivergence),
            _ => None,
        }
    }
}

impl fmt::Display for QuantizerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for QuantizerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mae" => Ok(QuantizerMethod::Mae),
            "mjd" => Ok(QuantizerMethod::Mjd),
            "kthroot" => Ok(QuantizerMethod::KthRoot),
            "none" => Ok(QuantizerMethod::NonQuantized),
            other => Err(Error::Config(format!("unknown quantizer method `{other}`"))),
        }
    }
}

/// Everything needed to simulate one ROC curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: ScenarioConfig,
    pub quantizer_method: QuantizerMethod,
    pub fusion_mode: FusionMode,
    /// Link model; required exactly for the fading fusion modes.
    pub channel: Option<ChannelParams>,
    /// Per-sensor received powers overriding `channel.received_power`.
    pub sensor_powers: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    pub pfa_grid: Vec<f64>,
    /// Designed thresholds for MAE/MJD; designed on the fly when absent.
    pub thresholds: Option<ThresholdVector>,
    /// Lower-cell H0 mass for the K-th root quantizer instead of the per-target rule.
    pub kth_root_mass: Option<f64>,
    pub summand: SymbolSummand,
    pub quadrature_points: usize,
}

impl ExperimentSpec {
    pub fn new(scenario: ScenarioConfig, quantizer_method: QuantizerMethod, fusion_mode: FusionMode) -> Self {
        ExperimentSpec {
            scenario,
            quantizer_method,
            fusion_mode,
            channel: None,
            sensor_powers: None,
            trials: 100_000,
            seed: 1,
            pfa_grid: TABLE_PFA_GRID.to_vec(),
            thresholds: None,
            kth_root_mass: None,
            summand: SymbolSummand::Index,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
        }
    }

    pub fn with_channel(mut self, channel: ChannelParams) -> Self {
        self.channel = Some(channel);
        self
    }

    pub fn with_trials(mut self, trials: usize, seed: u64) -> Self {
        self.trials = trials;
        self.seed = seed;
        self
    }

    pub fn with_thresholds(mut self, thresholds: ThresholdVector) -> Self {
        self.thresholds = Some(thresholds);
        self
    }

    pub fn with_pfa_grid(mut self, grid: Vec<f64>) -> Self {
        self.pfa_grid = grid;
        self
    }

    pub fn channel_tag(&self) -> &'static str {
        if self.fusion_mode.is_fading() {
            "rayleigh"
        } else {
            "ddt"
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = &self.scenario;
        cfg.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.pfa_grid.is_empty() {
            return Err(Error::Config("false-alarm grid is empty".into()));
        }
        if let Some(p) = self.pfa_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("false-alarm target {p} outside [0, 1]")));
        }
        match (self.fusion_mode.is_fading(), &self.channel) {
            (true, None) => return Err(Error::Config(format!("fusion mode {} needs channel parameters", self.fusion_mode))),
            (false, Some(_)) => {
                return Err(Error::Config(format!("fusion mode {} takes no channel parameters", self.fusion_mode)))
            }
            (true, Some(ch)) => {
                ch.validate()?;
                if ch.levels != cfg.levels {
                    return Err(Error::Config(format!(
                        "channel carries {} tones but the quantizer has {} levels",
                        ch.levels, cfg.levels
                    )));
                }
            }
            (false, None) => {}
        }
        let unquantized = self.quantizer_method == QuantizerMethod::NonQuantized;
        if unquantized != (self.fusion_mode == FusionMode::DdtNonQuantized) {
            return Err(Error::Config(format!(
                "method {} cannot be combined with fusion mode {}",
                self.quantizer_method, self.fusion_mode
            )));
        }
        if self.quantizer_method == QuantizerMethod::KthRoot && cfg.levels != 2 {
            return Err(Error::Config(format!("the K-th root quantizer is binary; {} levels requested", cfg.levels)));
        }
        if let Some(t) = &self.thresholds {
            if unquantized {
                return Err(Error::Config("thresholds given for the non-quantized method".into()));
            }
            if t.levels() != cfg.levels {
                return Err(Error::Config(format!("thresholds define {} cells, expected {}", t.levels(), cfg.levels)));
            }
        }
        if let Some(mass) = self.kth_root_mass {
            if self.quantizer_method != QuantizerMethod::KthRoot {
                return Err(Error::Config("a K-th root mass override needs method kthroot".into()));
            }
            if !(mass > 0.0 && mass < 1.0) {
                return Err(Error::Config(format!("K-th root mass {mass} must lie in (0, 1)")));
            }
        }
        if let Some(powers) = &self.sensor_powers {
            if !self.fusion_mode.is_fading() {
                return Err(Error::Config("per-sensor powers apply to fading modes only".into()));
            }
            if powers.len() != cfg.sensor_count {
                return Err(Error::Config(format!("{} sensor powers for {} sensors", powers.len(), cfg.sensor_count)));
            }
            if let Some(p) = powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
                return Err(Error::Config(format!("sensor power {p} must be finite and >= 0")));
            }
        }
        if self.quadrature_points < 8 {
            return Err(Error::Config(format!("need at least 8 quadrature points, got {}", self.quadrature_points)));
        }
        Ok(())
    }
}
