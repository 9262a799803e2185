//! Binary "K-th root" baseline: one alarm from any sensor triggers a global alarm.

use crate::error::{Error, Result};
use crate::model::{ScenarioConfig, ThresholdVector};
use crate::signal::gaussian_quantile;

/// Per-sensor threshold for a global false-alarm target under the OR rule.
///
/// The no-alarm probability `p0` solves `p0^K = 1 - p_fa_global` and the cut is
/// `sigma * Phi^{-1}(p0)`. Returns the thresholds and `p0`.
pub fn kth_root_quantizer(p_fa_global: f64, config: &ScenarioConfig) -> Result<(ThresholdVector, f64)> {
    if !(p_fa_global > 0.0 && p_fa_global < 1.0) {
        return Err(Error::Domain(format!("global false-alarm target {p_fa_global} must lie in (0, 1)")));
    }
    let no_alarm = (1.0 - p_fa_global).powf(1.0 / config.sensor_count as f64);
    kth_root_from_mass(no_alarm, config).map(|t| (t, no_alarm))
}

/// Binary quantizer placing H0 mass `no_alarm` in the lower cell.
pub fn kth_root_from_mass(no_alarm: f64, config: &ScenarioConfig) -> Result<ThresholdVector> {
    if config.levels != 2 {
        return Err(Error::Config(format!(
            "the K-th root quantizer is binary; {} levels requested",
            config.levels
        )));
    }
    if !(no_alarm > 0.0 && no_alarm < 1.0) {
        return Err(Error::Domain(format!("no-alarm mass {no_alarm} must lie in (0, 1)")));
    }
    ThresholdVector::new(vec![config.sigma() * gaussian_quantile(no_alarm)])
}
