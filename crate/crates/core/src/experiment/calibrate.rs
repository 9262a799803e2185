//! Randomized Neyman-Pearson thresholds from an empirical H0 sample.

use crate::error::{Error, Result};

/// Sorted copy of a statistic sample, ascending under `total_cmp`.
#[derive(Debug, Clone)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("statistic sample is empty".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("statistic sample contains NaN".into()));
        }
        let mut values = values.to_vec();
        values.sort_by(f64::total_cmp);
        Ok(SortedSample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(#{s > t}, #{s = t})`.
    pub fn counts(&self, t: f64) -> (usize, usize) {
        let below = self.values.partition_point(|&v| v < t);
        let at_or_below = self.values.partition_point(|&v| v <= t);
        (self.values.len() - at_or_below, at_or_below - below)
    }

    /// Expected fraction of alarms under the randomized rule `(t, gamma)`.
    pub fn exceedance(&self, threshold: f64, boundary_prob: f64) -> f64 {
        let (gt, eq) = self.counts(threshold);
        (gt as f64 + boundary_prob * eq as f64) / self.values.len() as f64
    }

    /// Threshold and boundary probability whose exceedance is exactly `target`.
    ///
    /// The threshold is the `ceil(target n)`-th largest value and the boundary
    /// probability spreads the remaining mass over its atom. A zero target puts
    /// the threshold just above the maximum; a unit target returns `(-inf, 1)`.
    pub fn calibrate(&self, target: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&target) {
            return Err(Error::Domain(format!("false-alarm target {target} outside [0, 1]")));
        }
        let n = self.values.len();
        if target == 0.0 {
            return Ok((self.values[n - 1].next_up(), 0.0));
        }
        if target == 1.0 {
            return Ok((f64::NEG_INFINITY, 1.0));
        }
        let k = target * n as f64;
        let rank = (k.ceil() as usize).clamp(1, n);
        let threshold = self.values[n - rank];
        let (gt, eq) = self.counts(threshold);
        let gamma = ((k - gt as f64) / eq as f64).clamp(0.0, 1.0);
        Ok((threshold, gamma))
    }
}

/// Randomized threshold achieving `target_pfa` exactly on the empirical H0 distribution.
pub fn calibrate_threshold(h0_statistics: &[f64], target_pfa: f64) -> Result<(f64, f64)> {
    SortedSample::new(h0_statistics)?.calibrate(target_pfa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistic_example() {
        let (t, g) = calibrate_threshold(&[1.0, 2.0, 3.0, 4.0], 0.25).unwrap();
        assert_eq!((t, g), (4.0, 1.0));
        let s = SortedSample::new(&[4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.exceedance(t, g), 0.25);
    }

    #[test]
    fn endpoints() {
        let s = SortedSample::new(&[1.0, 2.0, 2.0, 5.0]).unwrap();
        let (t, g) = s.calibrate(0.0).unwrap();
        assert!(t > 5.0 && g == 0.0);
        assert_eq!(s.exceedance(t, g), 0.0);
        let (t, g) = s.calibrate(1.0).unwrap();
        assert_eq!(s.exceedance(t, g), 1.0);
        assert!(s.calibrate(1.5).is_err());
        assert!(calibrate_threshold(&[], 0.1).is_err());
    }

    #[test]
    fn ties_are_randomized() {
        let sample = [0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0];
        let (t, g) = calibrate_threshold(&sample, 0.4).unwrap();
        assert_eq!(t, 2.0);
        assert!((g - 2.2 / 3.0).abs() < 1e-15);
        let s = SortedSample::new(&sample).unwrap();
        assert!((s.exceedance(t, g) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn exact_on_every_grid_target() {
        let sample: Vec<f64> = (0..1000).map(|i| ((i * 37) % 11) as f64).collect();
        let s = SortedSample::new(&sample).unwrap();
        for i in 0..=100 {
            let target = i as f64 / 100.0;
            let (t, g) = s.calibrate(target).unwrap();
            assert!((s.exceedance(t, g) - target).abs() < 1e-12, "target {target}");
        }
    }

    #[test]
    fn infinite_atoms() {
        let s = SortedSample::new(&[f64::NEG_INFINITY, 0.0, f64::INFINITY, f64::INFINITY]).unwrap();
        let (t, g) = s.calibrate(0.25).unwrap();
        assert_eq!(t, f64::INFINITY);
        assert!((s.exceedance(t, g) - 0.25).abs() < 1e-15);
        let (t, g) = s.calibrate(0.0).unwrap();
        assert_eq!(s.exceedance(t, g), 0.0);
    }
}
