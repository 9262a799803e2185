//! Threshold search: exhaustive ordered-tuple grid followed by local
//! refinement with a halving step.
//!
//! The grid covers every strictly increasing tuple of grid points, so the
//! ordering constraint prunes the search to `C(n, M-1)` evaluations. Each
//! refinement pass halves the step and hill-climbs over the `3^(M-1) - 1`
//! neighbours of the incumbent until no neighbour improves on it.

use rayon::prelude::*;

use super::objective::{objective_value, ObjectiveKind};
use crate::error::{Error, Result};
use crate::model::{ScenarioConfig, ThresholdVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub refine_passes: usize,
    /// Draws for Monte Carlo cross-checks of the objective.
    pub mc_samples: usize,
}

/// Hill-climb moves allowed per refinement pass.
const MAX_CLIMB_MOVES: usize = 10_000;

impl OptimizerSettings {
    /// Default search box and resolution for a design problem.
    ///
    /// The grid is `[-3 sigma, 3 sigma]` (`[-8 sigma, 8 sigma]` for MJD with six
    /// levels); the step grows with dimension so the grid stays near 10^5-10^6
    /// points, and refinement passes bring the final resolution below 1e-4 sigma.
    pub fn default_for(kind: ObjectiveKind, levels: usize, sigma: f64) -> Self {
        let half_width = if kind == ObjectiveKind::JDivergence && levels >= 6 { 8.0 } else { 3.0 };
        let (step, passes) = match levels {
            0..=3 => (0.01, 7),
            4 => (0.04, 9),
            5 => (0.1, 10),
            _ if half_width > 3.0 => (0.5, 13),
            _ => (0.25, 12),
        };
        OptimizerSettings {
            grid_lo: -half_width * sigma,
            grid_hi: half_width * sigma,
            grid_step: step * sigma,
            refine_passes: passes,
            mc_samples: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_lo.is_finite() && self.grid_hi.is_finite() && self.grid_lo < self.grid_hi) {
            return Err(Error::Config(format!(
                "grid bounds must satisfy lo < hi, got [{}, {}]",
                self.grid_lo, self.grid_hi
            )));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= self.grid_hi - self.grid_lo) {
            return Err(Error::Config(format!(
                "grid step {} must be positive and no wider than the grid",
                self.grid_step
            )));
        }
        if self.mc_samples < 1 {
            return Err(Error::Config("mc_samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Grid points `lo, lo + step, ...` not exceeding `hi`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.grid_hi - self.grid_lo) / self.grid_step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.grid_lo + i as f64 * self.grid_step).collect()
    }

    /// FNV-1a hash of the canonical settings string, for cache provenance.
    pub fn fingerprint(&self) -> String {
        let canonical = format!(
            "{}|{}|{}|{}|{}",
            self.grid_lo, self.grid_hi, self.grid_step, self.refine_passes, self.mc_samples
        );
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

/// Result of a threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedThresholds {
    pub thresholds: ThresholdVector,
    pub objective: f64,
    /// Objective value at the best grid point, before refinement.
    pub grid_objective: f64,
    pub evaluations: usize,
}

#[derive(Clone)]
struct Incumbent {
    value: f64,
    cuts: Vec<f64>,
}

impl Incumbent {
    /// Strictly better value, ties to the lexicographically smaller vector.
    fn beats(&self, other: &Incumbent) -> bool {
        if self.value != other.value {
            return self.value > other.value;
        }
        self.cuts
            .iter()
            .zip(&other.cuts)
            .find(|(a, b)| a != b)
            .is_some_and(|(a, b)| a < b)
    }
}

/// Maximizes the chosen objective over ascending threshold vectors of length `levels - 1`.
pub fn optimize_thresholds(
    kind: ObjectiveKind,
    config: &ScenarioConfig,
    settings: &OptimizerSettings,
) -> Result<OptimizedThresholds> {
    config.validate()?;
    settings.validate()?;
    let dim = config.levels - 1;
    let grid = settings.grid();
    if grid.len() < dim {
        return Err(Error::Config(format!(
            "grid of {} points cannot hold {dim} strictly ascending thresholds",
            grid.len()
        )));
    }

    let eval = |cuts: &[f64]| -> Result<f64> {
        let t = ThresholdVector::new(cuts.to_vec())?;
        objective_value(kind, &t, config)
    };

    // Workers own one leading index each; partial results are reduced in index order.
    let partials: Vec<Result<(Option<Incumbent>, usize)>> = (0..=grid.len() - dim)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Incumbent> = None;
            let mut count = 0usize;
            let mut tuple = vec![grid[first]];
            scan_tuples(&grid, first + 1, dim, &mut tuple, &mut |cuts| {
                let value = eval(cuts)?;
                count += 1;
                let candidate = Incumbent { value, cuts: cuts.to_vec() };
                if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                    best = Some(candidate);
                }
                Ok(())
            })?;
            Ok((best, count))
        })
        .collect();

    let mut best: Option<Incumbent> = None;
    let mut evaluations = 0;
    for partial in partials {
        let (candidate, count) = partial?;
        evaluations += count;
        if let Some(c) = candidate {
            if best.as_ref().is_none_or(|b| c.beats(b)) {
                best = Some(c);
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Config("empty threshold grid".into()))?;
    let grid_objective = best.value;

    let mut step = settings.grid_step;
    for _ in 0..settings.refine_passes {
        step *= 0.5;
        for _ in 0..MAX_CLIMB_MOVES {
            let mut improved: Option<Incumbent> = None;
            for offsets in neighbour_offsets(dim) {
                let cuts: Vec<f64> = best.cuts.iter().zip(&offsets).map(|(c, o)| c + *o as f64 * step).collect();
                if cuts.windows(2).any(|w| w[0] >= w[1]) {
                    continue;
                }
                let value = eval(&cuts)?;
                evaluations += 1;
                let candidate = Incumbent { value, cuts };
                let reference = improved.as_ref().unwrap_or(&best);
                if candidate.value > reference.value {
                    improved = Some(candidate);
                }
            }
            match improved {
                Some(next) => best = next,
                None => break,
            }
        }
    }

    Ok(OptimizedThresholds {
        thresholds: ThresholdVector::new(best.cuts)?,
        objective: best.value,
        grid_objective,
        evaluations,
    })
}

fn scan_tuples<F>(grid: &[f64], start: usize, dim: usize, tuple: &mut Vec<f64>, visit: &mut F) -> Result<()>
where
    F: FnMut(&[f64]) -> Result<()>,
{
    if tuple.len() == dim {
        return visit(tuple);
    }
    let remaining = dim - tuple.len();
    for i in start..=grid.len() - remaining {
        tuple.push(grid[i]);
        scan_tuples(grid, i + 1, dim, tuple, visit)?;
        tuple.pop();
    }
    Ok(())
}

/// All offset vectors in `{-1, 0, 1}^dim` except the origin, in lexicographic order.
fn neighbour_offsets(dim: usize) -> Vec<Vec<i8>> {
    let total = 3usize.pow(dim as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0i8; dim];
            for slot in v.iter_mut().rev() {
                *slot = (code % 3) as i8 - 1;
                code /= 3;
            }
            v
        })
        .filter(|v| v.iter().any(|&o| o != 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_validation() {
        let mut s = OptimizerSettings::default_for(ObjectiveKind::AverageEntropy, 2, 1.0);
        assert!(s.validate().is_ok());
        s.grid_step = 0.0;
        assert!(s.validate().is_err());
        s.grid_step = 10.0;
        assert!(s.validate().is_err());
        let s = OptimizerSettings { grid_lo: 1.0, grid_hi: -1.0, ..s };
        assert!(s.validate().is_err());
    }

    #[test]
    fn grid_includes_both_ends() {
        let s = OptimizerSettings { grid_lo: -1.0, grid_hi: 1.0, grid_step: 0.5, refine_passes: 0, mc_samples: 1 };
        assert_eq!(s.grid(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn neighbour_count() {
        assert_eq!(neighbour_offsets(1).len(), 2);
        assert_eq!(neighbour_offsets(3).len(), 26);
    }

    #[test]
    fn ordered_tuples_enumerated_once() {
        let grid = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mut seen = Vec::new();
        scan_tuples(&grid, 0, 3, &mut Vec::new(), &mut |t| {
            seen.push(t.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 10);
        assert!(seen.iter().all(|t| t.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn empty_feasible_grid() {
        let c = ScenarioConfig::default().with_levels(6);
        let s = OptimizerSettings { grid_lo: 0.0, grid_hi: 1.0, grid_step: 0.5, refine_passes: 0, mc_samples: 1 };
        assert!(matches!(optimize_thresholds(ObjectiveKind::AverageEntropy, &c, &s), Err(Error::Config(_))));
    }

    #[test]
    fn result_dominates_grid_and_is_deterministic() {
        let c = ScenarioConfig::default();
        let s = OptimizerSettings { grid_lo: -2.0, grid_hi: 2.0, grid_step: 0.1, refine_passes: 4, mc_samples: 1 };
        let r = optimize_thresholds(ObjectiveKind::AverageEntropy, &c, &s).unwrap();
        for g in s.grid() {
            let v = objective_value(ObjectiveKind::AverageEntropy, &ThresholdVector::new(vec![g]).unwrap(), &c).unwrap();
            assert!(r.objective >= v);
        }
        assert!(r.objective >= r.grid_objective);
        let again = optimize_thresholds(ObjectiveKind::AverageEntropy, &c, &s).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn fingerprint_tracks_settings() {
        let a = OptimizerSettings::default_for(ObjectiveKind::AverageEntropy, 3, 1.0);
        let b = OptimizerSettings { refine_passes: a.refine_passes + 1, ..a };
        assert_eq!(a.fingerprint(), a.fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }
}
