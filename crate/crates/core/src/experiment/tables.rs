//! DDT detection tables, MAE-over-MJD gains and fading sweeps.

use super::roc::run_roc;
use super::{ExperimentSpec, QuantizerMethod, TABLE_PFA_GRID};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::fusion::FusionMode;
use crate::model::{RocCurve, ScenarioConfig};
use crate::quantizer::{optimize_thresholds, CacheKey, CacheRecord, ObjectiveKind, OptimizerSettings, ThresholdCache};

#[derive(Debug, Clone, PartialEq)]
pub struct TableOptions {
    pub levels: Vec<usize>,
    pub pfa_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { levels: vec![2, 3, 4, 6], pfa_grid: TABLE_PFA_GRID.to_vec(), trials: 100_000, seed: 1 }
    }
}

/// One `(p_fa, M)` cell of the tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow {
    pub p_fa: f64,
    pub levels: usize,
    pub pd_mae: f64,
    pub pd_mjd: f64,
    pub stderr_mae: f64,
    pub stderr_mjd: f64,
    pub pd_nonquantized: f64,
    /// `pd_mae - pd_mjd`.
    pub gain: f64,
    /// `100 gain / pd_mae`.
    pub percent_gain: f64,
}

impl GainRow {
    /// Standard error of `gain`, treating the two estimates as independent.
    pub fn gain_stderr(&self) -> f64 {
        self.stderr_mae.hypot(self.stderr_mjd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub rows: Vec<GainRow>,
    pub nonquantized: RocCurve,
    pub curves: Vec<RocCurve>,
}

impl GainReport {
    pub fn row(&self, p_fa: f64, levels: usize) -> Option<&GainRow> {
        self.rows.iter().find(|r| r.levels == levels && (r.p_fa - p_fa).abs() < 1e-12)
    }

    fn mean_over(&self, levels: usize, f: impl Fn(&GainRow) -> f64) -> Option<f64> {
        let vals: Vec<f64> = self.rows.iter().filter(|r| r.levels == levels).map(f).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }

    /// Mean MAE-over-MJD gain across the false-alarm grid.
    pub fn average_gain(&self, levels: usize) -> Option<f64> {
        self.mean_over(levels, |r| r.gain)
    }

    /// Mean of `pd_nonquantized - pd_mae` across the false-alarm grid.
    pub fn average_nonquantized_gap(&self, levels: usize) -> Option<f64> {
        self.mean_over(levels, |r| r.pd_nonquantized - r.pd_mae)
    }

    /// Plain-text rendering of both tables.
    pub fn render(&self) -> String {
        let mut levels: Vec<usize> = self.rows.iter().map(|r| r.levels).collect();
        levels.dedup();
        let mut grid: Vec<f64> = self.rows.iter().map(|r| r.p_fa).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mut out = String::from("p_d\npfa  ");
        for m in &levels {
            out.push_str(&format!("  MJD{m}   MAE{m} "));
        }
        out.push_str("  non-quantized\n");
        for &p in &grid {
            out.push_str(&format!("{p:<4.2} "));
            for &m in &levels {
                let r = self.row(p, m).expect("complete grid");
                out.push_str(&format!(" {:.3}  {:.3} ", r.pd_mjd, r.pd_mae));
            }
            out.push_str(&format!("  {:.3}\n", self.nonquantized.p_d_at(p).unwrap_or(f64::NAN)));
        }
        out.push_str("\ngain of MAE over MJD (G, PG%)\npfa  ");
        for m in &levels {
            out.push_str(&format!("  G{m}      PG{m}  "));
        }
        out.push('\n');
        for &p in &grid {
            out.push_str(&format!("{p:<4.2} "));
            for &m in &levels {
                let r = self.row(p, m).expect("complete grid");
                out.push_str(&format!(" {:+.4} {:+6.2} ", r.gain, r.percent_gain));
            }
            out.push('\n');
        }
        out
    }
}

/// Designs thresholds with the default optimizer settings and packages them as a cache record.
pub fn design_record(kind: ObjectiveKind, config: &ScenarioConfig) -> Result<CacheRecord> {
    let settings = OptimizerSettings::default_for(kind, config.levels, config.sigma());
    let r = optimize_thresholds(kind, config, &settings)?;
    Ok(CacheRecord {
        key: CacheKey::for_config(kind, config),
        thresholds: r.thresholds,
        objective: r.objective,
        design_law: config.design_law,
        averaging: config.design_averaging,
        settings: settings.fingerprint(),
    })
}

/// Table 1 and Table 2 style DDT comparison of MAE and MJD quantizers.
///
/// Every `(method, M)` threshold vector must be present in `cache`; the first
/// missing key is reported before any simulation starts.
pub fn reproduce_tables(base: &ScenarioConfig, cache: &ThresholdCache, options: &TableOptions) -> Result<GainReport> {
    base.validate()?;
    let mut designs = Vec::new();
    for &m in &options.levels {
        let cfg = base.with_levels(m);
        let mae = cache.thresholds_for(ObjectiveKind::AverageEntropy, &cfg)?.thresholds.clone();
        let mjd = cache.thresholds_for(ObjectiveKind::JDivergence, &cfg)?.thresholds.clone();
        designs.push((cfg, mae, mjd));
    }

    let nonquantized = run_roc(
        &ExperimentSpec::new(*base, QuantizerMethod::NonQuantized, FusionMode::DdtNonQuantized)
            .with_trials(options.trials, options.seed)
            .with_pfa_grid(options.pfa_grid.clone()),
    )?;

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for (cfg, mae_t, mjd_t) in designs {
        let curve = |method, t| {
            run_roc(
                &ExperimentSpec::new(cfg, method, FusionMode::DdtQuantized)
                    .with_thresholds(t)
                    .with_trials(options.trials, options.seed)
                    .with_pfa_grid(options.pfa_grid.clone()),
            )
        };
        let mae = curve(QuantizerMethod::Mae, mae_t)?;
        let mjd = curve(QuantizerMethod::Mjd, mjd_t)?;
        for &p_fa in &options.pfa_grid {
            let a = mae.point_at(p_fa).ok_or_else(|| Error::Domain(format!("no MAE point at {p_fa}")))?;
            let j = mjd.point_at(p_fa).ok_or_else(|| Error::Domain(format!("no MJD point at {p_fa}")))?;
            let gain = a.p_d - j.p_d;
            rows.push(GainRow {
                p_fa,
                levels: cfg.levels,
                pd_mae: a.p_d,
                pd_mjd: j.p_d,
                stderr_mae: a.p_d_stderr,
                stderr_mjd: j.p_d_stderr,
                pd_nonquantized: nonquantized.p_d_at(p_fa).unwrap_or(f64::NAN),
                gain,
                percent_gain: if a.p_d > 0.0 { 100.0 * gain / a.p_d } else { 0.0 },
            });
        }
        curves.push(mjd);
        curves.push(mae);
    }
    Ok(GainReport { rows, nonquantized, curves })
}

/// MAE quantizers over the fading channel under both fusion rules, plus the
/// non-quantized DDT reference curve.
pub fn fading_sweep(
    base: &ScenarioConfig,
    cache: &ThresholdCache,
    channel_snr_db: f64,
    options: &TableOptions,
) -> Result<Vec<RocCurve>> {
    base.validate()?;
    let mut designs = Vec::new();
    for &m in &options.levels {
        let cfg = base.with_levels(m);
        designs.push((cfg, cache.thresholds_for(ObjectiveKind::AverageEntropy, &cfg)?.thresholds.clone()));
    }
    let mut curves = Vec::new();
    for (cfg, t) in designs {
        let channel = ChannelParams::from_channel_snr_db(channel_snr_db, cfg.levels)?;
        for mode in [FusionMode::FadingOptimal, FusionMode::FadingSubOptimal] {
            curves.push(run_roc(
                &ExperimentSpec::new(cfg, QuantizerMethod::Mae, mode)
                    .with_channel(channel)
                    .with_thresholds(t.clone())
                    .with_trials(options.trials, options.seed)
                    .with_pfa_grid(options.pfa_grid.clone()),
            )?);
        }
    }
    curves.push(run_roc(
        &ExperimentSpec::new(*base, QuantizerMethod::NonQuantized, FusionMode::DdtNonQuantized)
            .with_trials(options.trials, options.seed)
            .with_pfa_grid(options.pfa_grid.clone()),
    )?);
    Ok(curves)
}
