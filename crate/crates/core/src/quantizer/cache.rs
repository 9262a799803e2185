//! Plain-text store of designed thresholds.
//!
//! One record per line, whitespace-separated `key=value` fields:
//!
//! ```text
//! # qdetect threshold cache
//! method=mae levels=3 snr_db=0 ratio_l=10 cuts=-0.3437,0.5228 objective=1.5656 design_law=uniform-disk averaging=per-amplitude settings=4f1c0a9e2b7d3c51
//! ```
//!
//! Records are keyed by `(method, levels, snr_db, ratio_l)`. Floats are written
//! in Rust's shortest round-trip form, so reloading is exact. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt;
use std::fs;
use std::path::Path;

use super::objective::ObjectiveKind;
use crate::error::{Error, Result};
use crate::model::{AmplitudeLaw, DesignAveraging, ScenarioConfig, ThresholdVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub method: ObjectiveKind,
    pub levels: usize,
    pub snr_db: f64,
    pub ratio_l: f64,
}

impl CacheKey {
    pub fn for_config(method: ObjectiveKind, config: &ScenarioConfig) -> Self {
        CacheKey { method, levels: config.levels, snr_db: config.snr_db, ratio_l: config.amplitude_ratio }
    }

    fn matches(&self, other: &CacheKey) -> bool {
        self.method == other.method
            && self.levels == other.levels
            && (self.snr_db - other.snr_db).abs() < 1e-9
            && (self.ratio_l - other.ratio_l).abs() < 1e-9
    }
}

impl fmt::Display for CacheKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.method, self.levels, self.snr_db, self.ratio_l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub thresholds: ThresholdVector,
    pub objective: f64,
    pub design_law: AmplitudeLaw,
    pub averaging: DesignAveraging,
    /// Fingerprint of the optimizer settings that produced the record.
    pub settings: String,
}

fn averaging_tag(a: DesignAveraging) -> &'static str {
    match a {
        DesignAveraging::PerAmplitude => "per-amplitude",
        DesignAveraging::PooledPmf => "pooled",
    }
}

impl CacheRecord {
    fn to_line(&self) -> String {
        let cuts: Vec<String> = self.thresholds.cuts().iter().map(|c| c.to_string()).collect();
        format!(
            "method={} levels={} snr_db={} ratio_l={} cuts={} objective={} design_law={} averaging={} settings={}",
            self.key.method,
            self.key.levels,
            self.key.snr_db,
            self.key.ratio_l,
            cuts.join(","),
            self.objective,
            self.design_law.name(),
            averaging_tag(self.averaging),
            self.settings
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<Self> {
        let err = |reason: String| Error::CacheFormat { line: line_no, reason };
        let mut method = None;
        let mut levels = None;
        let mut snr_db = None;
        let mut ratio_l = None;
        let mut cuts = None;
        let mut objective = None;
        let mut design_law = AmplitudeLaw::UniformDisk;
        let mut averaging = DesignAveraging::PerAmplitude;
        let mut settings = String::new();
        for field in line.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| err(format!("field `{field}` is not key=value")))?;
            let float = |v: &str| v.parse::<f64>().map_err(|_| err(format!("`{k}` is not a number: {v}")));
            match k {
                "method" => method = Some(v.parse::<ObjectiveKind>().map_err(|e| err(e.to_string()))?),
                "levels" => levels = Some(v.parse::<usize>().map_err(|_| err(format!("bad levels `{v}`")))?),
                "snr_db" => snr_db = Some(float(v)?),
                "ratio_l" => ratio_l = Some(float(v)?),
                "cuts" => {
                    let parsed: Result<Vec<f64>> = v.split(',').filter(|s| !s.is_empty()).map(float).collect();
                    cuts = Some(parsed?);
                }
                "objective" => objective = Some(float(v)?),
                "design_law" => design_law = v.parse().map_err(|e: Error| err(e.to_string()))?,
                "averaging" => {
                    averaging = match v {
                        "per-amplitude" => DesignAveraging::PerAmplitude,
                        "pooled" => DesignAveraging::PooledPmf,
                        other => return Err(err(format!("unknown averaging `{other}`"))),
                    }
                }
                "settings" => settings = v.to_string(),
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }
        let missing = |name: &str| err(format!("missing `{name}`"));
        let key = CacheKey {
            method: method.ok_or_else(|| missing("method"))?,
            levels: levels.ok_or_else(|| missing("levels"))?,
            snr_db: snr_db.ok_or_else(|| missing("snr_db"))?,
            ratio_l: ratio_l.ok_or_else(|| missing("ratio_l"))?,
        };
        let thresholds = ThresholdVector::for_levels(cuts.ok_or_else(|| missing("cuts"))?, key.levels)
            .map_err(|e| err(e.to_string()))?;
        Ok(CacheRecord {
            key,
            thresholds,
            objective: objective.ok_or_else(|| missing("objective"))?,
            design_law,
            averaging,
            settings,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdCache {
    records: Vec<CacheRecord>,
}

impl ThresholdCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cache = ThresholdCache::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            cache.insert(CacheRecord::parse(trimmed, i + 1)?);
        }
        Ok(cache)
    }

    /// Loads a cache file; a missing file yields an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# qdetect threshold cache\n");
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    /// Inserts or replaces the record with the same key.
    pub fn insert(&mut self, record: CacheRecord) {
        match self.records.iter_mut().find(|r| r.key.matches(&record.key)) {
            Some(slot) => *slot = record,
            None => self.records.push(record),
        }
    }

    pub fn get(&self, key: &CacheKey) -> Option<&CacheRecord> {
        self.records.iter().find(|r| r.key.matches(key))
    }

    /// Looks up thresholds designed under the same design law and averaging as `config`.
    pub fn thresholds_for(&self, method: ObjectiveKind, config: &ScenarioConfig) -> Result<&CacheRecord> {
        let key = CacheKey::for_config(method, config);
        match self.get(&key) {
            Some(r) if r.design_law == config.design_law && r.averaging == config.design_averaging => Ok(r),
            Some(r) => Err(Error::MissingCacheEntry(format!(
                "{key} (cached record was designed with {} / {})",
                r.design_law.name(),
                averaging_tag(r.averaging)
            ))),
            None => Err(Error::MissingCacheEntry(key.to_string())),
        }
    }

    pub fn records(&self) -> &[CacheRecord] {
        &self.records
    }
}
