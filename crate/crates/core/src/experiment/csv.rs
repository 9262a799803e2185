//! CSV output of ROC curves and gain tables.
//!
//! Floats are written in Rust's shortest round-trip form so identical runs
//! produce identical bytes.

use std::io::Write;

use super::tables::GainReport;
use crate::error::{Error, Result};
use crate::model::RocCurve;

pub const ROC_CSV_HEADER: [&str; 9] = ["pfa", "pd", "pd_stderr", "method", "levels", "channel", "fusion", "trials", "seed"];

fn csv_error(e: ::csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per operating point, all curves under a single header.
pub fn write_roc_csv<W: Write>(curves: &[RocCurve], out: W) -> Result<()> {
    let mut w = ::csv::WriterBuilder::new().terminator(::csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(ROC_CSV_HEADER).map_err(csv_error)?;
    for curve in curves {
        let m = &curve.metadata;
        for p in curve.points() {
            w.write_record([
                p.p_fa.to_string(),
                p.p_d.to_string(),
                p.p_d_stderr.to_string(),
                m.method.clone(),
                m.levels.to_string(),
                m.channel.clone(),
                m.fusion.clone(),
                m.trials.to_string(),
                m.seed.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Gain table rows: `pfa,levels,pd_mjd,pd_mae,pd_nonquantized,gain,percent_gain,gain_stderr`.
pub fn write_gain_csv<W: Write>(report: &GainReport, out: W) -> Result<()> {
    let mut w = ::csv::WriterBuilder::new().terminator(::csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["pfa", "levels", "pd_mjd", "pd_mae", "pd_nonquantized", "gain", "percent_gain", "gain_stderr"])
        .map_err(csv_error)?;
    for r in &report.rows {
        w.write_record([
            r.p_fa.to_string(),
            r.levels.to_string(),
            r.pd_mjd.to_string(),
            r.pd_mae.to_string(),
            r.pd_nonquantized.to_string(),
            r.gain.to_string(),
            r.percent_gain.to_string(),
            r.gain_stderr().to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RocMetadata, RocPoint};

    #[test]
    fn header_and_rows() {
        let meta = RocMetadata {
            method: "mae".into(),
            levels: 2,
            channel: "ddt".into(),
            fusion: "lrt".into(),
            trials: 100,
            seed: 7,
        };
        let curve = RocCurve::new(
            vec![
                RocPoint { p_fa: 0.2, p_d: 0.6, p_d_stderr: 0.01 },
                RocPoint { p_fa: 0.1, p_d: 0.5, p_d_stderr: 0.01 },
            ],
            meta,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_roc_csv(&[curve], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "pfa,pd,pd_stderr,method,levels,channel,fusion,trials,seed\n\
             0.1,0.5,0.01,mae,2,ddt,lrt,100,7\n\
             0.2,0.6,0.01,mae,2,ddt,lrt,100,7\n"
        );
    }
}
