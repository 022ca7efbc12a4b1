//! CSV rows and the JSON run summary.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use fieldlab::scaling::ScalingReport;
use serde::Serialize;

use crate::runner::{Check, Outcome, Row};
use crate::scenario::Scenario;

pub const CSV_HEADER: &str = "run_kind,quantity,R,theta,phi,t_P,value_x,value_y,value_z,err_est,flags";

fn num(x: f64) -> String {
    format!("{x:.10e}")
}

pub fn csv(run_kind: &str, rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let fields = [r.r, r.theta, r.phi, r.t, r.value[0], r.value[1], r.value[2], r.err].map(num);
        let _ = writeln!(s, "{run_kind},{},{},{}", r.quantity, fields.join(","), r.flags.label());
    }
    s
}

#[derive(Debug, Serialize)]
pub struct SourceInfo {
    pub kind: &'static str,
    pub support_radius: Option<f64>,
    pub wavelength: Option<f64>,
    pub steady_after: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub run_kind: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub source: SourceInfo,
    pub rows: usize,
    pub flags: String,
    /// Observation or sweep direction `(θ, φ)` when one was chosen.
    pub direction: Option<(f64, f64)>,
    pub fits: &'a [ScalingReport],
    pub checks: &'a [Check],
    pub config: &'a Scenario,
}

pub fn summary<'a>(s: &'a Scenario, out: &'a Outcome, exit_code: i32) -> Summary<'a> {
    let built = s.source.build().ok();
    Summary {
        tool: "fieldlab",
        version: env!("CARGO_PKG_VERSION"),
        run_kind: s.run_kind().to_string(),
        exit_code,
        error: out.error.as_ref().map(|e| e.to_string()),
        source: SourceInfo {
            kind: s.source.kind(),
            support_radius: built.as_ref().map(|b| b.support().radius()),
            wavelength: built.as_ref().and_then(|b| b.wavelength()),
            steady_after: built.as_ref().map(|b| b.steady_after()),
        },
        rows: out.rows.len(),
        flags: out.flags().label(),
        direction: out.direction,
        fits: &out.fits,
        checks: &out.checks,
        config: s,
    }
}

/// Write the CSV and summary files into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, s: &Scenario, out: &Outcome, exit_code: i32) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(&s.output.csv), csv(s.run_kind().as_str(), &out.rows))?;
    let json = serde_json::to_string_pretty(&summary(s, out, exit_code)).map_err(io::Error::other)?;
    std::fs::write(dir.join(&s.output.summary), json + "\n")
}
