use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::scan::{RelationsReport, TimeSeries};
use crate::error::{Error, Result};
use crate::spectrum::CommensurabilityReport;
use crate::transfer::PstCertificate;

pub const CSV_HEADER: &str = "t,fidelity,mmc,overlap_bound";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCondition {
    pub holds: bool,
    pub tau: Option<f64>,
}

/// Everything computed for one scenario. Absent sections are `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub certified: bool,
    pub scenario: Option<ScenarioConfig>,
    pub tau: Option<f64>,
    pub certificate: Option<PstCertificate>,
    pub commensurability: Option<CommensurabilityReport>,
    pub spectral_condition: Option<SpectralCondition>,
    pub parity_check: Option<bool>,
    pub relations: Option<RelationsReport>,
}

pub fn csv_string(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(80 * (series.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in series.rows() {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.fidelity, r.mmc, r.overlap_bound);
    }
    out
}

pub fn emit_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(series)).map_err(|e| Error::io(path, e))
}

pub fn report_json(report: &ScenarioReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialises");
    s.push('\n');
    s
}

pub fn emit_report(report: &ScenarioReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)).map_err(|e| Error::io(path, e))
}
