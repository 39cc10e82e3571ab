//! Serialized run outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tfn_core::{IterationReport, NetworkSolution, StateVector};

use crate::config::{ComplexValue, NetworkConfig};

pub const TOOL_NAME: &str = "tfn";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// RFC 3339 UTC timestamp, or `None` when timestamps are suppressed.
pub fn timestamp(enabled: bool) -> Option<String> {
    enabled.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn entries(v: &StateVector) -> Vec<ComplexValue> {
    v.entries().iter().map(|&z| z.into()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub psi_in: Vec<ComplexValue>,
    pub psi1: Vec<ComplexValue>,
    pub psi2: Vec<ComplexValue>,
    pub psi4: Vec<ComplexValue>,
    pub psi1p: Vec<ComplexValue>,
    pub psi2p: Vec<ComplexValue>,
    pub psi3p: Vec<ComplexValue>,
    pub psi4p: Vec<ComplexValue>,
}

impl From<&NetworkSolution> for Amplitudes {
    fn from(sol: &NetworkSolution) -> Self {
        Self {
            psi_in: entries(&sol.psi_in),
            psi1: entries(&sol.psi1),
            psi2: entries(&sol.psi2),
            psi4: entries(&sol.psi4),
            psi1p: entries(&sol.psi1p),
            psi2p: entries(&sol.psi2p),
            psi3p: entries(&sol.psi3p),
            psi4p: entries(&sol.psi4p),
        }
    }
}

impl Amplitudes {
    pub fn labelled(&self) -> [(&'static str, &[ComplexValue]); 8] {
        [
            ("psi_in", &self.psi_in),
            ("psi1", &self.psi1),
            ("psi2", &self.psi2),
            ("psi4", &self.psi4),
            ("psi1p", &self.psi1p),
            ("psi2p", &self.psi2p),
            ("psi3p", &self.psi3p),
            ("psi4p", &self.psi4p),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitterEcho {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub iterations: usize,
    pub converged: bool,
    pub final_update_norm: f64,
    pub loop_spectral_radius: f64,
    pub tolerance: f64,
    /// Max-norm difference of the output states over the closed-form output.
    pub relative_difference: f64,
}

impl OracleComparison {
    pub fn new(report: &IterationReport, tolerance: f64, relative_difference: f64) -> Self {
        Self {
            iterations: report.iterations_used,
            converged: report.converged,
            final_update_norm: report.final_update_norm,
            loop_spectral_radius: report.loop_spectral_radius_estimate,
            tolerance,
            relative_difference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub config: NetworkConfig,
    pub splitter: SplitterEcho,
    pub amplitudes: Amplitudes,
    pub transmitted_probability: f64,
    pub conservation_residual_t1: f64,
    pub conservation_residual_t2: f64,
    pub denominator_condition: f64,
    pub fixed_point_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record fields are serializable");
        s.push('\n');
        s
    }

    /// One row per amplitude entry, diagnostics as `#` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("amplitude,index,re,im\n");
        for (name, values) in self.amplitudes.labelled() {
            for (k, z) in values.iter().enumerate() {
                writeln!(out, "{name},{k},{},{}", z.re, z.im).unwrap();
            }
        }
        writeln!(out, "# tool={} {}", self.tool, self.version).unwrap();
        if let Some(ts) = &self.timestamp {
            writeln!(out, "# timestamp={ts}").unwrap();
        }
        writeln!(out, "# alpha={}", self.splitter.alpha).unwrap();
        writeln!(out, "# beta={}", self.splitter.beta).unwrap();
        writeln!(out, "# transmitted_probability={}", self.transmitted_probability).unwrap();
        writeln!(out, "# conservation_residual_t1={}", self.conservation_residual_t1).unwrap();
        writeln!(out, "# conservation_residual_t2={}", self.conservation_residual_t2).unwrap();
        writeln!(out, "# denominator_condition={}", self.denominator_condition).unwrap();
        writeln!(out, "# fixed_point_residual={}", self.fixed_point_residual).unwrap();
        if let Some(o) = &self.oracle {
            writeln!(out, "# oracle_iterations={}", o.iterations).unwrap();
            writeln!(out, "# oracle_relative_difference={}", o.relative_difference).unwrap();
        }
        writeln!(
            out,
            "# config={}",
            serde_json::to_string(&self.config).expect("config is serializable")
        )
        .unwrap();
        out
    }
}

/// Summary of a named scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub tool: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub scenario: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub metrics: BTreeMap<String, f64>,
    pub passed: bool,
}

impl ScenarioRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record fields are serializable");
        s.push('\n');
        s
    }
}
