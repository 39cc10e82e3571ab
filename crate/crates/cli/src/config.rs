//! JSON network descriptions.
//!
//! ```json
//! {
//!   "dim": 1,
//!   "g1": "zero",
//!   "g2": "phase:-0.4",
//!   "m": "phase:0.4",
//!   "beta": 0.1,
//!   "input_state": "basis:0"
//! }
//! ```
//!
//! Operators are either presets (`zero`, `identity`, `phase:<radians>`,
//! `random-unitary:<seed>`) or row-major matrix literals of `{"re", "im"}`
//! entries. Exactly one of `alpha` / `beta` is given.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use tfn_core::{FeedbackNetwork, Operator, SplitterParams, StateVector};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Preset(String),
    Matrix(Vec<Vec<ComplexValue>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Vector(Vec<ComplexValue>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub dim: usize,
    pub g1: OperatorSpec,
    pub g2: OperatorSpec,
    pub m: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub input_state: StateSpec,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_number<T: std::str::FromStr>(field: &str, text: &str) -> Result<T, CliError> {
    text.trim()
        .parse()
        .map_err(|_| invalid(format!("{field}: cannot parse '{text}'")))
}

impl NetworkConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed config: {e}")))
    }

    pub fn splitter(&self) -> Result<SplitterParams, CliError> {
        let params = match (self.alpha, self.beta) {
            (Some(a), None) => SplitterParams::from_alpha(a),
            (None, Some(b)) => SplitterParams::from_beta(b),
            _ => return Err(invalid("exactly one of alpha and beta must be given")),
        };
        params.map_err(|e| invalid(e.to_string()))
    }

    pub fn operator(&self, field: &str, spec: &OperatorSpec) -> Result<Operator, CliError> {
        let dim = self.dim;
        let op = match spec {
            OperatorSpec::Preset(name) => match name.split_once(':') {
                None if name == "zero" => Operator::zeros(dim),
                None if name == "identity" => Operator::identity(dim),
                Some(("phase", arg)) => Operator::phase(dim, parse_number(field, arg)?),
                Some(("random-unitary", arg)) => Operator::random_unitary(dim, parse_number(field, arg)?),
                _ => return Err(invalid(format!("{field}: unknown operator preset '{name}'"))),
            },
            OperatorSpec::Matrix(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(invalid(format!("{field}: matrix literal must be {dim}x{dim}")));
                }
                Operator::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|&z| z.into()).collect())
                        .collect(),
                )
            }
        };
        op.map_err(|e| invalid(format!("{field}: {e}")))
    }

    pub fn input_state(&self) -> Result<StateVector, CliError> {
        let state = match &self.input_state {
            StateSpec::Preset(name) => match name.split_once(':') {
                Some(("basis", arg)) => StateVector::basis(self.dim, parse_number("input_state", arg)?),
                _ => return Err(invalid(format!("input_state: unknown preset '{name}'"))),
            },
            StateSpec::Vector(entries) => {
                if entries.len() != self.dim {
                    return Err(invalid(format!("input_state: expected {} entries", self.dim)));
                }
                StateVector::new(entries.iter().map(|&z| z.into()).collect())
            }
        };
        state.map_err(|e| invalid(format!("input_state: {e}")))
    }

    pub fn build(&self) -> Result<(FeedbackNetwork, StateVector), CliError> {
        let net = FeedbackNetwork::new(
            self.operator("g1", &self.g1)?,
            self.operator("g2", &self.g2)?,
            self.operator("m", &self.m)?,
            self.splitter()?,
        )
        .map_err(|e| invalid(e.to_string()))?;
        Ok((net, self.input_state()?))
    }
}
