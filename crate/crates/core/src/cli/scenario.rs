//! Scenario files: one JSON document per run configuration.
//!
//! ```json
//! {
//!   "model": { "biolek": { "h_plus": 0.05, "h_minus": -0.1 } },
//!   "pulse": { "period": 1.0, "tau_plus": 0.2, "tau_minus": 0.2, "amp_plus": 1.0, "amp_minus": -1.0 },
//!   "run": { "x0": [0.0, 1.0], "t_end_periods": 300 },
//!   "output": { "path": "run.csv" }
//! }
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::exact_sim::IntegratorConfig;
use crate::models::{memristance, state_from_memristance, BiolekModel, Model, PulseTrain, ThresholdCircuit};

fn default_p() -> u32 {
    1
}

fn default_r_on() -> f64 {
    2000.0
}

fn default_r_off() -> f64 {
    10000.0
}

fn default_substeps() -> usize {
    IntegratorConfig::default().substeps_per_segment
}

fn default_samples() -> usize {
    IntegratorConfig::default().samples_per_period
}

fn default_decimation() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiolekBlock {
    pub h_plus: f64,
    pub h_minus: f64,
    #[serde(default = "default_p")]
    pub p: u32,
    /// Only used to report memristance.
    #[serde(default = "default_r_on")]
    pub r_on: f64,
    #[serde(default = "default_r_off")]
    pub r_off: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdBlock {
    pub beta: f64,
    pub v_on: f64,
    pub v_off: f64,
    pub r_series: f64,
    pub r_on: f64,
    pub r_off: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelBlock {
    Biolek(BiolekBlock),
    Threshold(ThresholdBlock),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    pub period: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub amp_plus: f64,
    pub amp_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    /// Initial states; mutually exclusive with `r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Initial memristances in ohms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<Vec<f64>>,
    pub t_end_periods: f64,
    #[serde(default = "default_substeps")]
    pub substeps_per_segment: usize,
    #[serde(default = "default_samples")]
    pub samples_per_period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Keep every n-th sample.
    #[serde(default = "default_decimation")]
    pub decimation: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { path: None, decimation: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelBlock,
    pub pulse: PulseBlock,
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

/// A scenario whose blocks have been turned into validated model objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub model: Model,
    pub train: PulseTrain,
    pub config: IntegratorConfig,
    pub x0: Vec<f64>,
    pub t_end: f64,
    pub r_on: f64,
    pub r_off: f64,
    pub decimation: usize,
}

impl Prepared {
    pub fn memristance(&self, x: f64) -> f64 {
        memristance(x.clamp(0.0, 1.0), self.r_on, self.r_off).expect("clamped state")
    }
}

fn invalid(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Invalid { field: field.to_string(), message: err.to_string() }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Compact JSON with a fixed field order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    pub fn sha256(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn build_model(&self) -> Result<(Model, f64, f64), CliError> {
        match &self.model {
            ModelBlock::Biolek(b) => {
                let m = BiolekModel::new(b.h_plus, b.h_minus, b.p).map_err(|e| invalid("model.biolek", e))?;
                if !(b.r_on > 0.0 && b.r_off > b.r_on) {
                    return Err(invalid("model.biolek.r_off", "need 0 < r_on < r_off"));
                }
                Ok((m.into(), b.r_on, b.r_off))
            }
            ModelBlock::Threshold(t) => {
                let c = ThresholdCircuit::new(t.beta, t.v_on, t.v_off, t.r_series, t.r_on, t.r_off)
                    .map_err(|e| invalid("model.threshold", e))?;
                Ok((c.into(), t.r_on, t.r_off))
            }
        }
    }

    pub fn build_train(&self) -> Result<PulseTrain, CliError> {
        let p = &self.pulse;
        PulseTrain::new(p.period, p.tau_plus, p.tau_minus, p.amp_plus, p.amp_minus).map_err(|e| invalid("pulse", e))
    }

    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let (model, r_on, r_off) = self.build_model()?;
        let train = self.build_train()?;
        let run = &self.run;
        let config =
            IntegratorConfig::new(run.substeps_per_segment, run.samples_per_period).map_err(|e| invalid("run", e))?;
        if !(run.t_end_periods >= 1.0) {
            return Err(invalid("run.t_end_periods", format!("must be at least 1, got {}", run.t_end_periods)));
        }
        let x0 = match (&run.x0, &run.r0) {
            (Some(_), Some(_)) => return Err(invalid("run", "give either x0 or r0, not both")),
            (None, None) => return Err(invalid("run.x0", "an initial-condition list is required")),
            (Some(xs), None) => {
                if let Some(bad) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(invalid("run.x0", format!("initial state {bad} lies outside [0, 1]")));
                }
                xs.clone()
            }
            (None, Some(rs)) => {
                if let Some(bad) = rs.iter().find(|r| !(r_on..=r_off).contains(*r)) {
                    return Err(invalid("run.r0", format!("memristance {bad} lies outside [{r_on}, {r_off}]")));
                }
                rs.iter().map(|&r| state_from_memristance(r, r_on, r_off).clamp(0.0, 1.0)).collect()
            }
        };
        if x0.is_empty() {
            let field = if run.x0.is_some() { "run.x0" } else { "run.r0" };
            return Err(invalid(field, "initial-condition list is empty"));
        }
        if self.output.decimation == 0 {
            return Err(invalid("output.decimation", "must be >= 1"));
        }
        Ok(Prepared {
            model,
            train,
            config,
            x0,
            t_end: run.t_end_periods * train.period(),
            r_on,
            r_off,
            decimation: self.output.decimation,
        })
    }
}
