//! Run configuration: a flat JSON document or the equivalent flag set.
//! Parsing is strict (unknown keys are rejected) and every numeric field is
//! range-checked before anything runs, so a recipe either replays exactly
//! or fails loudly.

use serde::{Deserialize, Serialize};
use wavesearch::oscillator::Family;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Grover,
    Wave,
    Quantum,
    Experiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    // wave
    Run,
    Reverse,
    RandomStop,
    // quantum
    Evolve,
    Frames,
    // experiment
    Damping,
    Scaling,
    Detuning,
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum FamilyArg {
    A,
    B,
}

impl From<FamilyArg> for Family {
    fn from(value: FamilyArg) -> Self {
        match value {
            FamilyArg::A => Family::A,
            FamilyArg::B => Family::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Standard,
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitialArg {
    Uniform,
    TranslationFree,
}

/// Everything a run can be told, with absent fields falling back to the
/// documented defaults (family = B, p = 1, a = 1, seed = 0, step = 1e-3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<VariantArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    // quantum
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    // experiment
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub focused: Option<f64>,
    // outputs
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

impl RunConfig {
    /// Strict JSON parse; serde names the offending key on unknown fields.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Field-wise overlay: explicitly passed flags beat file values.
    pub fn merged_over(self, file: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($field:ident) => {
                self.$field.or(file.$field)
            };
        }
        RunConfig {
            command: pick!(command),
            mode: pick!(mode),
            n: pick!(n),
            family: pick!(family),
            p: pick!(p),
            target: pick!(target),
            targets: pick!(targets),
            q: pick!(q),
            a: pick!(a),
            gamma: pick!(gamma),
            step: pick!(step),
            numeric: pick!(numeric),
            variant: pick!(variant),
            initial: pick!(initial),
            samples: pick!(samples),
            seed: pick!(seed),
            trials: pick!(trials),
            alpha_re: pick!(alpha_re),
            alpha_im: pick!(alpha_im),
            omega: pick!(omega),
            steps: pick!(steps),
            frames: pick!(frames),
            points: pick!(points),
            dt: pick!(dt),
            gammas: pick!(gammas),
            factors: pick!(factors),
            scale: pick!(scale),
            jitter: pick!(jitter),
            barrier: pick!(barrier),
            thermal: pick!(thermal),
            focused: pick!(focused),
            out_dir: pick!(out_dir),
            trajectory: pick!(trajectory),
            summary: pick!(summary),
            table: pick!(table),
        }
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command
            .ok_or_else(|| CliError::Validation("missing required field `command`".into()))
    }

    // -- defaulted accessors -------------------------------------------------

    pub fn family(&self) -> Family {
        self.family.unwrap_or(FamilyArg::B).into()
    }

    pub fn p(&self) -> u32 {
        self.p.unwrap_or(1)
    }

    pub fn amplitude(&self) -> f64 {
        self.a.unwrap_or(1.0)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn step(&self) -> f64 {
        self.step.unwrap_or(1e-3)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(0.0)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(32)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(100_000)
    }

    // -- validation ----------------------------------------------------------

    pub fn require_n(&self, min: usize) -> Result<usize, CliError> {
        let n = self
            .n
            .ok_or_else(|| CliError::Validation("missing required field `n`".into()))?;
        if n < min {
            return Err(CliError::Validation(format!(
                "field `n` = {n} out of range: must be at least {min}"
            )));
        }
        Ok(n)
    }

    /// Target set for wave runs: `target`, `targets`, or both merged.
    pub fn require_targets(&self, n: usize) -> Result<Vec<usize>, CliError> {
        let mut all: Vec<usize> = Vec::new();
        if let Some(t) = self.target {
            all.push(t);
        }
        if let Some(ts) = &self.targets {
            all.extend(ts.iter().copied());
        }
        if all.is_empty() {
            return Err(CliError::Validation(
                "missing required field `target` (or `targets`)".into(),
            ));
        }
        all.sort_unstable();
        all.dedup();
        for &t in &all {
            if t >= n {
                return Err(CliError::Validation(format!(
                    "field `target` = {t} out of range: must be below n = {n}"
                )));
            }
        }
        Ok(all)
    }

    pub fn check_positive(&self, name: &str, value: f64) -> Result<f64, CliError> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(CliError::Validation(format!(
                "field `{name}` = {value} out of range: must be positive"
            )));
        }
        Ok(value)
    }

    pub fn check_non_negative(&self, name: &str, value: f64) -> Result<f64, CliError> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(CliError::Validation(format!(
                "field `{name}` = {value} out of range: must be non-negative"
            )));
        }
        Ok(value)
    }
}
