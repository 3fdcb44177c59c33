//! Experiment configuration schema and run manifests.
//!
//! Configs are JSON documents with a `kind` tag; unknown keys anywhere are
//! rejected. The manifest written next to each run echoes the resolved
//! config so `fsma rerun --manifest` reproduces the artifacts exactly.

use anyhow::{anyhow, bail, Context, Result};
use fsma_core::crossbar::CrossbarConfig;
use fsma_core::dfa::Dfa;
use fsma_core::rnn::CapacityConfig;
use fsma_core::weights::TransformPipeline;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Where the machine definition comes from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DfaSource {
    /// Modular-division machine with the given modulus.
    Moddiv(usize),
    /// Path to a machine in the line-oriented text format.
    File(String),
    /// Inline machine text.
    Text(String),
}

impl DfaSource {
    pub fn load(&self) -> Result<Dfa> {
        match self {
            DfaSource::Moddiv(p) => Ok(Dfa::moddiv(*p)?),
            DfaSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading machine file {path}"))?;
                Ok(Dfa::parse_text(&text)?)
            }
            DfaSource::Text(text) => Ok(Dfa::parse_text(text)?),
        }
    }
}

/// Mask timing for walk experiments (milliseconds for the spiking engine,
/// steps for the discrete engine).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ScheduleConfig {
    Regular {
        settle: f64,
        on: f64,
        off: f64,
    },
    /// On/off durations drawn uniformly per segment.
    Irregular {
        settle: f64,
        lo: f64,
        hi: f64,
    },
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig::Regular {
            settle: 200.0,
            on: 200.0,
            off: 200.0,
        }
    }
}

fn default_n() -> usize {
    2048
}

fn default_l() -> usize {
    8
}

fn default_mode() -> fsma_core::weights::CodebookMode {
    fsma_core::weights::CodebookMode::Random
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WalkSnnConfig {
    pub seed: u64,
    pub dfa: DfaSource,
    pub word: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_mode")]
    pub codebook: fsma_core::weights::CodebookMode,
    #[serde(default)]
    pub transform: TransformPipeline,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// Euler step override (ms).
    #[serde(default)]
    pub dt: Option<f64>,
    /// Mean charge per spike override (mV·F).
    #[serde(default)]
    pub mean_charge: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WalkRnnConfig {
    pub seed: u64,
    pub dfa: DfaSource,
    pub word: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_mode")]
    pub codebook: fsma_core::weights::CodebookMode,
    #[serde(default)]
    pub transform: TransformPipeline,
    #[serde(default = "default_steps")]
    pub on_steps: u32,
    #[serde(default = "default_steps")]
    pub off_steps: u32,
}

fn default_steps() -> u32 {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CrossbarExpConfig {
    pub seed: u64,
    pub dfa: DfaSource,
    pub word: String,
    #[serde(default)]
    pub crossbar: Option<CrossbarConfig>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default = "default_xbar_charge")]
    pub mean_charge: f64,
}

fn default_xbar_charge() -> f64 {
    4.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalogyConfig {
    pub seed: u64,
    #[serde(default = "default_analogy_n")]
    pub n: usize,
    #[serde(default = "default_analogy_l")]
    pub l: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_analogy_n() -> usize {
    1024
}

fn default_analogy_l() -> usize {
    4
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SnrConfig {
    pub seed: u64,
    #[serde(default = "default_modulus")]
    pub modulus: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_draws")]
    pub draws: usize,
}

fn default_modulus() -> usize {
    23
}

fn default_draws() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub seed: u64,
    #[serde(default = "default_energy_n")]
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_patterns")]
    pub patterns: usize,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: usize,
}

fn default_energy_n() -> usize {
    512
}

fn default_patterns() -> usize {
    10
}

fn default_starts() -> usize {
    1000
}

fn default_sweeps() -> usize {
    128
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegexConfig {
    pub seed: u64,
    /// Explicit patterns; when empty, `random_patterns` are drawn.
    #[serde(default)]
    pub patterns: Vec<String>,
    #[serde(default = "default_random_patterns")]
    pub random_patterns: usize,
    #[serde(default = "default_alphabet")]
    pub alphabet: String,
    /// Exhaustive agreement check up to this word length.
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    /// Also execute each machine on the discrete engine.
    #[serde(default)]
    pub run_network: bool,
    #[serde(default = "default_regex_n")]
    pub n: usize,
    #[serde(default = "default_l")]
    pub l: usize,
}

fn default_random_patterns() -> usize {
    10
}

fn default_alphabet() -> String {
    "01".to_string()
}

fn default_max_len() -> usize {
    8
}

fn default_regex_n() -> usize {
    1024
}

/// A full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentConfig {
    WalkSnn(WalkSnnConfig),
    WalkRnn(WalkRnnConfig),
    Capacity(CapacityConfig),
    Crossbar(CrossbarExpConfig),
    Analogy(AnalogyConfig),
    SnrCheck(SnrConfig),
    EnergyCheck(EnergyConfig),
    Regex(RegexConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::WalkSnn(_) => "walk-snn",
            ExperimentConfig::WalkRnn(_) => "walk-rnn",
            ExperimentConfig::Capacity(_) => "capacity",
            ExperimentConfig::Crossbar(_) => "crossbar",
            ExperimentConfig::Analogy(_) => "analogy",
            ExperimentConfig::SnrCheck(_) => "snr-check",
            ExperimentConfig::EnergyCheck(_) => "energy-check",
            ExperimentConfig::Regex(_) => "regex",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::WalkSnn(c) => c.seed,
            ExperimentConfig::WalkRnn(c) => c.seed,
            ExperimentConfig::Capacity(c) => c.seed,
            ExperimentConfig::Crossbar(c) => c.seed,
            ExperimentConfig::Analogy(c) => c.seed,
            ExperimentConfig::SnrCheck(c) => c.seed,
            ExperimentConfig::EnergyCheck(c) => c.seed,
            ExperimentConfig::Regex(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::WalkSnn(c) => c.seed = seed,
            ExperimentConfig::WalkRnn(c) => c.seed = seed,
            ExperimentConfig::Capacity(c) => c.seed = seed,
            ExperimentConfig::Crossbar(c) => c.seed = seed,
            ExperimentConfig::Analogy(c) => c.seed = seed,
            ExperimentConfig::SnrCheck(c) => c.seed = seed,
            ExperimentConfig::EnergyCheck(c) => c.seed = seed,
            ExperimentConfig::Regex(c) => c.seed = seed,
        }
    }

    /// Parse and schema-validate a config document. The document is an
    /// object with a `kind` field naming the experiment; all other keys
    /// belong to that experiment's schema and unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).context("config is not valid JSON")?;
        let object = value
            .as_object_mut()
            .ok_or_else(|| anyhow!("config must be a JSON object"))?;
        let kind = object
            .remove("kind")
            .ok_or_else(|| anyhow!("config is missing the `kind` field"))?;
        let kind = kind
            .as_str()
            .ok_or_else(|| anyhow!("`kind` must be a string"))?
            .to_string();
        let body = serde_json::Value::Object(object.clone());
        let parsed = match kind.as_str() {
            "walk-snn" => ExperimentConfig::WalkSnn(from_value(body)?),
            "walk-rnn" => ExperimentConfig::WalkRnn(from_value(body)?),
            "capacity" => ExperimentConfig::Capacity(from_value(body)?),
            "crossbar" => ExperimentConfig::Crossbar(from_value(body)?),
            "analogy" => ExperimentConfig::Analogy(from_value(body)?),
            "snr-check" => ExperimentConfig::SnrCheck(from_value(body)?),
            "energy-check" => ExperimentConfig::EnergyCheck(from_value(body)?),
            "regex" => ExperimentConfig::Regex(from_value(body)?),
            other => bail!("unknown experiment kind {other:?}"),
        };
        Ok(parsed)
    }

    /// Emit the JSON document form (with the `kind` tag inlined).
    pub fn to_json(&self) -> Result<String> {
        let body = match self {
            ExperimentConfig::WalkSnn(c) => serde_json::to_value(c)?,
            ExperimentConfig::WalkRnn(c) => serde_json::to_value(c)?,
            ExperimentConfig::Capacity(c) => serde_json::to_value(c)?,
            ExperimentConfig::Crossbar(c) => serde_json::to_value(c)?,
            ExperimentConfig::Analogy(c) => serde_json::to_value(c)?,
            ExperimentConfig::SnrCheck(c) => serde_json::to_value(c)?,
            ExperimentConfig::EnergyCheck(c) => serde_json::to_value(c)?,
            ExperimentConfig::Regex(c) => serde_json::to_value(c)?,
        };
        let mut object = body
            .as_object()
            .ok_or_else(|| anyhow!("config body must serialise to an object"))?
            .clone();
        object.insert(
            "kind".to_string(),
            serde_json::Value::String(self.kind().to_string()),
        );
        Ok(serde_json::to_string_pretty(&serde_json::Value::Object(
            object,
        ))?)
    }
}

fn from_value<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| anyhow!("config schema violation: {e}"))
}

/// Record written next to every run's artifacts.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub seed: u64,
    pub bit_exact: bool,
    pub config: serde_json::Value,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, bit_exact: bool) -> Result<Self> {
        Ok(Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed(),
            bit_exact,
            config: serde_json::from_str(&config.to_json()?)?,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<(Self, ExperimentConfig)> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let manifest: Manifest = serde_json::from_str(&text).context("manifest is not valid")?;
        let config = ExperimentConfig::from_json(&serde_json::to_string(&manifest.config)?)?;
        Ok((manifest, config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"kind": "analogy", "seed": 1, "bogus": 2}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err();
        assert!(err.to_string().contains("schema violation"), "{err}");
    }

    #[test]
    fn missing_kind_is_rejected() {
        let err = ExperimentConfig::from_json(r#"{"seed": 1}"#).unwrap_err();
        assert!(err.to_string().contains("kind"));
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{"kind": "walk-snn", "seed": 3, "dfa": {"moddiv": 23}, "word": "1000100",
                       "transform": {"binarize_beta": 2.0, "noise_sigma": 0.5}}"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(config.kind(), "walk-snn");
        let back = ExperimentConfig::from_json(&config.to_json().unwrap()).unwrap();
        assert_eq!(config, back);
    }
}
