//! Flag resolution: key=value config files mirror the command-line flags,
//! and FLIPLAB_SEED overrides any seed flag.

use crate::CliError;
use fliplab_core::dynamics::PivotRule;
use fliplab_core::weights::{BaseWeights, WeightModel};
use serde::Serialize;
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

pub const SEED_ENV: &str = "FLIPLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Uniform,
    Gaussian,
}

impl FromStr for ModelArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" | "uniform-window" => Ok(ModelArg::Uniform),
            "gaussian" | "truncated-gaussian" => Ok(ModelArg::Gaussian),
            other => Err(format!("unknown model {other:?}")),
        }
    }
}

impl ModelArg {
    pub fn build(
        self,
        phi: f64,
        sigma: f64,
        seed: u64,
        base: Option<&Path>,
        n: Option<usize>,
    ) -> Result<WeightModel, CliError> {
        let model = match self {
            ModelArg::Uniform => WeightModel::uniform_window(phi, seed),
            ModelArg::Gaussian => WeightModel::truncated_gaussian(sigma, seed),
        }
        .map_err(|e| CliError::Usage(e.to_string()))?;
        match base {
            None => Ok(model),
            Some(path) => {
                let n = n.ok_or_else(|| {
                    CliError::Usage("base weights need a single --n".to_string())
                })?;
                let text = std::fs::read_to_string(path)?;
                let base = BaseWeights::parse(&text, n)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                model.with_base(base).map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    First,
    Best,
    Random,
    MinGain,
}

impl FromStr for RuleArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "first" => Ok(RuleArg::First),
            "best" => Ok(RuleArg::Best),
            "random" => Ok(RuleArg::Random),
            "min-gain" | "mingain" => Ok(RuleArg::MinGain),
            other => Err(format!("unknown rule {other:?}")),
        }
    }
}

impl RuleArg {
    pub fn to_pivot(self, seed: u64) -> PivotRule {
        match self {
            RuleArg::First => PivotRule::First,
            RuleArg::Best => PivotRule::Best,
            RuleArg::Random => PivotRule::Random { seed },
            RuleArg::MinGain => PivotRule::MinGain,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleArg::First => "first",
            RuleArg::Best => "best",
            RuleArg::Random => "random",
            RuleArg::MinGain => "min-gain",
        }
    }

    pub fn all() -> [RuleArg; 4] {
        [RuleArg::First, RuleArg::Best, RuleArg::Random, RuleArg::MinGain]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

impl FromStr for FormatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(FormatArg::Csv),
            "json" => Ok(FormatArg::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// A `key = value` file whose keys mirror the flags.
#[derive(Debug, Default)]
pub struct KvConfig(HashMap<String, String>);

impl KvConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KvConfig(map))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: bad value {raw:?}"))),
        }
    }

    /// Comma-separated list values, e.g. `n = 32,64,128`.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|part| part.trim().parse())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: bad list {raw:?}"))),
        }
    }
}

/// Seed resolution: environment beats the flag, which beats the config
/// file, which beats the default.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>, default: u64) -> Result<u64, CliError> {
    if let Ok(raw) = std::env::var(SEED_ENV) {
        return raw
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} is not an integer: {raw:?}")));
    }
    Ok(flag.or(file).unwrap_or(default))
}
