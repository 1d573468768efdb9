use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sparsedisc::dictionary::{FrequencyGrid, DEFAULT_SIZE_CAP};
use sparsedisc::sampling::SamplingMode;
use sparsedisc::Dictionary;

use crate::error::CliError;

pub const SCHEMA: &str = include_str!("../schema/experiment.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    DiscretizeCheck,
    SweepM,
    Rip,
    Recover,
    Lebesgue,
    LsUniversal,
    BlockGreedy,
    Lowerbound,
    Entropy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DiscretizeCheck => "discretize-check",
            Command::SweepM => "sweep-m",
            Command::Rip => "rip",
            Command::Recover => "recover",
            Command::Lebesgue => "lebesgue",
            Command::LsUniversal => "ls-universal",
            Command::BlockGreedy => "block-greedy",
            Command::Lowerbound => "lowerbound",
            Command::Entropy => "entropy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Trig,
    TrigWindow,
    HyperbolicCross,
    Sine,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionarySpec {
    pub family: Option<Family>,
    /// Cube half-width for `trig`, hyperbolic-cross parameter for `hyperbolic-cross`.
    #[serde(rename = "M")]
    pub big_m: Option<u64>,
    /// Number of atoms for `trig-window` and `sine`.
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub d: Option<usize>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub mode: Option<SamplingMode>,
    pub m: Option<usize>,
    pub m_sweep: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WienerParams {
    #[serde(rename = "M")]
    pub big_m: Option<u64>,
    pub d: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub dense_blocks: Option<u32>,
    pub sparse_blocks: Option<Vec<(u32, usize)>>,
    pub fill: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub v: Option<usize>,
    pub u: Option<usize>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub c: Option<usize>,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    pub trials: Option<usize>,
    pub cap: Option<u64>,
    pub target: Option<f64>,
    pub max_m: Option<usize>,
    pub targets: Option<usize>,
    pub deltas: Option<Vec<f64>>,
    pub randomized_samples: Option<usize>,
    pub record_limit: Option<usize>,
    pub quadrature: Option<usize>,
    pub members: Option<usize>,
    pub k_max: Option<usize>,
    pub beta: Option<f64>,
    pub n_values: Option<Vec<u32>>,
    pub wiener: Option<WienerParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dictionary: Option<DictionarySpec>,
    #[serde(default)]
    pub sampling: Option<SamplingSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// 1-based line of the value at `path` in `text`, found by scanning for the
/// quoted keys in order. Falls back to line 1.
pub fn locate(text: &str, path: &[&str]) -> usize {
    let mut pos = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        match text[pos..].find(&needle) {
            Some(i) => pos += i,
            None => break,
        }
    }
    text[..pos].matches('\n').count() + 1
}

fn invalid(text: &str, path: &[&str], message: impl Into<String>) -> CliError {
    CliError::Validation {
        line: locate(text, path),
        message: message.into(),
    }
}

fn schema_check(text: &str, value: &Value) -> Result<(), CliError> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let Some(err) = validator.iter_errors(value).next() else {
        return Ok(());
    };
    let mut path: Vec<String> = err
        .instance_path()
        .as_str()
        .split('/')
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect();
    if let jsonschema::error::ValidationErrorKind::AdditionalProperties { unexpected } = err.kind() {
        if let Some(k) = unexpected.first() {
            path.push(k.clone());
        }
    }
    let refs: Vec<&str> = path.iter().map(String::as_str).collect();
    let at = if refs.is_empty() { "/".to_owned() } else { format!("/{}", refs.join("/")) };
    Err(invalid(text, &refs, format!("{at}: {err}")))
}

/// Parses and validates a config: JSON syntax, the bundled schema, then the
/// typed structure, then cross-field constraints.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Validation {
        line: e.line(),
        message: e.to_string(),
    })?;
    schema_check(text, &value)?;
    let cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| CliError::Validation {
        line: 1,
        message: e.to_string(),
    })?;
    cfg.validate(text)?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn needs_dictionary(&self) -> bool {
        self.command != Command::BlockGreedy
    }

    pub fn build_dictionary(&self) -> Result<Dictionary, CliError> {
        self.dictionary_checked("")
    }

    fn dictionary_checked(&self, text: &str) -> Result<Dictionary, CliError> {
        let Some(spec) = &self.dictionary else {
            return Err(invalid(text, &[], format!("{} needs a dictionary", self.command.name())));
        };
        let need = |v: Option<u64>, key: &str| {
            v.ok_or_else(|| invalid(text, &["dictionary"], format!("dictionary.{key} is required")))
        };
        let family = spec
            .family
            .ok_or_else(|| invalid(text, &["dictionary"], "dictionary.family is required"))?;
        let d = spec.d.unwrap_or(1);
        let built = match family {
            Family::Trig => Dictionary::trig(need(spec.big_m, "M")? as usize, d, DEFAULT_SIZE_CAP),
            Family::TrigWindow => {
                Dictionary::trig_window(need(spec.big_n.map(|n| n as u64), "N")? as usize)
            }
            Family::HyperbolicCross => {
                FrequencyGrid::hyperbolic_cross(need(spec.big_m, "M")?, d, DEFAULT_SIZE_CAP)
                    .map(|g| Dictionary::trig_on(&g))
            }
            Family::Sine => Dictionary::sine(
                need(spec.big_n.map(|n| n as u64), "N")? as usize,
                spec.scale.unwrap_or(std::f64::consts::SQRT_2),
            ),
        };
        built.map_err(|e| match e {
            e if e.is_cap() => CliError::Core(e),
            e => invalid(text, &["dictionary"], e.to_string()),
        })
    }

    pub fn sampling_mode(&self) -> SamplingMode {
        self.sampling
            .as_ref()
            .and_then(|s| s.mode)
            .unwrap_or(SamplingMode::IidUniform)
    }

    fn validate(&self, text: &str) -> Result<(), CliError> {
        let p = &self.params;
        let n = if self.needs_dictionary() {
            Some(self.dictionary_checked(text)?.len())
        } else {
            None
        };
        let require = |present: bool, key: &str| -> Result<(), CliError> {
            if present {
                Ok(())
            } else {
                Err(invalid(text, &["params"], format!("{} needs params.{key}", self.command.name())))
            }
        };
        let m = self.sampling.as_ref().and_then(|s| s.m);
        let needs_m = !matches!(self.command, Command::SweepM | Command::Entropy);
        if needs_m {
            if m.is_none() {
                return Err(invalid(
                    text,
                    &["sampling"],
                    format!("{} needs sampling.m", self.command.name()),
                ));
            }
            if m == Some(0) {
                return Err(invalid(text, &["sampling", "m"], "sampling.m must be positive"));
            }
        }
        match self.command {
            Command::DiscretizeCheck | Command::Rip | Command::SweepM | Command::Entropy => {
                require(p.v.is_some(), "v")?
            }
            Command::Recover | Command::Lebesgue | Command::LsUniversal => {
                require(p.v.is_some(), "v")?;
                if self.command != Command::LsUniversal {
                    require(p.c.is_some(), "c")?;
                }
            }
            Command::BlockGreedy => {
                require(p.wiener.is_some(), "wiener")?;
                require(p.n_values.is_some(), "n_values")?;
            }
            Command::Lowerbound => {
                if self.dictionary.as_ref().and_then(|d| d.family) != Some(Family::Sine) {
                    return Err(invalid(text, &["dictionary", "family"], "lowerbound needs the sine family"));
                }
                if self.sampling_mode() != SamplingMode::IidUniform
                    && self.sampling_mode() != SamplingMode::Equispaced
                {
                    return Err(invalid(
                        text,
                        &["sampling", "mode"],
                        "lowerbound supports iid-uniform and equispaced points",
                    ));
                }
            }
        }
        if self.command == Command::SweepM {
            let sweep = self.sampling.as_ref().and_then(|s| s.m_sweep.as_ref());
            if sweep.is_none_or(|s| s.is_empty()) && p.target.is_none() {
                return Err(invalid(text, &["sampling"], "sweep-m needs sampling.m_sweep or params.target"));
            }
            if sweep.is_some_and(|s| s.contains(&0)) {
                return Err(invalid(text, &["sampling", "m_sweep"], "sweep sizes must be positive"));
            }
        }
        if let (Some(v), Some(n)) = (p.v, n) {
            if v == 0 || v > n {
                return Err(invalid(text, &["params", "v"], format!("need 1 ≤ v ≤ N = {n}, got v = {v}")));
            }
        }
        if let (Some(u), Some(n)) = (p.u, n) {
            if u == 0 || u > n {
                return Err(invalid(text, &["params", "u"], format!("need 1 ≤ u ≤ N = {n}, got u = {u}")));
            }
        }
        if let (Some(c1), Some(c2)) = (p.c1, p.c2) {
            if c1 > c2 {
                return Err(invalid(text, &["params", "C1"], "C1 must not exceed C2"));
            }
        }
        if let Some(t) = p.t {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid(text, &["params", "t"], "t must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}
