//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Flags override file values. Every key maps one-to-one onto a flag
//! (`outer_trials` ↔ `--outer-trials`). List-valued keys take
//! comma-separated values; `n` also accepts `c/eta` for `n = ⌈c/η⌉`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use poisonlab_core::adversaries::ADVERSARY_IDS;
use poisonlab_core::experiments::{
    ExperimentKind, SizeRule, SweepGrid, DEFAULT_SEED, DEFAULT_TRIALS, LEARNER_IDS,
};
use poisonlab_core::rng::fnv1a64;
use poisonlab_core::Budget;

use crate::error::CliError;

/// Keys accepted in config files and as flags.
pub const KEYS: [&str; 13] = [
    "adversary",
    "bias",
    "d",
    "eta",
    "experiment",
    "format",
    "learner",
    "n",
    "out",
    "outer_trials",
    "seed",
    "threads",
    "trials",
];

/// Keys that do not change results and are left out of the config hash.
const UNHASHED: [&str; 3] = ["format", "out", "threads"];

pub const DEFAULT_OUTER_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Run,
    Sweep,
    AttackEval,
    Curve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Run => "run",
            Self::Sweep => "sweep",
            Self::AttackEval => "attack-eval",
            Self::Curve => "curve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

/// Raw `key -> value` pairs before validation.
pub type RawConfig = BTreeMap<String, String>;

/// Parses the flat config format. `#` starts a comment; blank lines are ignored.
pub fn parse_config_text(text: &str, origin: &str) -> Result<RawConfig, CliError> {
    let mut map = RawConfig::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| CliError::Syntax { path: origin.to_string(), line: i + 1, message: message.into() };
        let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::UnknownKey(key.to_string()));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(syntax(&format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text, &path.display().to_string())
}

/// Validated configuration for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub experiment: ExperimentKind,
    pub etas: Vec<Budget>,
    pub dims: Vec<usize>,
    pub sizes: SizeRule,
    /// `None` lets the command pick its own default.
    pub biases: Option<Vec<f64>>,
    pub learners: Vec<String>,
    /// `None` lets the command pick its own default.
    pub adversaries: Option<Vec<String>>,
    pub trials: usize,
    pub outer_trials: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

fn list<T>(key: &str, value: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = value
        .split(',')
        .map(|s| parse(s.trim()).map_err(|m| CliError::key(key, m)))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::key(key, "empty list"));
    }
    Ok(items)
}

fn positive(key: &str, value: &str) -> Result<usize, CliError> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(CliError::key(key, format!("expected a positive integer, got `{value}`"))),
    }
}

fn check_learner(id: &str) -> Result<String, String> {
    let base = id.strip_prefix("public(").and_then(|s| s.strip_suffix(')')).unwrap_or(id);
    if LEARNER_IDS.contains(&base) {
        Ok(id.to_string())
    } else {
        Err(format!("unknown learner `{id}` (expected one of {}, or public(<id>))", LEARNER_IDS.join(", ")))
    }
}

fn check_adversary(id: &str) -> Result<String, String> {
    if ADVERSARY_IDS.contains(&id) {
        Ok(id.to_string())
    } else {
        Err(format!("unknown adversary `{id}` (expected one of {})", ADVERSARY_IDS.join(", ")))
    }
}

fn parse_sizes(value: &str) -> Result<SizeRule, CliError> {
    if let Some(c) = value.trim().strip_suffix("/eta") {
        return match c.trim().parse::<u64>() {
            Ok(c) if c > 0 => Ok(SizeRule::Scaled(c)),
            _ => Err(CliError::key("n", format!("expected `c/eta` with a positive integer c, got `{value}`"))),
        };
    }
    Ok(SizeRule::Fixed(list("n", value, |s| match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    })?))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Builds and validates a configuration from raw pairs.
    pub fn from_raw(command: Command, raw: &RawConfig) -> Result<Self, CliError> {
        if let Some(k) = raw.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::UnknownKey(k.clone()));
        }
        let get = |k: &str| raw.get(k).map(String::as_str);
        let experiment = match get("experiment") {
            Some(v) => v.parse::<ExperimentKind>().map_err(|e| CliError::key("experiment", e.to_string()))?,
            None => ExperimentKind::Adversarial,
        };
        let etas = match get("eta") {
            Some(v) => list("eta", v, |s| s.parse::<Budget>().map_err(|e| e.to_string()))?,
            None => vec![Budget::new(1, 64)?],
        };
        let dims = match get("d") {
            Some(v) => list("d", v, |s| match s.parse::<usize>() {
                Ok(d) if d > 0 => Ok(d),
                _ => Err(format!("expected a positive integer, got `{s}`")),
            })?,
            None => vec![1],
        };
        let sizes = match get("n") {
            Some(v) => parse_sizes(v)?,
            None => SizeRule::default(),
        };
        let biases = match get("bias") {
            Some(v) => Some(list("bias", v, |s| match s.parse::<f64>() {
                Ok(b) if (-0.5..=0.5).contains(&b) => Ok(b),
                _ => Err(format!("expected a number in [-1/2, 1/2], got `{s}`")),
            })?),
            None => None,
        };
        let learners = match get("learner") {
            Some(v) => list("learner", v, check_learner)?,
            None => vec!["exp".to_string()],
        };
        let adversaries = match get("adversary") {
            Some(v) => Some(list("adversary", v, check_adversary)?),
            None => None,
        };
        let trials = get("trials").map(|v| positive("trials", v)).transpose()?.unwrap_or(DEFAULT_TRIALS);
        let outer_trials =
            get("outer_trials").map(|v| positive("outer_trials", v)).transpose()?.unwrap_or(DEFAULT_OUTER_TRIALS);
        let seed = match get("seed") {
            Some(v) => v.parse::<u64>().map_err(|_| CliError::key("seed", format!("expected an unsigned integer, got `{v}`")))?,
            None => DEFAULT_SEED,
        };
        let threads = get("threads").map(|v| positive("threads", v)).transpose()?;
        let format = match get("format") {
            Some(v) => v.parse::<OutputFormat>().map_err(|m| CliError::key("format", m))?,
            None => OutputFormat::Csv,
        };
        let out = get("out").map(PathBuf::from);
        let cfg = Self {
            command,
            experiment,
            etas,
            dims,
            sizes,
            biases,
            learners,
            adversaries,
            trials,
            outer_trials,
            seed,
            threads,
            out,
            format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let single = |key: &str, len: usize| {
            if len > 1 {
                Err(CliError::key(key, format!("`{}` takes a single value", self.command.name())))
            } else {
                Ok(())
            }
        };
        match self.command {
            Command::Run | Command::AttackEval => {
                single("eta", self.etas.len())?;
                single("d", self.dims.len())?;
                single("bias", self.biases.as_ref().map_or(1, Vec::len))?;
                single("learner", self.learners.len())?;
                if let SizeRule::Fixed(v) = &self.sizes {
                    single("n", v.len())?;
                }
                if self.command == Command::Run {
                    single("adversary", self.adversaries.as_ref().map_or(1, Vec::len))?;
                }
            }
            Command::Curve => {
                single("eta", self.etas.len())?;
                single("d", self.dims.len())?;
                single("learner", self.learners.len())?;
            }
            Command::Verify | Command::Sweep => {}
        }
        Ok(())
    }

    /// Canonical `key -> value` form; parsing it back gives the same configuration.
    pub fn to_raw(&self) -> RawConfig {
        let mut m = RawConfig::new();
        m.insert("experiment".into(), self.experiment.name().into());
        m.insert("eta".into(), join(&self.etas));
        m.insert("d".into(), join(&self.dims));
        m.insert(
            "n".into(),
            match &self.sizes {
                SizeRule::Fixed(v) => join(v),
                SizeRule::Scaled(c) => format!("{c}/eta"),
            },
        );
        if let Some(b) = &self.biases {
            m.insert("bias".into(), join(b));
        }
        m.insert("learner".into(), self.learners.join(","));
        if let Some(a) = &self.adversaries {
            m.insert("adversary".into(), a.join(","));
        }
        m.insert("trials".into(), self.trials.to_string());
        m.insert("outer_trials".into(), self.outer_trials.to_string());
        m.insert("seed".into(), self.seed.to_string());
        if let Some(t) = self.threads {
            m.insert("threads".into(), t.to_string());
        }
        if let Some(o) = &self.out {
            m.insert("out".into(), o.display().to_string());
        }
        m.insert("format".into(), self.format.to_string());
        m
    }

    /// Config-file text in canonical key order.
    pub fn to_text(&self) -> String {
        self.to_raw().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// FNV-1a of the canonical result-affecting keys, as 16 hex digits.
    pub fn config_hash(&self) -> String {
        let mut text = format!("command={}\n", self.command.name());
        for (k, v) in self.to_raw() {
            if !UNHASHED.contains(&k.as_str()) {
                text.push_str(&format!("{k}={v}\n"));
            }
        }
        format!("{:016x}", fnv1a64(text.as_bytes()))
    }

    /// The sweep grid described by this configuration.
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            experiment: self.experiment,
            etas: self.etas.clone(),
            dims: self.dims.clone(),
            sizes: self.sizes.clone(),
            biases: self.biases.clone().unwrap_or_else(|| vec![0.25]),
            learners: self.learners.clone(),
            adversaries: self.adversaries.clone().unwrap_or_else(|| vec!["greedy".into()]),
            trials: self.trials,
            outer_trials: self.outer_trials,
            seed: self.seed,
        }
    }
}
