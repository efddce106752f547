//! Experiment configuration: defaults, a flat `key = value` file, the
//! output-directory environment variable and command-line overrides, applied
//! in that order.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use c0dyn::arith::{fmt_rational, parse_rational, rat};
use c0dyn::base::Model;
use c0dyn::invariance::DEFAULT_SEARCH_CAP;
use c0dyn::Rational;

/// Overrides `output_dir` from the file; command-line flags still win.
pub const OUTPUT_DIR_ENV: &str = "C0DYN_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format '{other}' (expected csv or json)"),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "jsonl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub model: Model,
    /// Truncation depth `D`.
    pub depth: usize,
    /// Radius of the window used by fc checks and covers.
    pub radius: u64,
    /// Largest `|d|` in mixing and c0 scans.
    pub d_max: u64,
    pub k_max: usize,
    pub m_max: u64,
    pub search_cap: u64,
    /// Forces every schedule cell to search for this slack.
    pub slack_override: Option<Rational>,
    pub family_n: u32,
    pub theta: Rational,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: Model::Bernoulli,
            depth: 20,
            radius: 1,
            d_max: 8,
            k_max: 6,
            m_max: 3,
            search_cap: DEFAULT_SEARCH_CAP,
            slack_override: None,
            family_n: 8,
            theta: rat(1, 3),
            output_dir: PathBuf::from("c0dyn-out"),
            format: Format::Csv,
        }
    }
}

pub const KEYS: [&str; 12] = [
    "model",
    "depth",
    "radius",
    "d_max",
    "k_max",
    "m_max",
    "search_cap",
    "slack_override",
    "family_n",
    "theta",
    "output_dir",
    "format",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow!("{key}: '{value}' is not a valid integer"))
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "model" => {
                self.model = match value {
                    "bernoulli" => Model::Bernoulli,
                    "circle" => Model::Circle,
                    other => bail!("model: unknown model '{other}'"),
                }
            }
            "depth" => self.depth = parse_num(key, value)?,
            "radius" => self.radius = parse_num(key, value)?,
            "d_max" => self.d_max = parse_num(key, value)?,
            "k_max" => self.k_max = parse_num(key, value)?,
            "m_max" => self.m_max = parse_num(key, value)?,
            "search_cap" => self.search_cap = parse_num(key, value)?,
            "slack_override" => {
                self.slack_override = match value {
                    "" | "none" => None,
                    v => Some(parse_rational(v).with_context(|| format!("{key}: bad rational"))?),
                }
            }
            "family_n" => self.family_n = parse_num(key, value)?,
            "theta" => self.theta = parse_rational(value).with_context(|| format!("{key}: bad rational"))?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` comments.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            self.set(k.trim(), v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    /// `--set key=value` overrides.
    pub fn apply_pairs<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| anyhow!("override '{p}' is not key=value"))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            bail!("depth must be >= 1");
        }
        if self.k_max == 0 || self.m_max == 0 || self.search_cap == 0 || self.family_n == 0 {
            bail!("k_max, m_max, search_cap and family_n must be >= 1");
        }
        Ok(())
    }

    /// The config as a file that [`apply_file_text`](Self::apply_file_text) reads back.
    pub fn to_file_text(&self) -> String {
        let model = match self.model {
            Model::Bernoulli => "bernoulli",
            Model::Circle => "circle",
        };
        let slack = self.slack_override.as_ref().map_or("none".to_string(), fmt_rational);
        [
            ("model", model.to_string()),
            ("depth", self.depth.to_string()),
            ("radius", self.radius.to_string()),
            ("d_max", self.d_max.to_string()),
            ("k_max", self.k_max.to_string()),
            ("m_max", self.m_max.to_string()),
            ("search_cap", self.search_cap.to_string()),
            ("slack_override", slack),
            ("family_n", self.family_n.to_string()),
            ("theta", fmt_rational(&self.theta)),
            ("output_dir", self.output_dir.display().to_string()),
            ("format", self.format.name().to_string()),
        ]
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
    }
}

/// Defaults, then the file, then `env_output_dir`, then `overrides`.
pub fn resolve(
    file_text: Option<&str>,
    env_output_dir: Option<&str>,
    overrides: &[String],
) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    if let Some(t) = file_text {
        c.apply_file_text(t).context("config file")?;
    }
    if let Some(dir) = env_output_dir.filter(|d| !d.is_empty()) {
        c.output_dir = PathBuf::from(dir);
    }
    c.apply_pairs(overrides.iter().map(String::as_str))?;
    c.validate()?;
    Ok(c)
}
