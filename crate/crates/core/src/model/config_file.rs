//! Flat `key = value` configuration files.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment (full line
//! or trailing); blank lines are ignored. List values are comma-separated.
//!
//! Keys:
//!
//! | key                | type        | default       |
//! |--------------------|-------------|---------------|
//! | `n_channels`       | integer     | required      |
//! | `cell_length`      | float       | required      |
//! | `couplings`        | float list  | required      |
//! | `disorder_support` | float list  | `0, 1`        |
//! | `disorder_weights` | float list  | `0.5, 0.5`    |
//! | `log_chart_radius` | float       | `1`           |
//! | `seed`             | integer     | `0`           |
//!
//! Duplicate and unknown keys are errors, with the offending line reported.

use std::path::Path;

use crate::error::CoreError;
use crate::Result;

use super::ModelConfig;

const KEYS: [&str; 7] = [
    "n_channels",
    "cell_length",
    "couplings",
    "disorder_support",
    "disorder_weights",
    "log_chart_radius",
    "seed",
];

fn parse_f64(key: &str, raw: &str, line: usize) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| {
        CoreError::Config(format!("line {line}: {key} expects a number, got '{}'", raw.trim()))
    })
}

fn parse_u64(key: &str, raw: &str, line: usize) -> Result<u64> {
    raw.trim().parse::<u64>().map_err(|_| {
        CoreError::Config(format!(
            "line {line}: {key} expects a nonnegative integer, got '{}'",
            raw.trim()
        ))
    })
}

fn parse_usize(key: &str, raw: &str, line: usize) -> Result<usize> {
    raw.trim().parse::<usize>().map_err(|_| {
        CoreError::Config(format!(
            "line {line}: {key} expects a nonnegative integer, got '{}'",
            raw.trim()
        ))
    })
}

fn parse_list(key: &str, raw: &str, line: usize) -> Result<Vec<f64>> {
    raw.split(',').map(|piece| parse_f64(key, piece, line)).collect()
}

/// Parse configuration text. See the module docs for the grammar.
pub fn parse_config_str(text: &str) -> Result<ModelConfig> {
    let mut n_channels: Option<usize> = None;
    let mut cell_length: Option<f64> = None;
    let mut couplings: Option<Vec<f64>> = None;
    let mut disorder_support: Option<Vec<f64>> = None;
    let mut disorder_weights: Option<Vec<f64>> = None;
    let mut log_chart_radius: Option<f64> = None;
    let mut seed: Option<u64> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CoreError::Config(format!("line {line_no}: expected 'key = value', got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(CoreError::Config(format!("line {line_no}: {key} has no value")));
        }
        if !KEYS.contains(&key) {
            return Err(CoreError::UnknownKey { key: key.to_string(), line: line_no });
        }

        macro_rules! set_once {
            ($slot:ident, $val:expr) => {{
                if $slot.is_some() {
                    return Err(CoreError::Config(format!(
                        "line {line_no}: duplicate key '{key}'"
                    )));
                }
                $slot = Some($val);
            }};
        }

        match key {
            "n_channels" => set_once!(n_channels, parse_usize(key, value, line_no)?),
            "cell_length" => set_once!(cell_length, parse_f64(key, value, line_no)?),
            "couplings" => set_once!(couplings, parse_list(key, value, line_no)?),
            "disorder_support" => set_once!(disorder_support, parse_list(key, value, line_no)?),
            "disorder_weights" => set_once!(disorder_weights, parse_list(key, value, line_no)?),
            "log_chart_radius" => set_once!(log_chart_radius, parse_f64(key, value, line_no)?),
            "seed" => set_once!(seed, parse_u64(key, value, line_no)?),
            _ => unreachable!("key membership checked above"),
        }
    }

    let n_channels =
        n_channels.ok_or_else(|| CoreError::Config("missing required key 'n_channels'".into()))?;
    let cell_length = cell_length
        .ok_or_else(|| CoreError::Config("missing required key 'cell_length'".into()))?;
    let couplings =
        couplings.ok_or_else(|| CoreError::Config("missing required key 'couplings'".into()))?;

    ModelConfig::new(
        n_channels,
        cell_length,
        couplings,
        disorder_support.unwrap_or_else(|| vec![0.0, 1.0]),
        disorder_weights.unwrap_or_else(|| vec![0.5, 0.5]),
        log_chart_radius.unwrap_or(1.0),
        seed.unwrap_or(0),
    )
}

/// Parse a configuration file from disk.
pub fn parse_config_file(path: &Path) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse_config_str` round-trips it exactly.
pub fn to_config_string(cfg: &ModelConfig) -> String {
    format!(
        "n_channels = {}\ncell_length = {}\ncouplings = {}\ndisorder_support = {}\ndisorder_weights = {}\nlog_chart_radius = {}\nseed = {}\n",
        cfg.n_channels(),
        cfg.cell_length(),
        fmt_list(cfg.couplings()),
        fmt_list(cfg.disorder_support()),
        fmt_list(cfg.disorder_weights()),
        cfg.log_chart_radius(),
        cfg.seed()
    )
}
