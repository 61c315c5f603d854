//! Flat `key = value` configuration. Blank lines and `#` comments are ignored.
//! Times accept seconds or `HH:MM[:SS]`; `class.N.key` sets a preference for
//! passenger class N, which otherwise inherits the base preferences.

use std::path::Path;

use thiserror::Error;

use crate::demand::{CrowdingBand, CrowdingTable, PreferenceSet};
use crate::network::Time;
use crate::sim::SimConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Read(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn read_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    let mut class_keys: Vec<(usize, usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError::Line { line, message };
        let (key, value) =
            content.split_once('=').ok_or_else(|| err(format!("expected key = value, found '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if let Some(rest) = key.strip_prefix("class.") {
            let (n, k) = rest.split_once('.').ok_or_else(|| err(format!("expected class.N.key, found '{key}'")))?;
            let n: usize = n.parse().map_err(|_| err(format!("bad class index '{n}'")))?;
            class_keys.push((line, n, k.to_string(), value.to_string()));
            continue;
        }
        if set_pref(&mut cfg.classes[0], key, value).map_err(err)? {
            continue;
        }
        match key {
            "frame_start" => cfg.frame_start = time(value).map_err(err)?,
            "frame_end" => cfg.frame_end = time(value).map_err(err)?,
            "eval_end" => cfg.eval_end = time(value).map_err(err)?,
            "days" => cfg.days = num(value).map_err(err)?,
            "seed" => cfg.seed = num(value).map_err(err)?,
            "threads" => cfg.threads = num(value).map_err(err)?,
            "gamma" => cfg.gamma = num(value).map_err(err)?,
            "gamma_schedule" => {
                cfg.gamma_schedule = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| num(s.trim()))
                    .collect::<Result<_, _>>()
                    .map_err(err)?
            }
            "epsilon" => cfg.epsilon = num(value).map_err(err)?,
            "kappa" => cfg.kappa = num(value).map_err(err)?,
            "lambda_std" => cfg.lambda_std = num(value).map_err(err)?,
            "delta_tau" => cfg.delta_tau = time(value).map_err(err)?,
            "sample_window" => cfg.sample_window = num(value).map_err(err)?,
            "max_footpath" => cfg.max_footpath = time(value).map_err(err)?,
            "default_headway" => cfg.default_headway = num(value).map_err(err)?,
            _ => return Err(err(format!("unknown key '{key}'"))),
        }
    }
    let base = cfg.classes[0].clone();
    for (line, n, k, v) in class_keys {
        if n == 0 {
            return Err(ConfigError::Line {
                line,
                message: "class 0 is the base class; set its keys without a prefix".into(),
            });
        }
        while cfg.classes.len() <= n {
            cfg.classes.push(base.clone());
        }
        match set_pref(&mut cfg.classes[n], &k, &v) {
            Ok(true) => {}
            Ok(false) => return Err(ConfigError::Line { line, message: format!("unknown preference key '{k}'") }),
            Err(message) => return Err(ConfigError::Line { line, message }),
        }
    }
    cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(cfg)
}

/// Sets a preference key; `Ok(false)` when `key` is not one.
fn set_pref(p: &mut PreferenceSet, key: &str, value: &str) -> Result<bool, String> {
    match key {
        "beta_wait" => p.beta_wait = num(value)?,
        "beta_walk" => p.beta_walk = num(value)?,
        "beta_transfer" => p.beta_transfer = num(value)?,
        "beta_fail" => p.beta_fail = num(value)?,
        "unfinished_scale" => p.unfinished_scale = num(value)?,
        "crowding" => p.crowding = crowding(value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse '{s}'"))
}

/// Seconds, or `HH:MM` / `HH:MM:SS`.
fn time(s: &str) -> Result<Time, String> {
    if !s.contains(':') {
        return num(s);
    }
    let parts: Vec<Time> = s.split(':').map(num).collect::<Result<_, _>>()?;
    match parts[..] {
        [h, m] => Ok(h * 3600 + m * 60),
        [h, m, sec] => Ok(h * 3600 + m * 60 + sec),
        _ => Err(format!("bad time '{s}'")),
    }
}

/// `upper:seated:standing` bands separated by commas.
fn crowding(s: &str) -> Result<CrowdingTable, String> {
    let bands = s
        .split(',')
        .map(|b| {
            let v: Vec<f64> = b.trim().split(':').map(|x| num(x.trim())).collect::<Result<_, _>>()?;
            match v[..] {
                [upper, seated, standing] => Ok(CrowdingBand { upper, seated, standing }),
                _ => Err(format!("crowding band '{b}' must be upper:seated:standing")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    CrowdingTable::new(bands).map_err(|e| e.to_string())
}
