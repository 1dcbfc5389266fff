//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key may appear at
//! most once, and each command consumes the keys it knows about; any key left
//! over is reported as an error so typos do not pass silently.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use vdw_relax::relax_dynamics::Fractions;
use vdw_relax::{EosParams, TauE};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    n + 1
                ));
            };
            let key = k.trim().to_string();
            if key.is_empty() {
                return err(format!("line {}: empty key", n + 1));
            }
            if let Some((_, first)) = entries.insert(key.clone(), (v.trim().to_string(), n + 1)) {
                return err(format!(
                    "line {}: duplicate key `{key}` (first set on line {first})",
                    n + 1
                ));
            }
        }
        Ok(Self { entries })
    }

    fn take_raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError(format!("line {line}: cannot parse `{key} = {v}`"))),
        }
    }

    pub fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    /// Semicolon-separated groups of comma-separated numbers, e.g. `0.2, 0.5, 0.42; 0.1, 0.3, 0.2`.
    pub fn take_groups(&mut self, key: &str, width: usize) -> Result<Option<Vec<Vec<f64>>>> {
        let Some((v, line)) = self.take_raw(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for group in v.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let nums: std::result::Result<Vec<f64>, _> =
                group.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match nums {
                Ok(n) if n.len() == width => out.push(n),
                _ => {
                    return err(format!(
                        "line {line}: `{key}` expects groups of {width} numbers, got `{group}`"
                    ))
                }
            }
        }
        Ok(Some(out))
    }

    /// Comma-separated numbers.
    pub fn take_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((v, line)) = self.take_raw(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| {
                ConfigError(format!(
                    "line {line}: `{key}` expects comma-separated numbers"
                ))
            })
    }

    /// The optional `command` key must match the subcommand being run.
    pub fn check_command(&mut self, expected: &str) -> Result<()> {
        match self.take::<String>("command")? {
            Some(c) if c != expected => {
                err(format!("config is for command `{c}`, not `{expected}`"))
            }
            _ => Ok(()),
        }
    }

    pub fn eos(&mut self) -> Result<EosParams> {
        let d = EosParams::REDUCED;
        let p = EosParams {
            a: self.take_or("eos_a", d.a)?,
            b: self.take_or("eos_b", d.b)?,
            r: self.take_or("eos_r", d.r)?,
            cv: self.take_or("eos_cv", d.cv)?,
            s0: self.take_or("eos_s0", d.s0)?,
        };
        p.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(p)
    }

    pub fn mix(&mut self) -> Result<TauE> {
        Ok(TauE::new(self.require("mix_tau")?, self.require("mix_e")?))
    }

    /// Rejects any key no command consumed.
    pub fn finish(self) -> Result<()> {
        if let Some((k, (_, line))) = self.entries.into_iter().next() {
            return err(format!("line {line}: unknown key `{k}`"));
        }
        Ok(())
    }
}

pub fn fractions(v: &[f64]) -> Result<Fractions> {
    Fractions::new(v[0], v[1], v[2]).map_err(|e| ConfigError(e.to_string()))
}
