//! Run configuration: a flat TOML file, overridden by flags.
//!
//! ```toml
//! N = 8
//! K1 = 2
//! K2 = 1
//! K3 = 1
//! samples = ["1", "-1", "2", "-2", "1/2"]
//! suite = "all"
//! output = "report.json"
//! threads = 4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use monster_core::index::SupportConfig;
use monster_core::rational::{fmt_q, parse_q};
use monster_core::Q;
use serde_json::{json, Value};
use thiserror::Error;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "MONSTER_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub n: i64,
    pub caps: BTreeMap<u32, u64>,
    pub samples: Vec<Q>,
    pub suite: String,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 8,
            caps: [(1, 2), (2, 1), (3, 1)].into_iter().collect(),
            samples: ["1", "-1", "2", "-2", "1/2"].iter().map(|s| parse_q(s).expect("literal")).collect(),
            suite: "all".into(),
            output: None,
            threads: None,
        }
    }
}

/// Values given on the command line; `None` keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<i64>,
    pub caps: Option<String>,
    pub samples: Option<String>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Config {
    /// Reads the file given explicitly, else the one named by the environment,
    /// else starts from the defaults; then applies the overrides.
    pub fn load(path: Option<&Path>, env_path: Option<&Path>, ov: &Overrides) -> Result<Config, ConfigError> {
        let mut cfg = match path.or(env_path) {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io { path: p.into(), source: e })?;
                Config::from_toml(&text)?
            }
            None => Config::default(),
        };
        if let Some(n) = ov.n {
            cfg.n = n;
        }
        if let Some(c) = &ov.caps {
            cfg.caps = parse_caps(c)?;
        }
        if let Some(s) = &ov.samples {
            cfg.samples = parse_samples(s)?;
        }
        if let Some(o) = &ov.output {
            cfg.output = Some(o.clone());
        }
        if ov.threads.is_some() {
            cfg.threads = ov.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Invalid(e.message().to_string()))?;
        let mut cfg = Config { caps: BTreeMap::new(), ..Config::default() };
        let bad = |k: &str, want: &str| ConfigError::Invalid(format!("key '{k}' must be {want}"));
        for (k, v) in &table {
            match k.as_str() {
                "N" => cfg.n = v.as_integer().ok_or_else(|| bad(k, "an integer"))?,
                "samples" => {
                    let arr = v.as_array().ok_or_else(|| bad(k, "an array"))?;
                    cfg.samples = arr
                        .iter()
                        .map(|x| match x {
                            toml::Value::Integer(i) => Ok(Q::from_integer((*i).into())),
                            toml::Value::String(s) => parse_q(s).ok_or_else(|| bad(k, "rationals")),
                            _ => Err(bad(k, "rationals")),
                        })
                        .collect::<Result<_, _>>()?;
                }
                "suite" => cfg.suite = v.as_str().ok_or_else(|| bad(k, "a string"))?.to_string(),
                "output" => cfg.output = Some(v.as_str().ok_or_else(|| bad(k, "a string"))?.into()),
                "threads" => {
                    let t = v.as_integer().filter(|&t| t >= 1).ok_or_else(|| bad(k, "a positive integer"))?;
                    cfg.threads = Some(t as usize);
                }
                _ => match k.strip_prefix('K').and_then(|j| j.parse::<u32>().ok()) {
                    Some(j) => {
                        let cap = v.as_integer().filter(|&c| c >= 0).ok_or_else(|| bad(k, "a non-negative integer"))?;
                        cfg.caps.insert(j, cap as u64);
                    }
                    None => return Err(ConfigError::Invalid(format!("unknown key '{k}'"))),
                },
            }
        }
        if cfg.caps.is_empty() {
            cfg.caps = Config::default().caps;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.support()?;
        if !["adjoint", "sl2", "shadow", "all"].contains(&self.suite.as_str()) {
            return Err(ConfigError::Invalid(format!("unknown suite '{}'", self.suite)));
        }
        if self.samples.is_empty() {
            return Err(ConfigError::Invalid("at least one parameter sample is needed".into()));
        }
        Ok(())
    }

    pub fn support(&self) -> Result<SupportConfig, ConfigError> {
        SupportConfig::new(self.n, self.caps.iter().map(|(&j, &k)| (j, k))).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Nonzero samples, for parameters ranging over nonzero values.
    pub fn nonzero_samples(&self) -> Vec<Q> {
        self.samples.iter().filter(|s| !num_traits::Zero::is_zero(*s)).cloned().collect()
    }

    pub fn to_json(&self) -> Value {
        let caps: serde_json::Map<String, Value> = self.caps.iter().map(|(j, k)| (j.to_string(), json!(k))).collect();
        json!({
            "N": self.n,
            "caps": caps,
            "samples": self.samples.iter().map(fmt_q).collect::<Vec<_>>(),
        })
    }
}

/// `1=2,2=1` style caps.
pub fn parse_caps(s: &str) -> Result<BTreeMap<u32, u64>, ConfigError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (j, k) = p.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("cap '{p}' is not j=K")))?;
            let j = j.trim().parse().map_err(|_| ConfigError::Invalid(format!("bad level in '{p}'")))?;
            let k = k.trim().parse().map_err(|_| ConfigError::Invalid(format!("bad cap in '{p}'")))?;
            Ok((j, k))
        })
        .collect()
}

pub fn parse_samples(s: &str) -> Result<Vec<Q>, ConfigError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_q(p).ok_or_else(|| ConfigError::Invalid(format!("bad sample '{p}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use monster_core::rational::{frac, q};

    #[test]
    fn flat_file() {
        let c = Config::from_toml("N = 9\nK1 = 2\nK2 = 2\nK3 = 1\nsamples = [1, \"-1/2\"]\nthreads = 2\n").unwrap();
        assert_eq!(c.n, 9);
        assert_eq!(c.caps, [(1, 2), (2, 2), (3, 1)].into_iter().collect());
        assert_eq!(c.samples, vec![q(1), frac(-1, 2)]);
        assert_eq!(c.threads, Some(2));
        assert!(Config::from_toml("M = 3").is_err());
        assert!(Config::from_toml("N = \"x\"").is_err());
        assert!(Config::from_toml("K1 = -1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("monster-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.toml");
        std::fs::write(&p, "N = 9\nK1 = 1\n").unwrap();
        let ov = Overrides { n: Some(7), caps: Some("1=2,2=1".into()), ..Default::default() };
        let c = Config::load(Some(&p), None, &ov).unwrap();
        assert_eq!(c.n, 7);
        assert_eq!(c.caps, [(1, 2), (2, 1)].into_iter().collect());
        assert!(Config::load(Some(&dir.join("missing.toml")), None, &Overrides::default()).is_err());
        let over = Overrides { caps: Some("1=196885".into()), ..Default::default() };
        assert!(Config::load(None, None, &over).is_err());
    }
}
