//! Flat `key = value` experiment files. Command-line flags override entries.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use rmlab::rational::parse_rational;
use rmlab::{Error, Result};

/// Keys accepted in a config file. Dashes and underscores are interchangeable.
pub const KEYS: &[&str] = &[
    "n", "v", "channel", "params", "codes", "engine", "distances", "trials", "seed", "alpha", "ell", "eps", "c",
    "beta", "delta", "delta_prime", "z", "c_b", "model", "variant", "n_min", "n_max", "k", "w", "target", "start",
    "limit", "grid", "out", "format",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, String>,
}

fn normalise(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Blank lines and lines starting with `#` are skipped; a key may appear
    /// once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            let key = normalise(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Parameter(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Parameter(format!("config line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed config entry.
    pub fn get<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| s.parse::<T>().map_err(|e| Error::Parameter(format!("config key {key}: {e}"))))
            .transpose()
    }

    pub fn require<T>(&self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key, flag)?
            .ok_or_else(|| Error::Parameter(format!("missing parameter {key} (flag --{} or config key {key})", key.replace('_', "-"))))
    }

    pub fn or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(key, flag)?.unwrap_or(default))
    }

    pub fn rational(&self, key: &str, flag: Option<&str>) -> Result<Option<BigRational>> {
        flag.or(self.raw(key)).map(parse_rational).transpose()
    }

    /// Comma-separated list from the flag or the config entry.
    pub fn list(&self, key: &str, flag: Option<&str>) -> Option<Vec<String>> {
        flag.or(self.raw(key)).map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = ExperimentConfig::parse("# run\nn = 3\nv=1\ntrials = 500\n").unwrap();
        assert_eq!(cfg.require::<u32>("n", None).unwrap(), 3);
        assert_eq!(cfg.require::<u32>("n", Some(4)).unwrap(), 4);
        assert_eq!(cfg.or::<u64>("seed", None, 7).unwrap(), 7);
        assert!(cfg.require::<u32>("ell", None).is_err());
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(ExperimentConfig::parse("trails = 3"), Err(Error::Parameter(_))));
        assert!(matches!(ExperimentConfig::parse("n = 3\nn = 4"), Err(Error::Parameter(_))));
        assert!(matches!(ExperimentConfig::parse("n 3"), Err(Error::Parse(_))));
    }

    #[test]
    fn dashed_keys_and_lists() {
        let cfg = ExperimentConfig::parse("delta-prime = 0.1\nparams = 1/10, 1/4 ,\n").unwrap();
        assert_eq!(cfg.get::<f64>("delta_prime", None).unwrap(), Some(0.1));
        assert_eq!(cfg.list("params", None).unwrap(), vec!["1/10", "1/4"]);
    }
}
