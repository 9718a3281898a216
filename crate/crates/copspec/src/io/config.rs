//! Flat key-value configuration files: one `key = value` per line, `#`
//! comments. CLI flags override file values.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

const KNOWN_KEYS: &[&str] = &[
    "input",
    "log_returns",
    "taus",
    "omegas",
    "kernel",
    "bandwidth",
    "model",
    "class",
    "p",
    "q",
    "n",
    "burn_in",
    "r",
    "alpha",
    "beta",
    "seed",
    "out_dir",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `key = value`, found `{line}`"),
            })?;
            let key = key.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown configuration key `{key}`"),
                });
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("config key `{key}`: bad number `{v}`")))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("config key `{key}`: bad integer `{v}`")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.get_u64(key)?.map(|v| v as usize))
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.entries
            .get(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::InvalidInput(format!(
                    "config key `{key}`: expected a boolean, found `{other}`"
                ))),
            })
            .transpose()
    }

    /// Comma-separated float list (used by `taus` and `omegas`).
    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.entries
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|tok| {
                        tok.trim().parse::<f64>().map_err(|_| {
                            Error::InvalidInput(format!("config key `{key}`: bad number `{tok}`"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_lists() {
        let cfg = ConfigFile::parse(
            "# run settings\nbandwidth = 0.1\nlog_returns = true\ntaus = 0.1, 0.5, 0.9\nseed=7\n",
        )
        .unwrap();
        assert_eq!(cfg.get_f64("bandwidth").unwrap(), Some(0.1));
        assert_eq!(cfg.get_bool("log_returns").unwrap(), Some(true));
        assert_eq!(cfg.get_f64_list("taus").unwrap().unwrap(), vec![0.1, 0.5, 0.9]);
        assert_eq!(cfg.get_u64("seed").unwrap(), Some(7));
        assert_eq!(cfg.get("out_dir"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigFile::parse("not a kv line\n").is_err());
        let err = ConfigFile::parse("bandwith = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("unknown configuration key"), "{err}");
    }
}
