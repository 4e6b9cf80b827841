//! Flat `key = value` config files merged under command-line flags.
//!
//! Every key names the long flag it mirrors (dashed spelling, e.g.
//! `two-alpha-sq = 0.9`); a flag given on the command line always wins.
//! Unknown keys, malformed lines, and duplicate keys are configuration
//! errors.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn empty() -> Self {
        ConfigMap::default()
    }

    /// Parses a config file: one `key = value` per line, `#` comments.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected `key = value`, found `{line}`",
                    path.display(),
                    index + 1
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if value.is_empty() {
                return Err(CliError::Config(format!(
                    "{}:{}: key `{key}` has no value",
                    path.display(),
                    index + 1
                )));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Config(format!(
                    "{}:{}: duplicate key `{key}`",
                    path.display(),
                    index + 1
                )));
            }
        }
        Ok(ConfigMap { values })
    }

    /// Rejects any key outside the command's vocabulary.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown config key `{key}` (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.parse_with(key, str::parse::<f64>)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.parse_with(key, str::parse::<u64>)
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.parse_with(key, str::parse::<usize>)
    }

    fn parse_with<T, E: std::fmt::Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => parse(raw).map(Some).map_err(|e| {
                CliError::Config(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
            }),
        }
    }
}

/// Flag-over-config resolution for one optional setting. A malformed
/// config value is an error even when a flag overrides it.
pub fn pick<T>(
    flag: Option<T>,
    config: Result<Option<T>, CliError>,
) -> Result<Option<T>, CliError> {
    let from_config = config?;
    Ok(flag.or(from_config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(body: &str) -> Result<ConfigMap, CliError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("test.conf");
        std::fs::write(&path, body).unwrap();
        ConfigMap::from_file(&path)
    }

    #[test]
    fn parses_values_comments_and_blank_lines() {
        let cfg = parse("# header\nf1 = 0.7\n\nrounds = 3 # trailing\n").unwrap();
        assert_eq!(cfg.get_f64("f1").unwrap(), Some(0.7));
        assert_eq!(cfg.get_usize("rounds").unwrap(), Some(3));
        assert_eq!(cfg.get_u64("shots").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_duplicate_and_valueless_lines() {
        assert!(parse("just words\n").is_err());
        assert!(parse("f1 = 0.7\nf1 = 0.8\n").is_err());
        assert!(parse("f1 =\n").is_err());
        assert!(parse("f1 = 0.7 # fine\nf2 = # comment ate the value\n").is_err());
    }

    #[test]
    fn vocabulary_check_and_typed_getters_report_errors() {
        let cfg = parse("f1 = soon\n").unwrap();
        assert!(cfg.check_keys(&["f1"]).is_ok());
        assert!(cfg.check_keys(&["f2"]).is_err());
        assert!(cfg.get_f64("f1").is_err());
    }

    #[test]
    fn flags_win_but_config_errors_still_surface() {
        let cfg = parse("rounds = 7\n").unwrap();
        assert_eq!(pick(Some(2), cfg.get_usize("rounds")).unwrap(), Some(2));
        assert_eq!(pick(None, cfg.get_usize("rounds")).unwrap(), Some(7));
        let bad = parse("rounds = soon\n").unwrap();
        assert!(pick(Some(2), bad.get_usize("rounds")).is_err());
    }
}
