//! Plain `key = value` configuration and the flag > file > default
//! resolution of every parameter.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use crate::CliError;

pub const ENV_VAR: &str = "UNITARY_DIRAC_CONFIG";

/// Keys valid outside any subcommand block.
const GLOBAL_KEYS: &[&str] = &["alpha", "mass_unit", "output", "out", "sequential"];

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub path: Option<PathBuf>,
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Reads the file named by `flag`, else by the environment variable, else
    /// returns an empty configuration.
    pub fn load(flag: Option<&Path>) -> Result<Self, CliError> {
        let path = match flag {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        cfg.path = Some(path);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value', got '{line}'", no + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(format!("line {}: bad key '{k}'", no + 1));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("line {}: duplicate key '{k}'", no + 1));
            }
        }
        Ok(Self { path: None, entries })
    }

    /// Rejects keys that belong to no known block.
    pub fn check_keys(&self, commands: &[&str], tolerances: &[&str]) -> Result<(), CliError> {
        for k in self.entries.keys() {
            let ok = GLOBAL_KEYS.contains(&k.as_str())
                || k.strip_prefix("tol.").is_some_and(|t| tolerances.contains(&t))
                || k.split_once('.').is_some_and(|(c, _)| commands.contains(&c));
            if !ok {
                return Err(CliError::Usage(format!("unknown config key '{k}'")));
            }
        }
        Ok(())
    }

    pub fn tolerance_overrides(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("tol.").map(|t| (t, v.as_str())))
    }
}

/// Resolves parameters and records the effective value of each.
pub struct Resolver {
    file: ConfigFile,
    used: RefCell<BTreeSet<String>>,
    effective: RefCell<Vec<(String, String)>>,
}

impl Resolver {
    pub fn new(file: ConfigFile) -> Self {
        Self {
            file,
            used: RefCell::new(BTreeSet::new()),
            effective: RefCell::new(Vec::new()),
        }
    }

    fn resolve<T: Display>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, CliError> {
        let value = match flag {
            Some(v) => v,
            None => match self.file.entries.get(key) {
                Some(s) => {
                    self.used.borrow_mut().insert(key.to_string());
                    parse(s).map_err(|e| CliError::Usage(format!("config key '{key}': {e}")))?
                }
                None => default,
            },
        };
        self.used.borrow_mut().insert(key.to_string());
        let short = key.rsplit('.').next().unwrap_or(key).to_string();
        self.effective.borrow_mut().push((short, value.to_string()));
        Ok(value)
    }

    pub fn value<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.resolve(key, flag, default, |s| s.parse::<T>().map_err(|e| format!("'{s}': {e}")))
    }

    pub fn choice<T: ValueEnum + Display>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        self.resolve(key, flag, default, |s| T::from_str(s, true))
    }

    /// Fails on keys of `command` that no parameter consumed.
    pub fn check_consumed(&self, command: &str) -> Result<(), CliError> {
        let used = self.used.borrow();
        for k in self.file.entries.keys() {
            if k.split_once('.').is_some_and(|(c, _)| c == command) && !used.contains(k) {
                return Err(CliError::Usage(format!("unknown config key '{k}' for {command}")));
            }
        }
        Ok(())
    }

    /// Effective `name=value` pairs of the parameters resolved so far.
    pub fn effective(&self) -> Vec<(String, String)> {
        self.effective.borrow().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_junk() {
        let c = ConfigFile::parse("# header\nalpha = 0.01  # inline\n\nspectrum.z=92\n").unwrap();
        assert_eq!(c.entries.len(), 2);
        assert_eq!(c.entries["spectrum.z"], "92");
        assert!(ConfigFile::parse("alpha 0.01").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let r = Resolver::new(ConfigFile::parse("spectrum.z = 50\nspectrum.n = 3").unwrap());
        assert_eq!(r.value("spectrum.z", Some(80.0), 1.0).unwrap(), 80.0);
        assert_eq!(r.value("spectrum.n", None, 2u32).unwrap(), 3);
        assert_eq!(r.value("radial.z", None, 7.0).unwrap(), 7.0);
        assert!(r.check_consumed("spectrum").is_ok());
        let bad = Resolver::new(ConfigFile::parse("spectrum.q = 1").unwrap());
        assert!(bad.check_consumed("spectrum").is_err());
        let junk = Resolver::new(ConfigFile::parse("spectrum.z = many").unwrap());
        assert!(junk.value("spectrum.z", None, 1.0).is_err());
    }
}
