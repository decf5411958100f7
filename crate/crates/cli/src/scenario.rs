//! Flat `key = value` scenario files with `[potential]`, `[grid]` and `[sweep]` sections.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

pub const SECTIONS: [&str; 3] = ["potential", "grid", "sweep"];

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "scenario line {n}: {}", self.message),
            None => write!(f, "scenario: {}", self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn error(line: Option<usize>, message: impl Into<String>) -> ScenarioError {
    ScenarioError {
        line,
        message: message.into(),
    }
}

/// Resolved scenario values keyed by `section.key`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    values: BTreeMap<String, String>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut scenario = Self::default();
        let mut section: Option<&str> = None;
        for (idx, raw) in text.lines().enumerate() {
            let n = Some(idx + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| error(n, format!("unterminated section header `{line}`")))?
                    .trim();
                section = Some(
                    SECTIONS
                        .iter()
                        .find(|s| **s == name)
                        .ok_or_else(|| error(n, format!("unknown section `{name}`")))?,
                );
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| error(n, format!("expected `key = value`, got `{line}`")))?;
            let section = section.ok_or_else(|| error(n, "key outside of a section"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(error(n, "empty key"));
            }
            if scenario.get(section, key).is_some() {
                return Err(error(n, format!("duplicate key `{section}.{key}`")));
            }
            scenario.set(section, key, normalize(value.trim()));
        }
        Ok(scenario)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(&format!("{section}.{key}")).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.values.insert(format!("{section}.{key}"), value.into());
    }

    /// Sets `value` when present, so command-line flags win over file values.
    pub fn override_with<T: ToString>(&mut self, section: &str, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(section, key, v.to_string());
        }
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<Option<f64>, ScenarioError> {
        self.get(section, key)
            .map(|v| parse_number(section, key, v))
            .transpose()
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64, ScenarioError> {
        self.f64(section, key)?
            .ok_or_else(|| error(None, format!("missing `{section}.{key}`")))
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<Option<usize>, ScenarioError> {
        self.get(section, key)
            .map(|v| {
                v.parse()
                    .map_err(|_| error(None, format!("`{section}.{key}` must be a non-negative integer, got `{v}`")))
            })
            .transpose()
    }

    pub fn flag(&self, section: &str, key: &str) -> Result<bool, ScenarioError> {
        match self.get(section, key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(error(None, format!("`{section}.{key}` must be true or false, got `{v}`"))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ScenarioError> {
        let Some(v) = self.get(section, key) else {
            return Ok(None);
        };
        let items = v
            .split(',')
            .map(|s| parse_number(section, key, s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(items))
    }

    /// One `section.key = value` line per entry, sorted.
    pub fn canonical(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Hex SHA-256 of [`Scenario::canonical`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Numbers and number lists are stored in shortest round-trip form so that
/// `1.0` in a file and `--a 1` on the command line hash identically.
fn normalize(value: &str) -> String {
    let numbers: Option<Vec<f64>> = value
        .split(',')
        .map(|v| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect();
    match numbers {
        Some(n) => n.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        None => value.to_string(),
    }
}

fn parse_number(section: &str, key: &str, v: &str) -> Result<f64, ScenarioError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| error(None, format!("`{section}.{key}` must be a finite number, got `{v}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# well with a shallow level
[potential]
kind = well
depth = 2.8   # U0
radius = 1.0

[grid]
step = 0.001

[sweep]
k = 0.1, 0.2,0.5
";

    #[test]
    fn parses_sections_and_lists() {
        let s = Scenario::parse(SAMPLE).unwrap();
        assert_eq!(s.get("potential", "kind"), Some("well"));
        assert_eq!(s.f64("potential", "depth").unwrap(), Some(2.8));
        assert_eq!(s.list("sweep", "k").unwrap(), Some(vec![0.1, 0.2, 0.5]));
        assert_eq!(s.f64("grid", "missing").unwrap(), None);
        assert_eq!(s.get("potential", "radius"), Some("1"));
        assert_eq!(s.get("sweep", "k"), Some("0.1,0.2,0.5"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(Scenario::parse("depth = 1").unwrap_err().line, Some(1));
        assert!(Scenario::parse("[bogus]").is_err());
        assert!(Scenario::parse("[grid]\nstep").is_err());
        assert!(Scenario::parse("[grid]\nstep = 1\nstep = 2").is_err());
        let s = Scenario::parse("[grid]\nstep = abc").unwrap();
        assert!(s.f64("grid", "step").is_err());
        let s = Scenario::parse("[grid]\nstep = nan").unwrap();
        assert!(s.f64("grid", "step").is_err());
    }

    #[test]
    fn flags_override_and_hash_follows_content() {
        let mut a = Scenario::parse(SAMPLE).unwrap();
        let b = Scenario::parse(SAMPLE).unwrap();
        assert_eq!(a.hash(), b.hash());
        a.override_with("potential", "depth", None::<f64>);
        assert_eq!(a.hash(), b.hash());
        a.override_with("potential", "depth", Some(22.547));
        assert_eq!(a.f64("potential", "depth").unwrap(), Some(22.547));
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn flags_parse_strictly() {
        let s = Scenario::parse("[sweep]\nvirtual = true\nother = yes").unwrap();
        assert!(s.flag("sweep", "virtual").unwrap());
        assert!(!s.flag("sweep", "absent").unwrap());
        assert!(s.flag("sweep", "other").is_err());
    }
}
