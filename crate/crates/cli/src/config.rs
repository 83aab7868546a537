use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Flat `key = value` settings, with `#` comments.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Invalid(format!("config line {}: expected key = value", i + 1)))?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(CliError::Invalid(format!("config line {}: empty key", i + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Invalid(format!("config line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(ConfigFile { values })
    }

    /// Reject keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for k in self.values.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Invalid(format!(
                    "unknown config key '{k}' (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the config entry, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match (flag, self.raw(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => s
                .parse()
                .map_err(|e| CliError::Invalid(format!("config key '{key}': {e}"))),
            (None, None) => Ok(default),
        }
    }

    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match (flag, self.raw(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s
                .parse()
                .map(Some)
                .map_err(|e| CliError::Invalid(format!("config key '{key}': {e}"))),
            (None, None) => Ok(None),
        }
    }
}

/// Parse `a:b:step` (inclusive, step defaults to 1), a comma list, or a single value.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.trim().parse().map_err(|_| format!("not a number: '{t}'"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("not finite: '{t}'"))
        }
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(format!("range '{s}' has too many fields"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let step = if parts.len() == 3 { num(parts[2])? } else { 1.0 };
        if step <= 0.0 || b < a {
            return Err(format!("range '{s}' needs start <= end and a positive step"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("range '{s}' has too many points"));
        }
        // Index-based generation avoids accumulated rounding.
        Ok((0..count).map(|k| a + k as f64 * step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    let num = |t: &str| -> Result<u64, String> { t.trim().parse().map_err(|_| format!("not an integer: '{t}'")) };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(format!("range '{s}' has too many fields"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
        if step == 0 || b < a {
            return Err(format!("range '{s}' needs start <= end and a positive step"));
        }
        if (b - a) / step >= 100_000 {
            return Err(format!("range '{s}' has too many points"));
        }
        Ok((a..=b).step_by(step as usize).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

/// Newtype so list flags can go through `FromStr`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_f64_list(s).map(FloatList)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_u64_list(s).map(SeedList)
    }
}
