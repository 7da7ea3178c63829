//! Flat `key = value` experiment configs.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use bolab_core::Grid1D;

use crate::error::CliError;

#[derive(Debug)]
pub struct Config {
    entries: BTreeMap<String, String>,
    base: PathBuf,
    used: RefCell<BTreeSet<String>>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Config {
            entries,
            base: base.to_path_buf(),
            used: RefCell::new(BTreeSet::new()),
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(String::as_str)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn string(&self, key: &str) -> Result<String, CliError> {
        let v = self
            .raw(key)
            .ok_or_else(|| CliError::Config(format!("missing key `{key}`")))?
            .to_string();
        self.record(key, v.clone());
        Ok(v)
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, v.clone());
        v
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.string(key)?;
        parse_f64(key, &v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            Some(v) => {
                let x = parse_f64(key, v)?;
                self.record(key, v.to_string());
                Ok(x)
            }
            None => {
                self.record(key, format!("{default:?}"));
                Ok(default)
            }
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            Some(v) => {
                let x = parse_f64(key, v)?;
                self.record(key, v.to_string());
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.opt_usize(key)?.unwrap_or_else(|| {
            self.record(key, default.to_string());
            default
        }))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.raw(key) {
            Some(v) => {
                let x = v
                    .parse()
                    .map_err(|_| CliError::Config(format!("`{key}`: expected a nonnegative integer, got `{v}`")))?;
                self.record(key, v.to_string());
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    /// A path resolved against the config file's directory.
    pub fn path(&self, key: &str) -> Result<PathBuf, CliError> {
        let v = self.string(key)?;
        Ok(self.base.join(v))
    }

    /// `box` (total length) and `n`, centred on the origin.
    pub fn grid(&self) -> Result<Grid1D, CliError> {
        let length = self.f64_or("box", 200.0)?;
        let n = self.usize_or("n", 4096)?;
        Grid1D::centered(0.5 * length, n).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `times = a, b, c` or `times = geometric(start, stop, count)`.
    pub fn times(&self, default: &str) -> Result<Vec<f64>, CliError> {
        let v = self.string_or("times", default);
        let times = parse_times(&v)?;
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Config(format!("`times` must be strictly increasing: {v}")));
        }
        Ok(times)
    }

    /// Reject keys no command read.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .entries
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!("unknown key(s): {}", unknown.join(", "))))
        }
    }

    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("`{key}`: expected a finite number, got `{v}`")))
}

pub fn parse_times(v: &str) -> Result<Vec<f64>, CliError> {
    let v = v.trim();
    if let Some(inner) = v.strip_prefix("geometric(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("geometric range needs (start, stop, count): {v}")));
        }
        let a = parse_f64("times", parts[0])?;
        let b = parse_f64("times", parts[1])?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("bad count in {v}")))?;
        if !(a > 0.0 && b > a) || count < 2 {
            return Err(CliError::Config(format!("geometric range needs 0 < start < stop and count >= 2: {v}")));
        }
        let r = (b / a).ln() / (count - 1) as f64;
        let mut out: Vec<f64> = (0..count).map(|i| a * (r * i as f64).exp()).collect();
        out[count - 1] = b;
        return Ok(out);
    }
    v.split(',').map(|s| parse_f64("times", s.trim())).collect()
}
