use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::{DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circuit::{NoisePlacement, Scheme};
use crate::engine::{BranchWeighting, ConditionalNoise, NoiseSpec, Quadrature, ReadoutMode};
use crate::error::{Error, Result};
use crate::linalg::{MAX_DENSITY_QUBITS, MAX_QUBITS};

/// Exact branch enumeration or finite-shot sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Mode {
    Exact,
    Shots(u64),
}

/// How each grid point is averaged over initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Averaging {
    Quadrature(Quadrature),
    Haar { count: usize, seed: u64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Shots(n) => write!(f, "shots:{n}"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    /// `exact` or `shots:<count>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exact" {
            return Ok(Mode::Exact);
        }
        let count = s
            .strip_prefix("shots:")
            .and_then(|n| n.trim().parse::<u64>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("mode must be 'exact' or 'shots:<count>', got '{s}'")))?;
        Ok(Mode::Shots(count))
    }
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Averaging::Quadrature(q) => write!(f, "quadrature:{}x{}", q.n_theta, q.n_phi),
            Averaging::Haar { count, seed } => write!(f, "haar:{count}:{seed}"),
        }
    }
}

impl FromStr for Averaging {
    type Err = Error;

    /// `quadrature:<n>`, `quadrature:<nθ>x<nφ>`, `haar:<count>` or `haar:<count>:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("averaging must be 'quadrature:<n>[x<m>]' or 'haar:<count>[:<seed>]', got '{s}'"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("quadrature:") {
            let (a, b) = rest.split_once('x').map_or((rest, rest), |(a, b)| (a, b));
            return Ok(Averaging::Quadrature(Quadrature::new(num(a)?, num(b)?)?));
        }
        if let Some(rest) = s.strip_prefix("haar:") {
            let (c, seed) = match rest.split_once(':') {
                Some((c, seed)) => (num(c)?, seed.trim().parse::<u64>().map_err(|_| bad())?),
                None => (num(rest)?, 0),
            };
            if c == 0 {
                return Err(bad());
            }
            return Ok(Averaging::Haar { count: c, seed });
        }
        Err(bad())
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}
string_serde!(Mode);
string_serde!(Averaging);

/// Grid sweep configuration.
///
/// Every field has a default, so a config file only lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(deserialize_with = "list")]
    pub schemes: Vec<Scheme>,
    #[serde(deserialize_with = "list")]
    pub n_list: Vec<usize>,
    #[serde(deserialize_with = "grid")]
    pub p_grid: Vec<f64>,
    #[serde(deserialize_with = "grid")]
    pub q_grid: Vec<f64>,
    pub kappa: f64,
    pub mode: Mode,
    /// `None` picks quadrature in exact mode and five Haar states in shots mode.
    pub averaging: Option<Averaging>,
    pub placement: NoisePlacement,
    pub readout_mode: ReadoutMode,
    pub conditional_noise: ConditionalNoise,
    pub branch_weighting: BranchWeighting,
    /// Master seed for per-point sampling streams.
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Adds `|engine − closed form|` at three qubits.
    pub oracle_overlay: bool,
    /// Adds the Hellinger fidelity of the recorded register against the noiseless run.
    pub hellinger: bool,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let spec = NoiseSpec::oracle_matched(0.0, 0.0);
        Self {
            schemes: Scheme::TRANSFER.to_vec(),
            n_list: vec![3],
            p_grid: linspace(0.0, 1.0, 11),
            q_grid: linspace(0.0, 1.0, 11),
            kappa: spec.kappa,
            mode: Mode::Exact,
            averaging: None,
            placement: spec.placement,
            readout_mode: spec.readout_mode,
            conditional_noise: spec.conditional_noise,
            branch_weighting: spec.branch_weighting,
            seed: 0,
            output: None,
            oracle_overlay: false,
            hellinger: false,
            parallel: true,
        }
    }
}

pub const DEFAULT_HAAR_STATES: usize = 5;

impl SweepConfig {
    pub fn averaging(&self) -> Averaging {
        self.averaging.unwrap_or(match self.mode {
            Mode::Exact => Averaging::Quadrature(Quadrature::default()),
            Mode::Shots(_) => Averaging::Haar { count: DEFAULT_HAAR_STATES, seed: self.seed },
        })
    }

    pub fn noise(&self, p: f64, q: f64) -> NoiseSpec {
        NoiseSpec {
            p,
            q,
            kappa: self.kappa,
            placement: self.placement,
            readout_mode: self.readout_mode,
            conditional_noise: self.conditional_noise,
            branch_weighting: self.branch_weighting,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.schemes.is_empty() || self.n_list.is_empty() || self.p_grid.is_empty() || self.q_grid.is_empty() {
            return cfg("schemes, n_list, p_grid and q_grid must be non-empty".into());
        }
        for (name, grid) in [("p_grid", &self.p_grid), ("q_grid", &self.q_grid)] {
            if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return cfg(format!("{name} value {v} outside [0, 1]"));
            }
        }
        let q_max = self.q_grid.iter().copied().fold(0.0, f64::max);
        if !(self.kappa >= 0.0) || self.kappa * q_max > 1.0 {
            return cfg(format!("kappa = {} is negative or pushes q0 above 1", self.kappa));
        }
        let cap = match self.mode {
            Mode::Exact => MAX_DENSITY_QUBITS,
            Mode::Shots(_) => MAX_QUBITS,
        };
        for &s in &self.schemes {
            if s == Scheme::Custom {
                return cfg("custom circuits cannot be swept".into());
            }
            for &n in &self.n_list {
                if !s.supports(n) {
                    return cfg(format!("{s} does not support n = {n}"));
                }
                if n > cap {
                    return cfg(format!("{} mode supports at most {cap} qubits, got n = {n}", self.mode));
                }
            }
        }
        if self.hellinger && self.mode != Mode::Exact {
            return cfg("hellinger requires exact mode".into());
        }
        if self.branch_weighting == BranchWeighting::Uniform && self.mode != Mode::Exact {
            return cfg("uniform branch weighting is only defined for the exact engine".into());
        }
        Ok(())
    }

    /// Parses a JSON object or `key = value` lines, chosen by the first
    /// non-blank character.
    pub fn parse(text: &str) -> Result<Self> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            key_values(text)?
        };
        from_value(value)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn from_value<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
}

/// `key = value` lines into a JSON object; values that parse as JSON keep
/// their type, everything else becomes a string. `-` in keys maps to `_`.
fn key_values(text: &str) -> Result<Value> {
    let mut map = serde_json::Map::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got '{line}'") })?;
        let v = v.trim();
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().replace('-', "_"), value);
    }
    Ok(Value::Object(map))
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// A grid written as `a,b,c` or `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("grid must be 'a,b,c' or 'start:stop:count', got '{s}'"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let a = parts[0].parse::<f64>().map_err(|_| bad())?;
        let b = parts[1].parse::<f64>().map_err(|_| bad())?;
        let n = parts[2].parse::<usize>().map_err(|_| bad())?;
        return Ok(linspace(a, b, n));
    }
    parse_list(s)
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| Error::Config(format!("cannot parse '{t}' in '{s}'"))))
        .collect()
}

fn list<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr + DeserializeOwned,
{
    use serde::de::Error as _;
    match Value::deserialize(d)? {
        Value::String(s) => parse_list(&s).map_err(D::Error::custom),
        Value::Array(items) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => s.parse::<T>().map_err(|_| D::Error::custom(format!("cannot parse '{s}'"))),
                other => serde_json::from_value(other).map_err(D::Error::custom),
            })
            .collect(),
        other => serde_json::from_value(Value::Array(vec![other])).map_err(D::Error::custom),
    }
}

fn grid<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    use serde::de::Error as _;
    match Value::deserialize(d)? {
        Value::String(s) => parse_grid(&s).map_err(D::Error::custom),
        Value::Number(n) => Ok(vec![n.as_f64().unwrap_or(f64::NAN)]),
        other => serde_json::from_value(other).map_err(D::Error::custom),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_json_agree() {
        let kv = "schemes = swap, ghz\nn-list = 3,5\np_grid = 0:0.1:3  # comment\nq_grid = [0.0, 0.2]\nmode = shots:64\naveraging = haar:4:9\nseed = 7\n";
        let js = r#"{"schemes":["swap","ghz"],"n_list":[3,5],"p_grid":"0:0.1:3","q_grid":[0.0,0.2],"mode":"shots:64","averaging":"haar:4:9","seed":7}"#;
        let a = SweepConfig::parse(kv).unwrap();
        assert_eq!(a, SweepConfig::parse(js).unwrap());
        assert_eq!(a.p_grid, vec![0.0, 0.05, 0.1]);
        assert_eq!(a.mode, Mode::Shots(64));
        assert_eq!(a.averaging(), Averaging::Haar { count: 4, seed: 9 });
        a.validate().unwrap();
    }

    #[test]
    fn serde_roundtrip() {
        let c = SweepConfig { averaging: Some("quadrature:8x12".parse().unwrap()), ..Default::default() };
        let back = SweepConfig::parse(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn invalid_configs() {
        assert!(SweepConfig::parse("bogus = 1").is_err());
        assert!(SweepConfig::parse("mode = shots:0").is_err());
        assert!(SweepConfig::parse("no equals sign").is_err());
        let bad = [
            SweepConfig { p_grid: vec![1.5], ..Default::default() },
            SweepConfig { q_grid: vec![], ..Default::default() },
            SweepConfig { schemes: vec![Scheme::Teleport], n_list: vec![4], ..Default::default() },
            SweepConfig { n_list: vec![9], ..Default::default() },
            SweepConfig { hellinger: true, mode: Mode::Shots(10), ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn default_averaging_follows_mode() {
        let c = SweepConfig::default();
        assert_eq!(c.averaging(), Averaging::Quadrature(Quadrature::default()));
        let s = SweepConfig { mode: Mode::Shots(100), seed: 3, ..c };
        assert_eq!(s.averaging(), Averaging::Haar { count: 5, seed: 3 });
    }
}
