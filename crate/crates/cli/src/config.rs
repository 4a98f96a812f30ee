//! Run configuration: defaults, a `key = value` file, and flag overrides.

use std::fmt::Write as _;
use std::path::Path;

use qbp_core::verifier::DEFAULT_M_SWEEP;
use qbp_core::{DiskGrid, TruncationPolicy, VerifyOptions};

use crate::args::CommonArgs;

pub const CONFIG_ENV: &str = "QBP_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub epsilon: f64,
    pub max_terms: usize,
    pub grid: DiskGrid,
    pub m_sweep: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let policy = TruncationPolicy::default();
        Self {
            tolerance: VerifyOptions::default().tolerance,
            epsilon: policy.epsilon,
            max_terms: policy.max_terms,
            grid: DiskGrid::default(),
            m_sweep: DEFAULT_M_SWEEP.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| ConfigError(format!("{key}: `{s}`: {e}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError(format!("{key}: `{value}`: {e}")))
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Parse a config file body on top of the defaults. Blank lines and
    /// `#` comments are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tolerance" => cfg.tolerance = parse_one(key, value)?,
                "epsilon" => cfg.epsilon = parse_one(key, value)?,
                "max_terms" => cfg.max_terms = parse_one(key, value)?,
                "radii" => cfg.grid.radii = parse_list(key, value)?,
                "angles_per_radius" => cfg.grid.angles_per_radius = parse_one(key, value)?,
                "random_points" => cfg.grid.random_points = parse_one(key, value)?,
                "seed" => cfg.grid.seed = parse_one(key, value)?,
                "m_sweep" => cfg.m_sweep = parse_list(key, value)?,
                other => return Err(ConfigError(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tolerance = {:e}", self.tolerance);
        let _ = writeln!(s, "epsilon = {:e}", self.epsilon);
        let _ = writeln!(s, "max_terms = {}", self.max_terms);
        let _ = writeln!(s, "radii = {}", join(&self.grid.radii));
        let _ = writeln!(s, "angles_per_radius = {}", self.grid.angles_per_radius);
        let _ = writeln!(s, "random_points = {}", self.grid.random_points);
        let _ = writeln!(s, "seed = {}", self.grid.seed);
        let _ = writeln!(s, "m_sweep = {}", join(&self.m_sweep));
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        TruncationPolicy::new(self.epsilon, self.max_terms).map_err(|e| ConfigError(e.to_string()))?;
        self.grid.validate().map_err(|e| ConfigError(e.to_string()))?;
        if self.m_sweep.is_empty() || self.m_sweep.contains(&0) {
            return Err(ConfigError("m_sweep must list orders >= 1".into()));
        }
        Ok(())
    }

    /// Defaults, then the config file (explicit path or `$QBP_CONFIG`), then flags.
    pub fn resolve(common: &CommonArgs) -> Result<Self, ConfigError> {
        let path = common
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(Into::into));
        let mut cfg = match path {
            Some(p) => Self::load(&p)?,
            None => Self::default(),
        };
        if let Some(v) = common.tolerance {
            cfg.tolerance = v;
        }
        if let Some(v) = common.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = common.max_terms {
            cfg.max_terms = v;
        }
        if let Some(v) = &common.radii {
            cfg.grid.radii = v.clone();
        }
        if let Some(v) = common.angles_per_radius {
            cfg.grid.angles_per_radius = v;
        }
        if let Some(v) = common.random_points {
            cfg.grid.random_points = v;
        }
        if let Some(v) = common.seed {
            cfg.grid.seed = v;
        }
        if let Some(v) = &common.m_sweep {
            cfg.m_sweep = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy::new(self.epsilon, self.max_terms).expect("validated")
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            policy: self.policy(),
            tolerance: self.tolerance,
        }
    }
}
