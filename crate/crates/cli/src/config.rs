//! Run configuration and the hard caps that bound it.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use thiserror::Error;

/// Environment variable overriding the hard caps, e.g.
/// `TRACKLAB_CAPS="depth=4,length=40"`.
pub const CAPS_ENV: &str = "TRACKLAB_CAPS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{what} = {value} exceeds the hard cap {cap} (raise it through {CAPS_ENV})")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("bad {CAPS_ENV} entry `{0}`")]
    BadCaps(String),
    #[error("{0} must be positive")]
    Zero(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HardCaps {
    pub depth: u64,
    pub length: u64,
    pub n_max: u64,
    pub workers: u64,
    pub trials: u64,
}

impl Default for HardCaps {
    fn default() -> Self {
        HardCaps {
            depth: 3,
            length: 40,
            n_max: 20,
            workers: 64,
            trials: 100_000,
        }
    }
}

impl HardCaps {
    /// Defaults with the overrides of a `key=value,...` list applied.
    pub fn with_overrides(list: Option<&str>) -> Result<Self, ConfigError> {
        let mut caps = HardCaps::default();
        let Some(list) = list else { return Ok(caps) };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || ConfigError::BadCaps(item.to_string());
            let (k, v) = item.split_once('=').ok_or_else(bad)?;
            let v: u64 = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "depth" => caps.depth = v,
                "length" => caps.length = v,
                "n-max" | "n_max" => caps.n_max = v,
                "workers" => caps.workers = v,
                "trials" => caps.trials = v,
                _ => return Err(bad()),
            }
        }
        Ok(caps)
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::with_overrides(std::env::var(CAPS_ENV).ok().as_deref())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Suite {
    Census,
    KeyLemma,
    ConeIdentity,
    Partition,
    Nesting,
    Oracle,
    Noebeling,
    Claims,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Census,
        Suite::KeyLemma,
        Suite::ConeIdentity,
        Suite::Partition,
        Suite::Nesting,
        Suite::Oracle,
        Suite::Noebeling,
        Suite::Claims,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Census => "census",
            Suite::KeyLemma => "key-lemma",
            Suite::ConeIdentity => "cone-identity",
            Suite::Partition => "partition",
            Suite::Nesting => "nesting",
            Suite::Oracle => "oracle",
            Suite::Noebeling => "noebeling",
            Suite::Claims => "claims",
            Suite::All => "all",
        }
    }

    pub fn default_depth(self) -> usize {
        match self {
            Suite::KeyLemma => 2,
            _ => 3,
        }
    }

    /// Number of random trials when none is given.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Nesting => 60,
            Suite::Oracle => 100,
            Suite::Noebeling => 20,
            Suite::Claims => 1000,
            _ => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a suite run depends on. Two runs with equal configs write
/// identical reports; the worker count does not enter the reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub suite: Suite,
    pub depth: Option<usize>,
    pub length: usize,
    pub n_max: u32,
    pub trials: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    /// Family file; the shipped family when absent.
    pub family: Option<PathBuf>,
    /// Manifest checked against the family file, if any.
    pub manifest: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: Suite::All,
            depth: None,
            length: 15,
            n_max: 10,
            trials: None,
            seed: 7,
            workers: 4,
            out: PathBuf::from("reports"),
            family: None,
            manifest: None,
        }
    }
}

impl RunConfig {
    pub fn for_suite(suite: Suite) -> Self {
        RunConfig {
            suite,
            ..RunConfig::default()
        }
    }

    pub fn depth_for(&self, suite: Suite) -> usize {
        self.depth.unwrap_or_else(|| suite.default_depth())
    }

    pub fn trials_for(&self, suite: Suite) -> usize {
        self.trials.unwrap_or_else(|| suite.default_trials())
    }

    pub fn check(&self, caps: &HardCaps) -> Result<(), ConfigError> {
        let over = |what, value: u64, cap: u64| {
            if value > cap {
                Err(ConfigError::CapExceeded { what, value, cap })
            } else {
                Ok(())
            }
        };
        if let Some(d) = self.depth {
            over("depth", d as u64, caps.depth)?;
        }
        over("length", self.length as u64, caps.length)?;
        over("n-max", u64::from(self.n_max), caps.n_max)?;
        over("workers", self.workers as u64, caps.workers)?;
        if let Some(t) = self.trials {
            over("trials", t as u64, caps.trials)?;
        }
        if self.length == 0 {
            return Err(ConfigError::Zero("length"));
        }
        if self.n_max == 0 {
            return Err(ConfigError::Zero("n-max"));
        }
        if self.workers == 0 {
            return Err(ConfigError::Zero("workers"));
        }
        Ok(())
    }

    /// Parameter line recorded in every report.
    pub fn describe(&self, suite: Suite) -> String {
        format!(
            "depth={} length={} n-max={} trials={} seed={}",
            self.depth_for(suite),
            self.length,
            self.n_max,
            self.trials_for(suite),
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_parse_and_bound_the_config() {
        let caps = HardCaps::with_overrides(Some("depth=5, n-max=30")).unwrap();
        assert_eq!((caps.depth, caps.n_max, caps.length), (5, 30, 40));
        assert!(HardCaps::with_overrides(Some("depth")).is_err());
        assert!(HardCaps::with_overrides(Some("speed=3")).is_err());

        let mut cfg = RunConfig::for_suite(Suite::Census);
        cfg.depth = Some(4);
        assert!(matches!(
            cfg.check(&HardCaps::default()),
            Err(ConfigError::CapExceeded { what: "depth", .. })
        ));
        assert!(cfg.check(&caps).is_ok());
        cfg.workers = 0;
        assert_eq!(cfg.check(&caps), Err(ConfigError::Zero("workers")));
    }

    #[test]
    fn suite_defaults() {
        let cfg = RunConfig::for_suite(Suite::KeyLemma);
        assert_eq!(cfg.depth_for(Suite::KeyLemma), 2);
        assert_eq!(cfg.depth_for(Suite::Census), 3);
        assert_eq!(cfg.trials_for(Suite::Claims), 1000);
    }
}
