//! Experiment configuration (TOML).
//!
//! ```toml
//! group = { builtin = 2 }          # or group = { file = "groups/d5.json" }
//! params = { n = 20, key_len = 5, l1 = 10, l2 = 13 }
//! seed = 1
//! workers = 8
//! out = "runs/d2"
//! instances = { train = 15, test = 50, valid = 50 }
//!
//! [ea]        # any EaConfig field
//! letter_cap = 10000
//!
//! [hh]        # any HhConfig field
//! c_max = 20
//! p_accept = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aag::AagParams;
use crate::ea::{EaConfig, OperatorCounts};
use crate::error::{Error, Result};
use crate::heuristics::HeuristicChain;
use crate::hyperheuristic::{HhConfig, InitialChain};
use crate::pcgroup::builtin::builtin_group;
use crate::pcgroup::io::load_group_spec;
use crate::pcgroup::GroupSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSource {
    Builtin(usize),
    File(PathBuf),
}

impl GroupSource {
    /// `"d1"`..`"d3"` or a bare degree select built-in groups; anything else
    /// is a file path.
    pub fn parse(s: &str) -> Self {
        let t = s.trim();
        let digits = t.strip_prefix('d').unwrap_or(t);
        match digits.parse::<usize>() {
            Ok(d) if !Path::new(t).exists() => GroupSource::Builtin(d),
            _ => GroupSource::File(PathBuf::from(t)),
        }
    }

    pub fn load(&self) -> Result<GroupSpec> {
        match self {
            GroupSource::Builtin(d) => builtin_group(*d),
            GroupSource::File(p) => load_group_spec(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub train: usize,
    pub test: usize,
    pub valid: usize,
}

impl Default for PhaseCounts {
    fn default() -> Self {
        PhaseCounts {
            train: 15,
            test: 50,
            valid: 50,
        }
    }
}

/// Partial overrides of [`EaConfig`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EaOverrides {
    pub population_size: Option<usize>,
    pub truncation_fraction: Option<f64>,
    pub counts: Option<OperatorCounts>,
    pub maxsteps: Option<usize>,
    pub initial_word_length: Option<usize>,
    pub injected_chain: Option<HeuristicChain>,
    pub letter_cap: Option<usize>,
}

impl EaOverrides {
    pub fn apply(&self, mut c: EaConfig) -> EaConfig {
        if let Some(v) = self.population_size {
            c.population_size = v;
        }
        if let Some(v) = self.truncation_fraction {
            c.truncation_fraction = v;
        }
        if let Some(v) = self.counts {
            c.counts = v;
        }
        if let Some(v) = self.maxsteps {
            c.maxsteps = v;
        }
        if let Some(v) = self.initial_word_length {
            c.initial_word_length = v;
        }
        if let Some(v) = &self.injected_chain {
            c.injected_chain = v.clone();
        }
        if let Some(v) = self.letter_cap {
            c.letter_cap = v;
        }
        c
    }
}

/// Partial overrides of [`HhConfig`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HhOverrides {
    pub c_max: Option<usize>,
    pub p_insert: Option<f64>,
    pub p_substitute: Option<f64>,
    pub p_delete: Option<f64>,
    pub p_accept: Option<f64>,
    /// A chain string, or `"random"`.
    pub initial_chain: Option<String>,
    pub random_init_len: Option<(usize, usize)>,
    pub train_maxsteps: Option<usize>,
    pub test_maxsteps: Option<usize>,
    pub valid_maxsteps: Option<usize>,
    pub time_budget_secs: Option<f64>,
}

impl HhOverrides {
    pub fn apply(&self, mut c: HhConfig) -> Result<HhConfig> {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(
            c_max,
            p_insert,
            p_substitute,
            p_delete,
            p_accept,
            random_init_len
        );
        set!(train_maxsteps, test_maxsteps, valid_maxsteps);
        if self.time_budget_secs.is_some() {
            c.time_budget_secs = self.time_budget_secs;
        }
        if let Some(s) = &self.initial_chain {
            c.initial_chain = parse_initial_chain(s)?;
        }
        Ok(c)
    }
}

pub fn parse_initial_chain(s: &str) -> Result<InitialChain> {
    if s.eq_ignore_ascii_case("random") {
        Ok(InitialChain::Random)
    } else {
        Ok(InitialChain::Given(s.parse()?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSource,
    pub params: AagParams,
    #[serde(default)]
    pub instances: PhaseCounts,
    #[serde(default)]
    pub ea: EaOverrides,
    #[serde(default)]
    pub hh: HhOverrides,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Repeated searches, stopping at the first validated improvement.
    #[serde(default = "one")]
    pub runs: usize,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn new(group: GroupSource, params: AagParams) -> Self {
        ExperimentConfig {
            group,
            params,
            instances: PhaseCounts::default(),
            ea: EaOverrides::default(),
            hh: HhOverrides::default(),
            seed: 0,
            workers: 1,
            out: default_out(),
            runs: 1,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| Error::parse(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let GroupSource::File(p) = &self.group {
            if !p.exists() {
                return Err(Error::InvalidParams(format!(
                    "group file {} does not exist",
                    p.display()
                )));
            }
        }
        let c = self.instances;
        if c.train == 0 || c.test == 0 || c.valid == 0 {
            return Err(Error::InvalidParams(
                "phase instance counts must be >= 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParams("worker count must be >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidParams("runs must be >= 1".into()));
        }
        Ok(())
    }

    /// Degree-dependent defaults with the overrides applied.
    pub fn resolve(&self, spec: &GroupSpec) -> Result<(EaConfig, HhConfig)> {
        let ea = self.ea.apply(EaConfig::default());
        let mut hh = HhConfig::for_degree(spec.degree());
        hh.n_train = self.instances.train;
        hh.n_test = self.instances.test;
        hh.n_valid = self.instances.valid;
        let hh = self.hh.apply(hh)?;
        ea.validate()?;
        hh.validate()?;
        Ok((ea, hh))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_toml() {
        let text = r#"
            group = { builtin = 1 }
            params = { n = 20, key_len = 5, l1 = 10, l2 = 13 }
            seed = 7
            instances = { train = 5, test = 10, valid = 10 }
            [hh]
            c_max = 10
            initial_chain = "H2"
            [ea]
            letter_cap = 500
        "#;
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        cfg.validate().unwrap();
        let spec = cfg.group.load().unwrap();
        let (ea, hh) = cfg.resolve(&spec).unwrap();
        assert_eq!(ea.letter_cap, 500);
        assert_eq!(hh.c_max, 10);
        assert_eq!((hh.n_train, hh.n_test, hh.n_valid), (5, 10, 10));
        assert_eq!((hh.train_maxsteps, hh.valid_maxsteps), (50, 1250));
        assert_eq!(cfg.workers, 1);
    }

    #[test]
    fn rejects_bad_counts() {
        let mut cfg = ExperimentConfig::new(GroupSource::Builtin(1), AagParams::narrow_short());
        cfg.instances.test = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(
            GroupSource::File("/nonexistent.json".into()),
            AagParams::narrow_short(),
        );
        assert!(cfg.validate().is_err());
        cfg.group = GroupSource::Builtin(2);
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn group_source_parsing() {
        assert_eq!(GroupSource::parse("d2"), GroupSource::Builtin(2));
        assert_eq!(GroupSource::parse("3"), GroupSource::Builtin(3));
        assert_eq!(
            GroupSource::parse("groups/x.json"),
            GroupSource::File("groups/x.json".into())
        );
        assert!(parse_initial_chain("random").unwrap() == InitialChain::Random);
    }
}
