//! Experiment and sweep configuration files.
//!
//! Configs are flat TOML documents; see the README for the full key list.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baselines::BaselineKind;
use crate::env::{self, parse_num, split_id, Environment};
use crate::error::{Error, Result};

pub const LEARNER_IDS: &str = "logduelli, uniform, grid_etc:K=<k>,phi=<phi>";

const KEYS: &[&str] = &[
    "environment",
    "transfer",
    "learner",
    "T",
    "delta",
    "d_z",
    "seeds",
    "output",
    "full_trace",
    "horizons",
    "replications",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LearnerSpec {
    LogDuelLi,
    Baseline(BaselineKind),
}

impl LearnerSpec {
    pub fn parse(id: &str) -> Result<Self> {
        let (name, params) = split_id(id)?;
        match name {
            "logduelli" if params.is_empty() => Ok(LearnerSpec::LogDuelLi),
            "uniform" if params.is_empty() => {
                Ok(LearnerSpec::Baseline(BaselineKind::UniformRandom))
            }
            "grid_etc" => {
                let mut k = None;
                let mut phi = None;
                for (key, value) in params {
                    match key {
                        "K" => k = Some(parse_num::<u32>(key, value)?),
                        "phi" => phi = Some(parse_num::<f64>(key, value)?),
                        _ => return Err(Error::param(key, format!("not a parameter of `{id}`"))),
                    }
                }
                let k = k.ok_or_else(|| Error::param("K", "missing"))?;
                let phi = phi.ok_or_else(|| Error::param("phi", "missing"))?;
                Ok(LearnerSpec::Baseline(BaselineKind::grid_etc(k, phi)?))
            }
            "logduelli" | "uniform" => Err(Error::param(id, "takes no parameters")),
            other => Err(Error::UnknownId {
                kind: "learner",
                id: other.to_string(),
                registered: LEARNER_IDS.to_string(),
            }),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::LogDuelLi => f.write_str("logduelli"),
            LearnerSpec::Baseline(BaselineKind::UniformRandom) => f.write_str("uniform"),
            LearnerSpec::Baseline(BaselineKind::GridEtc {
                per_axis,
                explore_fraction,
            }) => write!(f, "grid_etc:K={per_axis},phi={explore_fraction}"),
        }
    }
}

/// A validated single-horizon experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub environment_id: String,
    pub transfer_id: String,
    pub env: Environment,
    pub learner: LearnerSpec,
    pub horizon: u64,
    /// `None` means `1/T`.
    pub delta: Option<f64>,
    /// `None` means the ambient dimension.
    pub zooming_dim: Option<u32>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub full_trace: bool,
}

impl ExperimentConfig {
    pub fn new(
        environment: &str,
        transfer: &str,
        learner: &str,
        horizon: u64,
        seeds: Vec<u64>,
    ) -> Result<Self> {
        let reward = env::parse_reward(environment).map_err(|e| named("environment", e))?;
        let transfer_fn = env::parse_transfer(transfer).map_err(|e| named("transfer", e))?;
        let learner_spec = LearnerSpec::parse(learner).map_err(|e| named("learner", e))?;
        let cfg = Self {
            environment_id: environment.to_string(),
            transfer_id: transfer.to_string(),
            env: Environment::new(reward, transfer_fn),
            learner: learner_spec,
            horizon,
            delta: None,
            zooming_dim: None,
            seeds,
            output: None,
            full_trace: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::field(
                "T",
                format!("must be >= 2, got {}", self.horizon),
            ));
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::field(
                    "delta",
                    format!("must lie in (0, 1), got {delta}"),
                ));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::field("seeds", "must not be empty"));
        }
        let distinct: BTreeSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(Error::field("seeds", "must be distinct"));
        }
        Ok(())
    }

    pub fn zooming_dim_or_default(&self) -> u32 {
        self.zooming_dim.unwrap_or(self.env.dim() as u32)
    }
}

/// A horizon sweep around a base experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub horizons: Vec<u64>,
    pub replications: usize,
}

impl SweepConfig {
    pub fn new(base: ExperimentConfig, horizons: Vec<u64>, replications: usize) -> Result<Self> {
        let cfg = Self {
            base,
            horizons,
            replications,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.len() < 4 {
            return Err(Error::field(
                "horizons",
                "need at least 4 horizons for a slope fit",
            ));
        }
        if !self.horizons.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::field("horizons", "must be strictly increasing"));
        }
        if let Some(h) = self
            .horizons
            .iter()
            .find(|h| !h.is_power_of_two() || **h < 2)
        {
            return Err(Error::field(
                "horizons",
                format!("{h} is not a power of two >= 2"),
            ));
        }
        if self.replications == 0 {
            return Err(Error::field("replications", "must be >= 1"));
        }
        Ok(())
    }

    /// The configured seeds, extended with consecutive integers past the
    /// largest one when more replications than seeds are requested.
    pub fn seeds(&self) -> Vec<u64> {
        let mut seeds: Vec<u64> = self
            .base
            .seeds
            .iter()
            .copied()
            .take(self.replications)
            .collect();
        let mut next = self.base.seeds.iter().max().map_or(0, |m| m + 1);
        while seeds.len() < self.replications {
            seeds.push(next);
            next += 1;
        }
        seeds
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Config {
    Experiment(ExperimentConfig),
    Sweep(SweepConfig),
}

#[derive(Deserialize)]
struct RawConfig {
    environment: Option<String>,
    transfer: Option<String>,
    learner: Option<String>,
    #[serde(rename = "T")]
    horizon: Option<i64>,
    delta: Option<f64>,
    d_z: Option<i64>,
    seeds: Option<Vec<i64>>,
    output: Option<String>,
    full_trace: Option<bool>,
    horizons: Option<Vec<i64>>,
    replications: Option<i64>,
}

fn named(field: &str, err: Error) -> Error {
    match err {
        Error::Validation { .. } => err,
        other => Error::field(field, other.to_string()),
    }
}

fn required<T>(field: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::field(field, "missing required key"))
}

fn non_negative(field: &str, v: i64) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::field(field, format!("must be non-negative, got {v}")))
}

/// Parses config text. `origin` is only used in error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<Config> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        path: origin.to_path_buf(),
        message: e.message().to_string(),
    })?;
    if let Some(key) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::field(
            key.as_str(),
            format!("unknown key; allowed: {}", KEYS.join(", ")),
        ));
    }
    let raw: RawConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })?;

    let seeds = required("seeds", raw.seeds)?
        .into_iter()
        .map(|s| non_negative("seeds", s))
        .collect::<Result<Vec<_>>>()?;
    let horizons = raw
        .horizons
        .map(|hs| {
            hs.into_iter()
                .map(|h| non_negative("horizons", h))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let horizon = match (raw.horizon, &horizons) {
        (Some(t), _) => non_negative("T", t)?,
        (None, Some(hs)) => hs.iter().copied().max().unwrap_or(0),
        (None, None) => return Err(Error::field("T", "missing required key")),
    };

    let mut base = ExperimentConfig::new(
        &required("environment", raw.environment)?,
        &required("transfer", raw.transfer)?,
        &required("learner", raw.learner)?,
        horizon,
        seeds,
    )?;
    base.delta = raw.delta;
    base.zooming_dim = raw
        .d_z
        .map(|d| non_negative("d_z", d).map(|d| d as u32))
        .transpose()?;
    base.output = raw.output.map(PathBuf::from);
    base.full_trace = raw.full_trace.unwrap_or(false);
    base.validate()?;

    match horizons {
        Some(horizons) => {
            let replications = match raw.replications {
                Some(r) => non_negative("replications", r)? as usize,
                None => base.seeds.len(),
            };
            Ok(Config::Sweep(SweepConfig::new(
                base,
                horizons,
                replications,
            )?))
        }
        None => {
            if raw.replications.is_some() {
                return Err(Error::field(
                    "replications",
                    "only valid together with `horizons`",
                ));
            }
            Ok(Config::Experiment(base))
        }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config> {
        parse_config(text, Path::new("test.toml"))
    }

    const MINIMAL: &str = r#"
environment = "cone_peak:d=1"
transfer = "linear"
learner = "logduelli"
T = 4096
seeds = [1]
"#;

    #[test]
    fn minimal_experiment() {
        let Config::Experiment(cfg) = parse(MINIMAL).unwrap() else {
            panic!("expected experiment");
        };
        assert_eq!(cfg.horizon, 4096);
        assert_eq!(cfg.seeds, vec![1]);
        assert_eq!(cfg.learner, LearnerSpec::LogDuelLi);
        assert_eq!(cfg.delta, None);
        assert_eq!(cfg.zooming_dim_or_default(), 1);
    }

    #[test]
    fn horizon_too_small() {
        let err = parse(&MINIMAL.replace("4096", "1")).unwrap_err();
        assert!(
            matches!(&err, Error::Validation { field, .. } if field == "T"),
            "{err}"
        );
    }

    #[test]
    fn unknown_learner_lists_registered() {
        let err = parse(&MINIMAL.replace("\"logduelli\"", "\"rucb\"")).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "learner"));
        assert!(
            msg.contains("logduelli") && msg.contains("uniform") && msg.contains("grid_etc"),
            "{msg}"
        );
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse(&format!("{MINIMAL}colour = \"red\"\n")).unwrap_err();
        assert!(
            matches!(&err, Error::Validation { field, .. } if field == "colour"),
            "{err}"
        );
    }

    #[test]
    fn malformed_file() {
        assert!(matches!(parse("T = = 3"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse(&MINIMAL.replace("4096", "\"big\"")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn seeds_must_be_distinct_and_present() {
        let err = parse(&MINIMAL.replace("[1]", "[1, 1]")).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "seeds"));
        let err = parse(&MINIMAL.replace("[1]", "[]")).unwrap_err();
        assert!(matches!(&err, Error::Validation { field, .. } if field == "seeds"));
    }

    #[test]
    fn sweep_config() {
        let text = MINIMAL.replace(
            "T = 4096\n",
            "horizons = [1024, 2048, 4096, 8192]\nreplications = 3\n",
        );
        let Config::Sweep(sweep) = parse(&text).unwrap() else {
            panic!("expected sweep");
        };
        assert_eq!(sweep.base.horizon, 8192);
        assert_eq!(sweep.seeds(), vec![1, 2, 3]);
        let bad = MINIMAL.replace("T = 4096\n", "horizons = [1024, 4096, 2048, 8192]\n");
        assert!(parse(&bad).is_err());
        let short = MINIMAL.replace("T = 4096\n", "horizons = [1024, 2048, 4096]\n");
        assert!(
            matches!(parse(&short), Err(Error::Validation { field, .. }) if field == "horizons")
        );
    }

    #[test]
    fn learner_ids() {
        assert_eq!(
            LearnerSpec::parse("grid_etc:K=8,phi=0.1").unwrap(),
            LearnerSpec::Baseline(BaselineKind::GridEtc {
                per_axis: 8,
                explore_fraction: 0.1
            })
        );
        assert!(LearnerSpec::parse("grid_etc:K=1,phi=0.1").is_err());
        assert!(LearnerSpec::parse("uniform:K=2").is_err());
        for id in ["logduelli", "uniform", "grid_etc:K=4,phi=0.25"] {
            assert_eq!(LearnerSpec::parse(id).unwrap().to_string(), id);
        }
    }
}
