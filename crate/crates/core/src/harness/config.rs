use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dataset::StratumBounds;
use crate::error::{Error, Result};
use crate::scaling::ScalerKind;

/// Models of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelId {
    Knn,
    Gnb,
    Percep,
    Dt,
    Lda,
    Bagging,
    Rf,
    AdaBoost,
    Ola,
    Lca,
    Mcb,
    KnoraE,
    KnoraU,
}

impl ModelId {
    pub const ALL: [ModelId; 13] = [
        ModelId::Knn,
        ModelId::Gnb,
        ModelId::Percep,
        ModelId::Dt,
        ModelId::Lda,
        ModelId::Bagging,
        ModelId::Rf,
        ModelId::AdaBoost,
        ModelId::Ola,
        ModelId::Lca,
        ModelId::Mcb,
        ModelId::KnoraE,
        ModelId::KnoraU,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Knn => "knn",
            ModelId::Gnb => "gnb",
            ModelId::Percep => "percep",
            ModelId::Dt => "dt",
            ModelId::Lda => "lda",
            ModelId::Bagging => "bagging",
            ModelId::Rf => "rf",
            ModelId::AdaBoost => "adaboost",
            ModelId::Ola => "ola",
            ModelId::Lca => "lca",
            ModelId::Mcb => "mcb",
            ModelId::KnoraE => "knorae",
            ModelId::KnoraU => "knorau",
        }
    }

    /// Models that predict through the shared Bagging pool.
    pub fn uses_pool(self) -> bool {
        matches!(
            self,
            ModelId::Bagging | ModelId::Ola | ModelId::Lca | ModelId::Mcb | ModelId::KnoraE | ModelId::KnoraU
        )
    }

    /// Identifier hashed into the cell seed. Pool users all hash as
    /// `bagging`, so they share one pool per fold.
    pub fn seed_key(self) -> &'static str {
        if self.uses_pool() {
            ModelId::Bagging.as_str()
        } else {
            self.as_str()
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`")))
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Holds one sub-directory of fold files per dataset.
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Datasets to run; empty means every dataset found in `data_dir`.
    pub datasets: Vec<String>,
    pub exclude: Vec<String>,
    pub scalers: Vec<ScalerKind>,
    pub models: Vec<ModelId>,
    pub seed: u64,
    pub jobs: usize,
    pub strata: StratumBounds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data/keel"),
            out_dir: PathBuf::from("results"),
            datasets: Vec::new(),
            exclude: Vec::new(),
            scalers: ScalerKind::DEFAULT_GRID.to_vec(),
            models: ModelId::ALL.to_vec(),
            seed: 42,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            strata: StratumBounds::default(),
        }
    }
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl ExperimentConfig {
    /// Recognised keys, in the order `to_kv_string` writes them.
    pub const KEYS: [&'static str; 9] = [
        "data_dir", "out_dir", "datasets", "exclude", "scalers", "models", "seed", "jobs", "strata",
    ];

    /// Sets one option. Keys accept `-` in place of `_`; lists are
    /// comma-separated; `strata` is `low_max,medium_max`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "data_dir" => self.data_dir = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "datasets" => self.datasets = list(value),
            "exclude" => self.exclude = list(value),
            "scalers" => {
                self.scalers = list(value)
                    .iter()
                    .map(|s| s.parse::<ScalerKind>().map_err(|e| Error::Config(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "models" => self.models = list(value).iter().map(|s| s.parse()).collect::<Result<_>>()?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("seed must be an unsigned integer, got `{value}`")))?
            }
            "jobs" => {
                self.jobs = value
                    .parse()
                    .map_err(|_| Error::Config(format!("jobs must be a positive integer, got `{value}`")))?
            }
            "strata" => {
                let parts: Vec<f64> = list(value)
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Config(format!("strata must be two numbers, got `{value}`")))?;
                let [low_max, medium_max] = parts[..] else {
                    return Err(Error::Config(format!("strata must be two numbers, got `{value}`")));
                };
                self.strata = StratumBounds { low_max, medium_max };
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_kv_str(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv_str(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text)
    }

    /// The config as a key-value file that `from_kv_str` reads back.
    pub fn to_kv_string(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("data_dir", self.data_dir.display().to_string());
        put("out_dir", self.out_dir.display().to_string());
        put("datasets", self.datasets.join(","));
        put("exclude", self.exclude.join(","));
        put("scalers", join(self.scalers.iter().map(|s| s.code().to_string()).collect()));
        put("models", join(self.models.iter().map(|m| m.to_string()).collect()));
        put("seed", self.seed.to_string());
        put("jobs", self.jobs.to_string());
        put(
            "strata",
            format!("{},{}", self.strata.low_max, self.strata.medium_max),
        );
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.scalers.is_empty() {
            return Err(Error::Config("at least one scaler is required".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("at least one model is required".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        for s in &self.scalers {
            s.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        let dup = |codes: Vec<&str>| {
            let mut c = codes.clone();
            c.sort();
            c.windows(2).find(|w| w[0] == w[1]).map(|w| w[0].to_string())
        };
        if let Some(d) = dup(self.scalers.iter().map(|s| s.code()).collect()) {
            return Err(Error::Config(format!("scaler `{d}` listed twice")));
        }
        if let Some(d) = dup(self.models.iter().map(|m| m.as_str()).collect()) {
            return Err(Error::Config(format!("model `{d}` listed twice")));
        }
        let (lo, hi) = (self.strata.low_max, self.strata.medium_max);
        if !(lo.is_finite() && hi.is_finite() && 1.0 <= lo && lo <= hi) {
            return Err(Error::Config(format!("strata bounds must satisfy 1 ≤ low ≤ medium, got {lo},{hi}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_ids_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
        }
        assert_eq!("KNORAE".parse::<ModelId>().unwrap(), ModelId::KnoraE);
        assert!("svm".parse::<ModelId>().is_err());
        assert_eq!(ModelId::Ola.seed_key(), "bagging");
        assert_eq!(ModelId::Rf.seed_key(), "rf");
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::default();
        let codes: Vec<&str> = c.scalers.iter().map(|s| s.code()).collect();
        assert_eq!(codes, ["NS", "SS", "MM", "MA", "RS", "QT"]);
        assert_eq!(c.models.len(), 13);
        assert_eq!(c.strata, StratumBounds::default());
        c.validate().unwrap();
    }

    #[test]
    fn key_value_file() {
        let text = "# run\n data-dir = /tmp/d\nmodels = dt, percep\nscalers=NS,QT\nseed = 7\njobs=3\nstrata = 2.5, 10\n\ndatasets = glass1,iris0\n";
        let c = ExperimentConfig::from_kv_str(text).unwrap();
        assert_eq!(c.data_dir, PathBuf::from("/tmp/d"));
        assert_eq!(c.models, vec![ModelId::Dt, ModelId::Percep]);
        assert_eq!(c.scalers.len(), 2);
        assert_eq!((c.seed, c.jobs), (7, 3));
        assert_eq!(c.strata, StratumBounds { low_max: 2.5, medium_max: 10.0 });
        assert_eq!(c.datasets, vec!["glass1", "iris0"]);
        let again = ExperimentConfig::from_kv_str(&c.to_kv_string()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn bad_config_lines() {
        assert!(ExperimentConfig::from_kv_str("seed 3").is_err());
        assert!(ExperimentConfig::from_kv_str("colour = red").is_err());
        assert!(ExperimentConfig::from_kv_str("strata = 3").is_err());
        assert!(ExperimentConfig::from_kv_str("scalers = XX").is_err());
        let mut c = ExperimentConfig::default();
        c.models.clear();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_kv_str("scalers = NS,NS").unwrap();
        assert!(c.validate().is_err());
    }
}
