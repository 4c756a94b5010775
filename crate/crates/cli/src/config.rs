use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fuzzy_dsr::data::PrepareOptions;
use fuzzy_dsr::eval::RewardKind;
use fuzzy_dsr::trainer::{Method, SearchMode, TrainConfig};
use serde::{Deserialize, Serialize};

/// Parameters of the synthetic transaction generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub rows: usize,
    pub seed: u64,
    /// Bernoulli label rate; ignored when `planted` is set.
    pub fraud_rate: f64,
    /// Label rows with the built-in planted rule instead.
    pub planted: bool,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec { rows: 10_000, seed: 0, fraud_rate: 0.0013, planted: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    /// PaySim-schema CSV, relative to the config file.
    pub csv: Option<PathBuf>,
    pub synthetic: Option<SynthSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSource,
    /// Output directory, relative to the config file.
    pub out: PathBuf,
    pub seeds: Vec<u64>,
    /// One sweep per method; `train.method` is ignored.
    pub methods: Vec<Method>,
    pub prepare: PrepareOptions,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: DataSource::default(),
            out: PathBuf::from("runs"),
            seeds: vec![0],
            methods: vec![Method::Lukasiewicz],
            prepare: PrepareOptions::default(),
            train: TrainConfig::default(),
        }
    }
}

/// Command-line values that replace config keys.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Run only this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run only this method (Goedel, Product, Lukasiewicz, Combined).
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub reward: Option<RewardKind>,
    /// Force an S-implication at the root.
    #[arg(long)]
    pub constrained: bool,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub entropy_weight: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub noise_level: Option<f64>,
    /// Output directory, relative to the working directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        Ok(cfg)
    }

    /// Reads `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(csv) = &cfg.data.csv {
            cfg.data.csv = Some(base.join(csv));
        }
        cfg.out = base.join(&cfg.out);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seeds = vec![s];
        }
        if let Some(m) = o.method {
            self.methods = vec![m];
        }
        let t = &mut self.train;
        if let Some(r) = o.reward {
            t.reward = r;
        }
        if o.constrained {
            t.mode = SearchMode::Constrained;
        }
        set(&mut t.n_samples, o.n_samples);
        set(&mut t.batch_size, o.batch_size);
        set(&mut t.epsilon, o.epsilon);
        set(&mut t.learning_rate, o.learning_rate);
        set(&mut t.entropy_weight, o.entropy_weight);
        set(&mut t.threshold, o.threshold);
        set(&mut self.prepare.noise_level, o.noise_level);
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.data.csv, &self.data.synthetic) {
            (Some(_), Some(_)) => bail!("config sets both data.csv and data.synthetic; choose one"),
            (None, None) => bail!("config needs a data source: data.csv or data.synthetic"),
            _ => {}
        }
        if self.seeds.is_empty() {
            bail!("seeds must not be empty");
        }
        if self.methods.is_empty() {
            bail!("methods must not be empty");
        }
        self.train.validate()?;
        Ok(())
    }

    /// Training configs for every (method, seed) pair, method-major.
    pub fn runs(&self) -> Vec<TrainConfig> {
        self.methods
            .iter()
            .flat_map(|&method| self.seeds.iter().map(move |&seed| TrainConfig { method, seed, ..self.train.clone() }))
            .collect()
    }
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_toml(
            r#"
            out = "exp"
            seeds = [0, 1]
            methods = ["Lukasiewicz", "product"]

            [data.synthetic]
            rows = 2000
            planted = true

            [prepare]
            noise_level = 0.1

            [train]
            n_samples = 1000
            reward = "F2"
            mode = "constrained"
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.methods, [Method::Lukasiewicz, Method::Product]);
        assert_eq!(cfg.data.synthetic.as_ref().unwrap().rows, 2000);
        assert_eq!(cfg.prepare.noise_level, 0.1);
        assert_eq!(cfg.prepare.split_ratio, 0.7);
        assert_eq!(cfg.train.batch_size, 500);
        assert_eq!(cfg.train.reward, RewardKind::F2);
        let runs = cfg.runs();
        assert_eq!(runs.len(), 4);
        assert_eq!((runs[3].method, runs[3].seed), (Method::Product, 1));
    }

    #[test]
    fn exactly_one_source() {
        let both = RunConfig::from_toml("[data]\ncsv = \"a.csv\"\n[data.synthetic]\n").unwrap();
        assert!(both.validate().is_err());
        assert!(RunConfig::default().validate().is_err());
        assert!(RunConfig::from_toml("[data]\ncsv = \"a.csv\"\n").unwrap().validate().is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[train]\nlearning_rat = 0.1\n").is_err());
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig { seeds: vec![0, 1, 2], ..Default::default() };
        cfg.apply(&Overrides {
            seed: Some(7),
            method: Some(Method::Goedel),
            constrained: true,
            learning_rate: Some(0.01),
            noise_level: Some(0.0),
            ..Default::default()
        });
        assert_eq!(cfg.seeds, [7]);
        assert_eq!(cfg.methods, [Method::Goedel]);
        assert_eq!(cfg.train.mode, SearchMode::Constrained);
        assert_eq!(cfg.train.learning_rate, 0.01);
        assert_eq!(cfg.prepare.noise_level, 0.0);
    }

    #[test]
    fn shipped_configs_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut n = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let cfg = RunConfig::load(&path).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
        assert!(n >= 3);
    }
}
