//! Command-line flags, the optional TOML config file, and their merge.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Deserializer, Serialize};
use sgbench_core::{DatasetName, Split};
use sgbench_models::eval::SamplingSetting;
use sgbench_models::{EntityMode, InitScheme, ModelKind};

use crate::exit::Usage;

pub const CACHE_ENV: &str = "SGBENCH_CACHE";
const DEFAULT_CACHE: &str = ".sgbench";

#[derive(Debug, Parser)]
#[command(name = "sgbench", version, about = "Subgraph-inference benchmark toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset.
    Generate {
        #[arg(value_name = "DATASET")]
        dataset: Option<DatasetName>,
    },
    /// Check subgraph files against a dataset's rule set.
    Verify {
        /// Optional dataset name followed by files; without files the
        /// dataset's split files are checked.
        #[arg(value_name = "ARGS")]
        args: Vec<String>,
    },
    /// Train a structure model.
    Train {
        #[arg(value_name = "DATASET")]
        dataset: Option<DatasetName>,
        #[arg(value_name = "MODEL")]
        model: Option<ModelKind>,
    },
    /// Report per-graph codelengths of a split.
    Compress {
        #[arg(value_name = "DATASET")]
        dataset: Option<DatasetName>,
        #[arg(value_name = "MODEL")]
        model: Option<ModelKind>,
    },
    /// Sample graphs and report validity and novelty.
    Sample {
        #[arg(value_name = "DATASET")]
        dataset: Option<DatasetName>,
        #[arg(value_name = "MODEL")]
        model: Option<ModelKind>,
    },
    /// Fetch a released real-world dataset into the cache.
    Download {
        #[arg(value_name = "DATASET")]
        dataset: Option<DatasetName>,
    },
}

fn parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    Option::<String>::deserialize(d)?
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .transpose()
}

/// Every option may come from a flag or from the config file; flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Opts {
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub dataset: Option<DatasetName>,
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub model: Option<ModelKind>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root for generated data, downloads and checkpoints.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Dataset directory; defaults to `<cache>/<dataset>`.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub split: Option<Split>,
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub setting: Option<SamplingSetting>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub batch: Option<usize>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub biases: Option<bool>,
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub init: Option<InitScheme>,
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub entity_mode: Option<EntityMode>,
    #[arg(long, global = true)]
    pub patience: Option<usize>,
    /// Validation graphs scored per epoch (all by default).
    #[arg(long, global = true)]
    pub valid_limit: Option<usize>,
    /// Training graphs to generate.
    #[arg(long, global = true)]
    pub train: Option<usize>,
    #[arg(long, global = true)]
    pub valid: Option<usize>,
    #[arg(long, global = true)]
    pub test: Option<usize>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with any of the options above.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! fill {
    ($dst:ident, $src:ident: $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Opts {
    /// Fills unset flags from the config file.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let file: Opts = toml::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        fill!(self, file: dataset, model, seed, out, cache, data, checkpoint, split, setting, samples, epochs,
            batch, dim, lr, biases, init, entity_mode, patience, valid_limit, train, valid, test, threads);
        Ok(self)
    }

    pub fn with_dataset(mut self, positional: Option<DatasetName>) -> Result<Self> {
        match (positional, self.dataset) {
            (Some(a), Some(b)) if a != b => {
                return Err(Usage(format!("dataset given twice: {a} and --dataset {b}")).into());
            }
            (Some(a), _) => self.dataset = Some(a),
            _ => {}
        }
        Ok(self)
    }

    pub fn with_model(mut self, positional: Option<ModelKind>) -> Result<Self> {
        match (positional, self.model) {
            (Some(a), Some(b)) if a != b => return Err(Usage(format!("model given twice: {a} and --model {b}")).into()),
            (Some(a), _) => self.model = Some(a),
            _ => {}
        }
        Ok(self)
    }

    pub fn dataset(&self) -> Result<DatasetName> {
        self.dataset.ok_or_else(|| Usage("no dataset given".into()).into())
    }

    pub fn model(&self) -> Result<ModelKind> {
        self.model.ok_or_else(|| Usage("no model given".into()).into())
    }

    pub fn cache(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(|| Path::new(DEFAULT_CACHE).to_owned())
    }

    pub fn data_dir(&self, name: DatasetName) -> PathBuf {
        self.data.clone().unwrap_or_else(|| self.cache().join(name.as_str()))
    }
}
