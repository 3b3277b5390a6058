//! Dataset identities, split labels and the published split/vocabulary sizes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::{NoveltyReference, Subgraph};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DatasetName {
    #[serde(rename = "syn-paths")]
    SynPaths,
    #[serde(rename = "syn-types")]
    SynTypes,
    #[serde(rename = "syn-tipr")]
    SynTipr,
    #[serde(rename = "wd-movies")]
    WdMovies,
    #[serde(rename = "wd-articles")]
    WdArticles,
}

/// Published statistics for one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetStats {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub entities: usize,
    pub relations: usize,
    pub min_triples: usize,
    pub max_triples: usize,
}

impl DatasetName {
    pub const ALL: [DatasetName; 5] =
        [Self::SynPaths, Self::SynTypes, Self::SynTipr, Self::WdMovies, Self::WdArticles];
    pub const SYNTHETIC: [DatasetName; 3] = [Self::SynPaths, Self::SynTypes, Self::SynTipr];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SynPaths => "syn-paths",
            Self::SynTypes => "syn-types",
            Self::SynTipr => "syn-tipr",
            Self::WdMovies => "wd-movies",
            Self::WdArticles => "wd-articles",
        }
    }

    pub fn is_synthetic(self) -> bool {
        matches!(self, Self::SynPaths | Self::SynTypes | Self::SynTipr)
    }

    pub fn stats(self) -> DatasetStats {
        let (train, valid, test, entities, relations, min_triples, max_triples) = match self {
            Self::SynPaths => (60_000, 20_000, 20_000, 49, 3, 3, 3),
            Self::SynTypes => (60_000, 20_000, 20_000, 30, 3, 3, 3),
            Self::SynTipr => (50_000, 10_000, 10_000, 130, 5, 5, 5),
            Self::WdMovies => (38_267, 15_698, 15_796, 24_093, 3, 2, 21),
            Self::WdArticles => (54_163, 22_922, 22_915, 60_932, 6, 4, 212),
        };
        DatasetStats { train, valid, test, entities, relations, min_triples, max_triples }
    }

    /// Split proportions implied by the published split sizes.
    pub fn split_ratios(self) -> [f64; 3] {
        let s = self.stats();
        let total = (s.train + s.valid + s.test) as f64;
        [s.train as f64 / total, s.valid as f64 / total, s.test as f64 / total]
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetName {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| CoreError::UnknownDataset(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" | "val" | "validation" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(CoreError::Config(format!("unknown split `{other}`"))),
        }
    }
}

/// A dataset with its vocabulary and three splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetBundle {
    pub name: DatasetName,
    pub vocabulary: Vocabulary,
    pub train: Vec<Subgraph>,
    pub valid: Vec<Subgraph>,
    pub test: Vec<Subgraph>,
}

impl DatasetBundle {
    pub fn split(&self, split: Split) -> &[Subgraph] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        [self.train.len(), self.valid.len(), self.test.len()]
    }

    /// Canonical keys of train ∪ valid, the reference for novelty.
    pub fn novelty_reference(&self) -> NoveltyReference {
        NoveltyReference::from_graphs(self.train.iter().chain(&self.valid))
    }

    /// Number of graphs whose canonical key occurs in more than one split.
    pub fn cross_split_duplicates(&self) -> usize {
        use std::collections::HashMap;
        let mut owner: HashMap<_, Split> = HashMap::new();
        let mut dups = 0;
        for split in Split::ALL {
            for g in self.split(split) {
                match owner.entry(g.canonical_key()) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(split);
                    }
                    std::collections::hash_map::Entry::Occupied(o) if *o.get() != split => dups += 1,
                    std::collections::hash_map::Entry::Occupied(_) => {}
                }
            }
        }
        dups
    }
}
