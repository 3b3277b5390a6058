//! Entity models for the `-log2 p(E)` term.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sgbench_core::{EntityId, Subgraph, Vocabulary};

/// Bits charged per vocabulary entity by the random baseline.
pub const RANDOM_BITS_PER_ITEM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityMode {
    /// Relative frequency over all subject and object slots.
    #[default]
    Slot,
    /// Fraction of training graphs containing the entity.
    Graph,
}

impl std::str::FromStr for EntityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "slot" => Ok(Self::Slot),
            "graph" => Ok(Self::Graph),
            _ => Err(format!("unknown entity mode `{s}` (expected slot or graph)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EntityModel {
    /// Smoothed unigram estimate. In slot mode `probs` sums to one; in graph
    /// mode each entry is an inclusion probability.
    Unigram { mode: EntityMode, epsilon: f64, probs: Vec<f64> },
    /// Uniform baseline over `num_entities` entities.
    Random { num_entities: usize },
}

impl EntityModel {
    /// Fits a unigram model. `epsilon = None` uses half a count relative to
    /// the number of training slots (slot mode) or graphs (graph mode).
    pub fn fit(train: &[Subgraph], num_entities: usize, mode: EntityMode, epsilon: Option<f64>) -> Self {
        let mut counts = vec![0usize; num_entities];
        let total = match mode {
            EntityMode::Slot => {
                for e in train.iter().flat_map(Subgraph::entity_slots) {
                    counts[e.index()] += 1;
                }
                2 * train.iter().map(Subgraph::len).sum::<usize>()
            }
            EntityMode::Graph => {
                for e in train.iter().flat_map(Subgraph::entities) {
                    counts[e.index()] += 1;
                }
                train.len()
            }
        };
        let epsilon = epsilon.unwrap_or(if total == 0 { 1.0 } else { 1.0 / (2.0 * total as f64) });
        let norm = match mode {
            EntityMode::Slot => total as f64 + epsilon * num_entities as f64,
            EntityMode::Graph => total as f64 + 2.0 * epsilon,
        };
        let probs = counts.iter().map(|c| (*c as f64 + epsilon) / norm).collect();
        Self::Unigram { mode, epsilon, probs }
    }

    pub fn random(num_entities: usize) -> Self {
        Self::Random { num_entities }
    }

    pub fn num_entities(&self) -> usize {
        match self {
            Self::Unigram { probs, .. } => probs.len(),
            Self::Random { num_entities } => *num_entities,
        }
    }

    pub fn prob(&self, e: EntityId) -> f64 {
        match self {
            Self::Unigram { probs, .. } => probs[e.index()],
            Self::Random { num_entities } => 1.0 / *num_entities as f64,
        }
    }

    /// `-log2 p(E)` of a graph's entities.
    pub fn codelength(&self, g: &Subgraph) -> f64 {
        match self {
            Self::Unigram { mode: EntityMode::Slot, probs, .. } => {
                g.entity_slots().map(|e| -probs[e.index()].log2()).sum()
            }
            Self::Unigram { mode: EntityMode::Graph, probs, .. } => {
                g.entities().into_iter().map(|e| -probs[e.index()].log2()).sum()
            }
            Self::Random { num_entities } => RANDOM_BITS_PER_ITEM * *num_entities as f64,
        }
    }

    /// Sampling weight of each entity.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            Self::Unigram { probs, .. } => probs.clone(),
            Self::Random { num_entities } => vec![1.0; *num_entities],
        }
    }
}

/// Empirical distribution of entity-set sizes in the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeDistribution {
    sizes: Vec<usize>,
}

impl SizeDistribution {
    pub fn fit(train: &[Subgraph]) -> Self {
        let mut sizes: Vec<usize> = train.iter().map(|g| g.entities().len()).collect();
        sizes.sort_unstable();
        Self { sizes }
    }

    pub fn from_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable();
        Self { sizes }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sizes.choose(rng).copied().unwrap_or(0)
    }

    /// Share of training graphs with exactly `size` entities.
    pub fn share(&self, size: usize) -> f64 {
        if self.sizes.is_empty() {
            return 0.0;
        }
        self.sizes.iter().filter(|s| **s == size).count() as f64 / self.sizes.len() as f64
    }
}

/// Existential entities that occur in every training graph, such as `_movie`.
pub fn mandatory_entities(train: &[Subgraph], vocab: &Vocabulary) -> Vec<EntityId> {
    let mut out: Vec<EntityId> = vocab.existential_entities().collect();
    out.retain(|e| !train.is_empty() && train.iter().all(|g| g.entities().binary_search(e).is_ok()));
    out
}

/// Draws an entity list: a size from `sizes`, the mandatory entities, then
/// the rest without replacement proportionally to the model's weights. Sizes
/// beyond the vocabulary are capped.
pub fn sample_entities<R: Rng + ?Sized>(
    model: &EntityModel,
    sizes: &SizeDistribution,
    mandatory: &[EntityId],
    rng: &mut R,
) -> Vec<EntityId> {
    let n = model.num_entities();
    let mut size = sizes.sample(rng);
    if size > n {
        log::warn!("requested {size} entities from a vocabulary of {n}; capping");
        size = n;
    }
    let mut out: Vec<EntityId> = mandatory.iter().copied().take(size.max(mandatory.len())).collect();
    let weights = model.weights();
    let pool: Vec<EntityId> = (0..n as u32).map(EntityId).filter(|e| !mandatory.contains(e)).collect();
    let extra = size.saturating_sub(out.len());
    if extra > 0 {
        match model {
            EntityModel::Random { .. } => out.extend(pool.choose_multiple(rng, extra).copied()),
            EntityModel::Unigram { .. } => out.extend(
                pool.choose_multiple_weighted(rng, extra, |e| weights[e.index()])
                    .expect("finite positive weights")
                    .copied(),
            ),
        }
    }
    out.shuffle(rng);
    out.sort_unstable();
    out
}
