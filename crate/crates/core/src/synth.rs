//! Seeded generators for the synthetic datasets.
//!
//! Every graph slot `(split, index)` owns a ChaCha8 stream derived from the
//! seed, so candidates can be drawn in parallel. A sequential merge in the
//! order train, valid, test then accepts the first candidate of each slot
//! whose canonical key is unused, drawing further candidates from the same
//! stream on collision. The output therefore does not depend on thread count.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetBundle, DatasetName, Split};
use crate::error::{CoreError, Result};
use crate::graph::{EntityId, RelationId, Subgraph, Triple};
use crate::lexicon::{self, synthetic_vocabulary};
use crate::rules::{verify, RuleSet};
use crate::vocab::Vocabulary;

pub const GENERATOR_VERSION: &str = concat!("sgbench-synth/", env!("CARGO_PKG_VERSION"));
pub const RNG_NAME: &str = "chacha8";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub dataset: DatasetName,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub seed: u64,
    pub max_attempts: usize,
}

impl GeneratorConfig {
    /// Published split sizes and the default seed.
    pub fn new(dataset: DatasetName) -> Self {
        let s = dataset.stats();
        Self {
            dataset,
            train: s.train,
            valid: s.valid,
            test: s.test,
            seed: DEFAULT_SEED,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn with_counts(mut self, train: usize, valid: usize, test: usize) -> Self {
        (self.train, self.valid, self.test) = (train, valid, test);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn count(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Valid => self.valid,
            Split::Test => self.test,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dataset.is_synthetic() {
            return Err(CoreError::Config(format!("{} is not a synthetic dataset", self.dataset)));
        }
        if self.train == 0 || self.valid == 0 || self.test == 0 {
            return Err(CoreError::Config("split counts must be positive".into()));
        }
        if self.max_attempts == 0 {
            return Err(CoreError::Config("max_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// The random stream owned by graph slot `(split, index)`.
pub fn graph_rng(seed: u64, split: Split, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((split.index() as u64) << 48) | index as u64);
    rng
}

/// Entity and relation ids of a synthetic dataset grouped by role.
#[derive(Debug, Clone)]
pub struct Sampler {
    dataset: DatasetName,
    vocabulary: Vocabulary,
    relations: Vec<RelationId>,
    groups: Vec<Vec<EntityId>>,
}

impl Sampler {
    pub fn new(dataset: DatasetName) -> Result<Self> {
        let vocabulary = synthetic_vocabulary(dataset)
            .ok_or_else(|| CoreError::Config(format!("{dataset} is not a synthetic dataset")))?;
        let ids = |labels: &[&str]| -> Vec<EntityId> {
            labels.iter().map(|l| vocabulary.entity_id(l).expect("lexicon label in vocabulary")).collect()
        };
        let groups = match dataset {
            DatasetName::SynPaths => vec![ids(lexicon::cities())],
            DatasetName::SynTypes => vec![ids(lexicon::languages()), ids(lexicon::countries()), ids(lexicon::capitals())],
            DatasetName::SynTipr => {
                let years: Vec<String> = lexicon::years().map(|y| y.to_string()).collect();
                let years: Vec<&str> = years.iter().map(String::as_str).collect();
                vec![
                    ids(&[lexicon::ACADEMIC_NODE, lexicon::TIME_NODE]),
                    ids(lexicon::person_names()),
                    ids(lexicon::roles()),
                    ids(&years),
                ]
            }
            _ => unreachable!(),
        };
        let relations = (0..vocabulary.num_relations() as u32).map(RelationId).collect();
        Ok(Self { dataset, vocabulary, relations, groups })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    fn relation(&self, label: &str) -> RelationId {
        self.vocabulary.relation_id(label).expect("relation in vocabulary")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Subgraph {
        match self.dataset {
            DatasetName::SynPaths => self.sample_path_graph(rng),
            DatasetName::SynTypes => self.sample_typed_graph(rng),
            DatasetName::SynTipr => self.sample_tipr_graph(rng),
            _ => unreachable!(),
        }
    }

    /// A directed path over four distinct cities, one uniform transport
    /// relation per edge.
    pub fn sample_path_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Subgraph {
        let cities: Vec<EntityId> = self.groups[0].choose_multiple(rng, 4).copied().collect();
        let mut g = Subgraph::empty();
        for w in cities.windows(2) {
            let r = *self.relations.choose(rng).expect("relations");
            g.push(Triple::new(w[0], r, w[1]));
        }
        g
    }

    /// One triple per relation: `same_type_as` between two distinct entities of
    /// a uniformly chosen type, `could_be_part_of` city to country and
    /// `spoken_in` language to country.
    pub fn sample_typed_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Subgraph {
        let [languages, countries, cities] = [&self.groups[0], &self.groups[1], &self.groups[2]];
        let mut g = Subgraph::empty();
        let pool = [languages, countries, cities][rng.random_range(0..3)];
        let pair: Vec<EntityId> = pool.choose_multiple(rng, 2).copied().collect();
        g.push(Triple::new(pair[0], self.relation(lexicon::SAME_TYPE_AS), pair[1]));
        let city = *cities.choose(rng).expect("cities");
        let country = *countries.choose(rng).expect("countries");
        g.push(Triple::new(city, self.relation(lexicon::COULD_BE_PART_OF), country));
        let language = *languages.choose(rng).expect("languages");
        let country = *countries.choose(rng).expect("countries");
        g.push(Triple::new(language, self.relation(lexicon::SPOKEN_IN), country));
        g
    }

    /// The five-triple tipr template. The start year is uniform over all but
    /// the last year and the end year uniform over the later ones, so both
    /// year nodes are distinct.
    pub fn sample_tipr_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Subgraph {
        let (academic, time) = (self.groups[0][0], self.groups[0][1]);
        let name = *self.groups[1].choose(rng).expect("names");
        let role = *self.groups[2].choose(rng).expect("roles");
        let years = &self.groups[3];
        let start = rng.random_range(0..years.len() - 1);
        let end = rng.random_range(start + 1..years.len());
        let mut g = Subgraph::empty();
        g.push(Triple::new(academic, self.relation(lexicon::HAS_NAME), name));
        g.push(Triple::new(academic, self.relation(lexicon::HAS_ROLE), role));
        g.push(Triple::new(academic, self.relation(lexicon::HAS_TIME), time));
        g.push(Triple::new(time, self.relation(lexicon::START_YEAR), years[start]));
        g.push(Triple::new(time, self.relation(lexicon::END_YEAR), years[end]));
        g
    }
}

struct Slot {
    split: Split,
    index: usize,
    rng: ChaCha8Rng,
    candidate: Option<Subgraph>,
    attempts: usize,
}

impl Slot {
    /// Draws until a verifier-valid candidate appears or the budget runs out.
    fn draw(&mut self, sampler: &Sampler, rules: &RuleSet, budget: usize) {
        self.candidate = None;
        while self.attempts < budget {
            self.attempts += 1;
            let g = sampler.sample(&mut self.rng);
            if verify(&g, sampler.vocabulary(), rules).valid {
                self.candidate = Some(g);
                return;
            }
        }
    }
}

/// Generates a full synthetic dataset. Every graph passes the dataset's rule
/// set and no canonical form occurs twice across all splits.
pub fn generate(config: &GeneratorConfig) -> Result<DatasetBundle> {
    config.validate()?;
    let sampler = Sampler::new(config.dataset)?;
    let rules = RuleSet::for_dataset(config.dataset);
    let mut slots: Vec<Slot> = Split::ALL
        .iter()
        .flat_map(|&split| {
            (0..config.count(split)).map(move |index| Slot {
                split,
                index,
                rng: graph_rng(config.seed, split, index),
                candidate: None,
                attempts: 0,
            })
        })
        .collect();
    slots.par_iter_mut().for_each(|slot| slot.draw(&sampler, &rules, config.max_attempts));

    let mut seen = HashSet::with_capacity(slots.len());
    let mut splits: [Vec<Subgraph>; 3] = Default::default();
    for mut slot in slots {
        loop {
            match slot.candidate.take() {
                Some(g) if seen.insert(g.canonical_key()) => {
                    splits[slot.split.index()].push(g);
                    break;
                }
                Some(_) => slot.draw(&sampler, &rules, config.max_attempts),
                None => {
                    return Err(CoreError::Generation { split: slot.split, index: slot.index, attempts: slot.attempts })
                }
            }
        }
    }
    let [train, valid, test] = splits;
    log::info!("generated {}: {}/{}/{} graphs", config.dataset, train.len(), valid.len(), test.len());
    Ok(DatasetBundle { name: config.dataset, vocabulary: sampler.vocabulary.clone(), train, valid, test })
}

/// Shuffles a copy of the graph's triples; used to build permuted variants
/// in tests and tools without touching the generator streams.
pub fn shuffled<R: Rng + ?Sized>(g: &Subgraph, rng: &mut R) -> Subgraph {
    let mut t = g.triples().to_vec();
    t.shuffle(rng);
    Subgraph::new(t).expect("permutation keeps triples unique")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to generated data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationManifest {
    pub dataset: DatasetName,
    pub generator_version: String,
    pub rng: String,
    pub seed: u64,
    pub max_attempts: usize,
    pub counts: [usize; 3],
    pub entities: usize,
    pub relations: usize,
    pub files: Vec<ManifestFile>,
}

impl GenerationManifest {
    pub fn new(config: &GeneratorConfig, bundle: &DatasetBundle, files: Vec<ManifestFile>) -> Self {
        Self {
            dataset: config.dataset,
            generator_version: GENERATOR_VERSION.into(),
            rng: RNG_NAME.into(),
            seed: config.seed,
            max_attempts: config.max_attempts,
            counts: bundle.split_sizes(),
            entities: bundle.vocabulary.num_entities(),
            relations: bundle.vocabulary.num_relations(),
            files,
        }
    }
}
