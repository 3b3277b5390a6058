//! Compression reports and sampling metrics.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sgbench_core::{verify, DatasetBundle, DatasetName, EntityId, NoveltyReference, RuleSet, Split, Subgraph};

use crate::entity::{mandatory_entities, sample_entities, EntityModel, SizeDistribution};
use crate::error::Result;
use crate::structure::{ModelKind, StructureModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphCodelength {
    pub structure_bits: f64,
    pub entity_bits: f64,
    pub total_bits: f64,
}

/// Split averages of the two code parts and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub dataset: DatasetName,
    pub split: Split,
    pub model: ModelKind,
    pub n_graphs: usize,
    pub structure_bits: f64,
    pub entity_bits: f64,
    pub total_bits: f64,
    pub per_graph: Vec<GraphCodelength>,
}

impl CompressionReport {
    pub const HEADER: &'static str = "dataset      model     -log2 p(S|E)  -log2 p(E)      C(S,E)";

    pub fn row(&self) -> String {
        format!(
            "{:<12} {:<9} {:>12.2} {:>11.2} {:>11.2}",
            self.dataset.as_str(),
            self.model.as_str(),
            self.structure_bits,
            self.entity_bits,
            self.total_bits
        )
    }
}

/// Per-graph codelengths of a split: each graph's structure is coded given
/// its own entity set.
pub fn compression_report(
    bundle: &DatasetBundle,
    split: Split,
    entity_model: &EntityModel,
    structure_model: &StructureModel,
) -> Result<CompressionReport> {
    let graphs = bundle.split(split);
    let per_graph: Vec<GraphCodelength> = graphs
        .par_iter()
        .map(|g| {
            let structure_bits = structure_model.structure_codelength(g, &g.entities())?;
            let entity_bits = entity_model.codelength(g);
            Ok(GraphCodelength { structure_bits, entity_bits, total_bits: structure_bits + entity_bits })
        })
        .collect::<Result<_>>()?;
    let n = per_graph.len().max(1) as f64;
    let mean = |f: fn(&GraphCodelength) -> f64| per_graph.iter().map(f).sum::<f64>() / n;
    Ok(CompressionReport {
        dataset: bundle.name,
        split,
        model: structure_model.kind(),
        n_graphs: per_graph.len(),
        structure_bits: mean(|g| g.structure_bits),
        entity_bits: mean(|g| g.entity_bits),
        total_bits: mean(|g| g.total_bits),
        per_graph,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingSetting {
    /// Sample the entity list, then the structure.
    #[serde(rename = "e-and-s")]
    EntitiesAndStructure,
    /// Take the entity list of a test graph and sample only the structure.
    #[serde(rename = "s-only")]
    StructureOnly,
}

impl SamplingSetting {
    pub const ALL: [SamplingSetting; 2] = [Self::EntitiesAndStructure, Self::StructureOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::EntitiesAndStructure => "e-and-s",
            Self::StructureOnly => "s-only",
        }
    }
}

impl fmt::Display for SamplingSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "e-and-s" | "both" => Ok(Self::EntitiesAndStructure),
            "s-only" | "structure" => Ok(Self::StructureOnly),
            _ => Err(format!("unknown setting `{s}` (expected e-and-s or s-only)")),
        }
    }
}

/// Draws each candidate triple over `entities` independently with its model
/// probability.
pub fn sample_structure<R: Rng + ?Sized>(model: &StructureModel, entities: &[EntityId], rng: &mut R) -> Result<Subgraph> {
    let mut g = Subgraph::empty();
    for (t, p) in model.candidate_probabilities(entities)? {
        if rng.random_bool(p.clamp(0.0, 1.0)) {
            g.push(t);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleCounts {
    pub n_samples: usize,
    pub valid: usize,
    pub novel: usize,
    pub novel_and_valid: usize,
    pub empty: usize,
}

impl SampleCounts {
    /// Empty samples count as neither valid nor novel.
    pub fn record(&mut self, empty: bool, valid: bool, novel: bool) {
        self.n_samples += 1;
        if empty {
            self.empty += 1;
            return;
        }
        self.valid += valid as usize;
        self.novel += novel as usize;
        self.novel_and_valid += (valid && novel) as usize;
    }

    pub fn merge(mut self, other: SampleCounts) -> SampleCounts {
        self.n_samples += other.n_samples;
        self.valid += other.valid;
        self.novel += other.novel;
        self.novel_and_valid += other.novel_and_valid;
        self.empty += other.empty;
        self
    }
}

/// Percentages over all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub n_samples: usize,
    pub valid: f64,
    pub novel_and_valid: f64,
    pub novel: f64,
    pub empty: f64,
    pub counts: SampleCounts,
}

impl SampleMetrics {
    pub const HEADER: &'static str = "setting  dataset      model      %valid  %novel&valid  %novel  %empty";

    pub fn from_counts(counts: SampleCounts) -> Self {
        let pct = |x: usize| if counts.n_samples == 0 { 0.0 } else { 100.0 * x as f64 / counts.n_samples as f64 };
        Self {
            n_samples: counts.n_samples,
            valid: pct(counts.valid),
            novel_and_valid: pct(counts.novel_and_valid),
            novel: pct(counts.novel),
            empty: pct(counts.empty),
            counts,
        }
    }

    pub fn row(&self, setting: SamplingSetting, dataset: DatasetName, model: ModelKind) -> String {
        format!(
            "{:<8} {:<12} {:<9} {:>7.2} {:>13.2} {:>7.2} {:>7.2}",
            setting.as_str(),
            dataset.as_str(),
            model.as_str(),
            self.valid,
            self.novel_and_valid,
            self.novel,
            self.empty
        )
    }
}

#[derive(Debug, Clone)]
pub struct SamplingRun {
    pub metrics: SampleMetrics,
    pub samples: Vec<Subgraph>,
}

/// Random stream of sample `index`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws `n_samples` graphs and classifies each as empty, valid (passes the
/// dataset's rules) and novel (absent from train and valid).
pub fn evaluate_sampling(
    bundle: &DatasetBundle,
    entity_model: &EntityModel,
    structure_model: &StructureModel,
    setting: SamplingSetting,
    n_samples: usize,
    seed: u64,
) -> Result<SamplingRun> {
    let rules = RuleSet::for_dataset(bundle.name);
    let reference = bundle.novelty_reference();
    let sizes = SizeDistribution::fit(&bundle.train);
    let mandatory = mandatory_entities(&bundle.train, &bundle.vocabulary);
    if setting == SamplingSetting::StructureOnly && bundle.test.is_empty() && n_samples > 0 {
        return Err(crate::error::ModelError::Config("structure-only sampling needs test graphs".into()));
    }
    let samples: Vec<Subgraph> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let entities = match setting {
                SamplingSetting::EntitiesAndStructure => sample_entities(entity_model, &sizes, &mandatory, &mut rng),
                SamplingSetting::StructureOnly => bundle.test[i % bundle.test.len()].entities(),
            };
            sample_structure(structure_model, &entities, &mut rng)
        })
        .collect::<Result<_>>()?;
    let counts = classify(&samples, bundle, &rules, &reference);
    Ok(SamplingRun { metrics: SampleMetrics::from_counts(counts), samples })
}

/// Counts empty, valid and novel graphs among `samples`.
pub fn classify(samples: &[Subgraph], bundle: &DatasetBundle, rules: &RuleSet, reference: &NoveltyReference) -> SampleCounts {
    samples
        .par_iter()
        .map(|g| {
            let mut c = SampleCounts::default();
            let empty = g.is_empty();
            let valid = !empty && verify(g, &bundle.vocabulary, rules).valid;
            let novel = !empty && !reference.contains_key(&g.canonical_key());
            c.record(empty, valid, novel);
            c
        })
        .reduce(SampleCounts::default, SampleCounts::merge)
}
