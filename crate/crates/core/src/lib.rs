//! Core data model for subgraph-inference benchmarks: vocabularies, subgraphs,
//! the text format, logical rule verification, synthetic generators and the
//! real-world dataset pipeline.

pub mod dataset;
pub mod error;
pub mod graph;
pub mod io;
pub mod lexicon;
pub mod rules;
pub mod synth;
pub mod vocab;
pub mod wd;

pub use dataset::{DatasetBundle, DatasetName, DatasetStats, Split};
pub use error::{CoreError, Result};
pub use graph::{canonical_form, is_connected, is_novel, CanonicalKey, EntityId, NoveltyReference, RelationId, Subgraph, Triple};
pub use rules::{verify, RuleSet, ValidityReport, Violation};
pub use vocab::Vocabulary;
