//! Generative baselines for subgraph inference: an entity model for
//! `p(E)`, embedding-based structure models for `p(S|E)`, their training,
//! checkpoints, and the compression and sampling evaluations.

pub mod checkpoint;
pub mod entity;
pub mod error;
pub mod eval;
pub mod optim;
pub mod structure;
pub mod train;

pub use entity::{EntityMode, EntityModel, SizeDistribution};
pub use error::{ModelError, Result};
pub use eval::{compression_report, evaluate_sampling, CompressionReport, SampleMetrics, SamplingSetting};
pub use structure::{InitScheme, ModelKind, ModelSpec, Norm, Params, StructureModel};
pub use train::{train, TrainConfig, TrainOutcome};
