//! Maximum-likelihood training of structure models.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sgbench_core::{DatasetBundle, DatasetName, Subgraph};

use crate::error::{ModelError, Result};
use crate::optim::Adam;
use crate::structure::{InitScheme, ModelKind, ModelSpec, Norm, Params, StructureModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub dim: usize,
    pub lr: f64,
    pub biases: bool,
    pub init: InitScheme,
    pub norm: Norm,
    pub epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Validate on at most this many validation graphs.
    pub valid_limit: Option<usize>,
}

impl TrainConfig {
    /// Published hyperparameters for a dataset/model pair, 50 epochs and
    /// patience 5.
    pub fn defaults(dataset: DatasetName, kind: ModelKind) -> Self {
        use DatasetName::*;
        use InitScheme::{Normal, Uniform};
        use ModelKind::*;
        let (batch_size, dim, lr, biases, init) = match (dataset, kind) {
            (SynPaths, Transe) => (4096, 1531, 7.029817939842623e-05, false, Uniform),
            (SynPaths, Distmult) => (4096, 158, 0.0697979730927795, false, Uniform),
            (SynPaths, Complex) => (4096, 587, 5.264944612887405e-05, false, Uniform),
            (SynTipr, Transe) => (2048, 147, 0.0008716274682049251, true, Normal),
            (SynTipr, Distmult) => (2048, 168, 0.005497983171450242, true, Normal),
            (SynTipr, Complex) => (2048, 350, 0.0015597556675205502, true, Normal),
            (SynTypes, Transe) => (2048, 376, 0.003017403610019781, true, Uniform),
            (SynTypes, Distmult) => (2048, 273, 0.0006013105272716594, true, Uniform),
            (SynTypes, Complex) => (2048, 996, 5.603405855158606e-05, false, Uniform),
            (WdMovies, Transe) => (4096, 68, 0.000638003263107625, false, Normal),
            (WdMovies, Distmult) => (4096, 181, 0.00307853821840767, true, Uniform),
            (WdMovies, Complex) => (4096, 102, 0.019520125878695407, false, Uniform),
            (WdArticles, Transe) => (32, 888, 6.094053758340765e-05, true, Normal),
            (WdArticles, Distmult) => (32, 65, 0.03833121378755901, false, Uniform),
            (WdArticles, Complex) => (32, 283, 0.002251396972378282, false, Normal),
            (_, Random) => (1, 0, 0.0, false, Uniform),
        };
        Self {
            batch_size,
            dim,
            lr,
            biases,
            init,
            norm: Norm::L2,
            epochs: 50,
            patience: 5,
            seed: 42,
            valid_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(ModelError::Config("batch size must be positive".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(ModelError::Config(format!("learning rate {} must be positive", self.lr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean training loss over the epoch's batches; `None` before training.
    pub train_bits: Option<f64>,
    pub valid_bits: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: StructureModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub steps: u64,
}

/// Mean structure codelength over `graphs`, each scored against its own entities.
pub fn mean_structure_bits(model: &StructureModel, graphs: &[Subgraph]) -> Result<f64> {
    if graphs.is_empty() {
        return Ok(0.0);
    }
    let total = graphs
        .par_iter()
        .map(|g| model.structure_codelength(g, &g.entities()))
        .try_reduce(|| 0.0, |a, b| Ok(a + b))?;
    Ok(total / graphs.len() as f64)
}

fn batch_gradient(model: &StructureModel, batch: &[&Subgraph]) -> Result<(f64, Params)> {
    let zeros = || (0.0, Params::zeros(model.spec()));
    let (loss, mut grad) = batch
        .par_iter()
        .with_min_len(32)
        .try_fold(zeros, |(loss, mut grad), g| {
            let bits = model.loss_and_grad(g, &g.entities(), &mut grad)?;
            Ok::<_, ModelError>((loss + bits, grad))
        })
        .try_reduce(zeros, |(la, mut ga), (lb, gb)| {
            ga.add_assign(&gb);
            Ok((la + lb, ga))
        })?;
    let n = batch.len() as f64;
    grad.scale(1.0 / n);
    Ok((loss / n, grad))
}

/// Trains a structure model with Adam on mean per-graph bits and returns the
/// parameters with the best validation codelength.
pub fn train(bundle: &DatasetBundle, kind: ModelKind, config: &TrainConfig) -> Result<TrainOutcome> {
    let (n_e, n_r) = (bundle.vocabulary.num_entities(), bundle.vocabulary.num_relations());
    if kind == ModelKind::Random {
        return Ok(TrainOutcome { model: StructureModel::random(n_e, n_r), history: Vec::new(), best_epoch: 0, steps: 0 });
    }
    config.validate()?;
    if bundle.train.is_empty() {
        return Err(ModelError::Config("training split is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spec = ModelSpec { biases: config.biases, init: config.init, norm: config.norm, ..ModelSpec::new(kind, config.dim, n_e, n_r) };
    let mut model = StructureModel::new(spec, &mut rng)?;
    let valid = match config.valid_limit {
        Some(n) => &bundle.valid[..n.min(bundle.valid.len())],
        None => &bundle.valid[..],
    };
    let mut best_valid = mean_structure_bits(&model, valid)?;
    let mut history = vec![EpochRecord { epoch: 0, train_bits: None, valid_bits: best_valid }];
    let mut best = (model.clone(), 0usize);
    let mut adam = Adam::new(model.params(), config.lr);
    let mut order: Vec<usize> = (0..bundle.train.len()).collect();
    let mut stale = 0;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0;
        for (step, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<&Subgraph> = chunk.iter().map(|&i| &bundle.train[i]).collect();
            let (loss, grad) = batch_gradient(&model, &batch)?;
            if !loss.is_finite() || !grad.all_finite() {
                return Err(ModelError::Diverged { epoch, step, loss });
            }
            let mut params = model.params().clone();
            adam.step(&mut params, &grad);
            if !params.all_finite() {
                return Err(ModelError::Diverged { epoch, step, loss });
            }
            *model.params_mut() = params;
            epoch_loss += loss;
            batches += 1;
        }
        let valid_bits = mean_structure_bits(&model, valid)?;
        if !valid_bits.is_finite() {
            return Err(ModelError::Diverged { epoch, step: batches, loss: valid_bits });
        }
        let train_bits = epoch_loss / batches as f64;
        log::info!("{kind} epoch {epoch}: train {train_bits:.3} bits, valid {valid_bits:.3} bits");
        history.push(EpochRecord { epoch, train_bits: Some(train_bits), valid_bits });
        if valid_bits < best_valid {
            best_valid = valid_bits;
            best = (model.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                log::info!("early stop after epoch {epoch}; best epoch {}", best.1);
                break;
            }
        }
    }
    Ok(TrainOutcome { model: best.0, history, best_epoch: best.1, steps: adam.steps() })
}
