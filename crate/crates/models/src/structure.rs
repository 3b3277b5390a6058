//! Structure models for the `-log2 p(S|E)` term.
//!
//! Given an entity list `E`, every triple `(s, r, o)` with `s, o` in `E`
//! (self-loops included) and `r` in the relation vocabulary is a candidate.
//! A candidate is present with probability `sigmoid(score)`, independently of
//! the others, so the codelength of a graph is the Bernoulli cross-entropy
//! over the whole candidate space.
//!
//! Scores are computed per `(s, r)` block: DistMult and ComplEx reduce to a
//! dot product between a query vector and each object embedding, TransE to a
//! distance from the translated subject.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};
use sgbench_core::{EntityId, RelationId, Subgraph, Triple};

use crate::error::{ModelError, Result};

/// Largest candidate space a single graph may induce.
pub const MAX_CANDIDATES: usize = 10_000_000;

/// Bits charged per candidate triple by the random baseline.
pub const RANDOM_BITS_PER_CANDIDATE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Random,
    Transe,
    Distmult,
    Complex,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [Self::Random, Self::Transe, Self::Distmult, Self::Complex];
    pub const TRAINABLE: [ModelKind; 3] = [Self::Transe, Self::Distmult, Self::Complex];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Transe => "transe",
            Self::Distmult => "distmult",
            Self::Complex => "complex",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown model `{s}` (expected random, transe, distmult or complex)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitScheme {
    #[default]
    Uniform,
    Normal,
}

impl FromStr for InitScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "normal" => Ok(Self::Normal),
            _ => Err(format!("unknown init `{s}` (expected uniform or normal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
}

/// Shape and options of a structure model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dim: usize,
    pub biases: bool,
    pub init: InitScheme,
    pub norm: Norm,
    pub num_entities: usize,
    pub num_relations: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, dim: usize, num_entities: usize, num_relations: usize) -> Self {
        Self { kind, dim, biases: false, init: InitScheme::Uniform, norm: Norm::L2, num_entities, num_relations }
    }

    /// Reals per embedding row; ComplEx stores real parts then imaginary parts.
    pub fn width(&self) -> usize {
        match self.kind {
            ModelKind::Complex => 2 * self.dim,
            ModelKind::Random => 0,
            _ => self.dim,
        }
    }
}

/// Parameter tensors, also used as gradient buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub entity: Vec<f64>,
    pub relation: Vec<f64>,
    pub entity_bias: Vec<f64>,
    pub relation_bias: Vec<f64>,
}

impl Params {
    pub fn zeros(spec: &ModelSpec) -> Self {
        let w = spec.width();
        let (eb, rb) = if spec.biases { (spec.num_entities, spec.num_relations) } else { (0, 0) };
        Self {
            entity: vec![0.0; spec.num_entities * w],
            relation: vec![0.0; spec.num_relations * w],
            entity_bias: vec![0.0; eb],
            relation_bias: vec![0.0; rb],
        }
    }

    pub fn tensors(&self) -> [&[f64]; 4] {
        [&self.entity, &self.relation, &self.entity_bias, &self.relation_bias]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.entity, &mut self.relation, &mut self.entity_bias, &mut self.relation_bias]
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fill(&mut self, value: f64) {
        for t in self.tensors_mut() {
            t.fill(value);
        }
    }

    pub fn add_assign(&mut self, other: &Params) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            for x in t.iter_mut() {
                *x *= factor;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureModel {
    spec: ModelSpec,
    params: Params,
}

impl StructureModel {
    /// A freshly initialised model. Embeddings are drawn from
    /// `uniform(-1/sqrt(d), 1/sqrt(d))` or `normal(0, 1/sqrt(d))`; biases start at zero.
    pub fn new<R: Rng + ?Sized>(spec: ModelSpec, rng: &mut R) -> Result<Self> {
        if spec.kind != ModelKind::Random && spec.dim == 0 {
            return Err(ModelError::Config("embedding dimension must be positive".into()));
        }
        let mut params = Params::zeros(&spec);
        let scale = 1.0 / (spec.dim.max(1) as f64).sqrt();
        for t in [&mut params.entity, &mut params.relation] {
            match spec.init {
                InitScheme::Uniform => {
                    let d = Uniform::new_inclusive(-scale, scale).expect("valid range");
                    t.iter_mut().for_each(|x| *x = d.sample(rng));
                }
                InitScheme::Normal => {
                    let d = Normal::new(0.0, scale).expect("valid std");
                    t.iter_mut().for_each(|x| *x = d.sample(rng));
                }
            }
        }
        Ok(Self { spec, params })
    }

    /// The parameter-free random baseline.
    pub fn random(num_entities: usize, num_relations: usize) -> Self {
        let spec = ModelSpec::new(ModelKind::Random, 0, num_entities, num_relations);
        let params = Params::zeros(&spec);
        Self { spec, params }
    }

    pub fn from_parts(spec: ModelSpec, params: Params) -> Result<Self> {
        let expected = Params::zeros(&spec);
        let shapes_match = expected.tensors().iter().zip(params.tensors()).all(|(a, b)| a.len() == b.len());
        if !shapes_match {
            return Err(ModelError::Config("parameter shapes do not match the model spec".into()));
        }
        Ok(Self { spec, params })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    fn entity(&self, e: EntityId) -> &[f64] {
        let w = self.spec.width();
        &self.params.entity[e.index() * w..(e.index() + 1) * w]
    }

    fn relation(&self, r: RelationId) -> &[f64] {
        let w = self.spec.width();
        &self.params.relation[r.index() * w..(r.index() + 1) * w]
    }

    fn bias(&self, s: EntityId, r: RelationId, o: EntityId) -> f64 {
        if self.spec.biases {
            let eb = &self.params.entity_bias;
            eb[s.index()] + eb[o.index()] + self.params.relation_bias[r.index()]
        } else {
            0.0
        }
    }

    /// Fills `q` with the per-`(s, r)` query vector: `e_s * r` for DistMult,
    /// the complex product for ComplEx and `e_s + r` for TransE.
    fn query(&self, s: EntityId, r: RelationId, q: &mut [f64]) {
        let (es, er) = (self.entity(s), self.relation(r));
        match self.spec.kind {
            ModelKind::Distmult => q.iter_mut().zip(es.iter().zip(er)).for_each(|(qi, (a, b))| *qi = a * b),
            ModelKind::Transe => q.iter_mut().zip(es.iter().zip(er)).for_each(|(qi, (a, b))| *qi = a + b),
            ModelKind::Complex => {
                let d = self.spec.dim;
                let (sr, si) = es.split_at(d);
                let (rr, ri) = er.split_at(d);
                let (qr, qi) = q.split_at_mut(d);
                for k in 0..d {
                    qr[k] = sr[k] * rr[k] - si[k] * ri[k];
                    qi[k] = sr[k] * ri[k] + si[k] * rr[k];
                }
            }
            ModelKind::Random => {}
        }
    }

    fn raw_score(&self, q: &[f64], o: EntityId) -> f64 {
        let eo = self.entity(o);
        match self.spec.kind {
            ModelKind::Transe => {
                let diff = q.iter().zip(eo).map(|(a, b)| a - b);
                match self.spec.norm {
                    Norm::L2 => -diff.map(|x| x * x).sum::<f64>().sqrt(),
                    Norm::L1 => -diff.map(f64::abs).sum::<f64>(),
                }
            }
            ModelKind::Distmult | ModelKind::Complex => dot(q, eo),
            ModelKind::Random => 0.0,
        }
    }

    pub fn score(&self, t: &Triple) -> f64 {
        let mut q = vec![0.0; self.spec.width()];
        self.query(t.subject, t.relation, &mut q);
        self.raw_score(&q, t.object) + self.bias(t.subject, t.relation, t.object)
    }

    /// Probability that a candidate triple is present.
    pub fn prob(&self, t: &Triple) -> f64 {
        match self.spec.kind {
            ModelKind::Random => 0.5,
            _ => sigmoid(self.score(t)),
        }
    }

    /// Size of the candidate space over `entities`, guarded against overflow.
    pub fn candidate_count(&self, entities: &[EntityId]) -> Result<usize> {
        let n = entities.len();
        let count = n.checked_mul(n).and_then(|x| x.checked_mul(self.spec.num_relations));
        match count {
            Some(c) if c <= MAX_CANDIDATES => Ok(c),
            _ => Err(ModelError::CandidateOverflow { candidates: count.unwrap_or(usize::MAX), limit: MAX_CANDIDATES }),
        }
    }

    /// All candidate triples over `entities` with their probabilities, in
    /// subject, relation, object order.
    pub fn candidate_probabilities(&self, entities: &[EntityId]) -> Result<Vec<(Triple, f64)>> {
        let mut out = Vec::with_capacity(self.candidate_count(entities)?);
        let mut q = vec![0.0; self.spec.width()];
        for &s in entities {
            for r in (0..self.spec.num_relations as u32).map(RelationId) {
                self.query(s, r, &mut q);
                for &o in entities {
                    let t = Triple::new(s, r, o);
                    let p = match self.spec.kind {
                        ModelKind::Random => 0.5,
                        _ => sigmoid(self.raw_score(&q, o) + self.bias(s, r, o)),
                    };
                    out.push((t, p));
                }
            }
        }
        Ok(out)
    }

    /// `log2 p(S|E)`: the graph's triples are the positives, every other
    /// candidate over `entities` a negative.
    pub fn structure_loglik(&self, g: &Subgraph, entities: &[EntityId]) -> Result<f64> {
        Ok(-self.structure_codelength(g, entities)?)
    }

    /// `-log2 p(S|E)` in bits.
    pub fn structure_codelength(&self, g: &Subgraph, entities: &[EntityId]) -> Result<f64> {
        self.evaluate(g, entities, None)
    }

    /// Codelength in bits; when `grad` is given, its gradient with respect to
    /// every parameter is added to it.
    pub fn loss_and_grad(&self, g: &Subgraph, entities: &[EntityId], grad: &mut Params) -> Result<f64> {
        self.evaluate(g, entities, Some(grad))
    }

    fn evaluate(&self, g: &Subgraph, entities: &[EntityId], mut grad: Option<&mut Params>) -> Result<f64> {
        let candidates = self.candidate_count(entities)?;
        let mut positives: Vec<Triple> = g.triples().to_vec();
        positives.sort_unstable();
        let covered = positives.iter().all(|t| entities.contains(&t.subject) && entities.contains(&t.object));
        if !covered {
            return Err(ModelError::EntitiesNotCovered);
        }
        if self.spec.kind == ModelKind::Random {
            return Ok(RANDOM_BITS_PER_CANDIDATE * candidates as f64);
        }
        let w = self.spec.width();
        let mut q = vec![0.0; w];
        let mut scores = vec![0.0; entities.len()];
        let mut dscores = vec![0.0; entities.len()];
        let mut bits = 0.0;
        for &s in entities {
            for r in (0..self.spec.num_relations as u32).map(RelationId) {
                self.query(s, r, &mut q);
                for (k, &o) in entities.iter().enumerate() {
                    scores[k] = self.raw_score(&q, o) + self.bias(s, r, o);
                }
                for (k, &o) in entities.iter().enumerate() {
                    let y = positives.binary_search(&Triple::new(s, r, o)).is_ok();
                    let x = scores[k];
                    bits += softplus(if y { -x } else { x }) / LN_2;
                    dscores[k] = (sigmoid(x) - f64::from(u8::from(y))) / LN_2;
                }
                if let Some(grad) = grad.as_deref_mut() {
                    self.backward_block(s, r, entities, &q, &dscores, grad);
                }
            }
        }
        Ok(bits)
    }

    /// Adds the gradient of one `(s, r)` block given the score derivatives.
    fn backward_block(&self, s: EntityId, r: RelationId, objects: &[EntityId], q: &[f64], g: &[f64], grad: &mut Params) {
        let w = self.spec.width();
        let d = self.spec.dim;
        let (si, ri) = (s.index(), r.index());
        if self.spec.biases {
            let total: f64 = g.iter().sum();
            grad.entity_bias[si] += total;
            grad.relation_bias[ri] += total;
            for (&o, &go) in objects.iter().zip(g) {
                grad.entity_bias[o.index()] += go;
            }
        }
        // Derivative of the block loss with respect to the query vector.
        let mut gq = vec![0.0; w];
        match self.spec.kind {
            ModelKind::Distmult | ModelKind::Complex => {
                for (&o, &go) in objects.iter().zip(g) {
                    axpy(go, self.entity(o), &mut gq);
                    axpy(go, q, &mut grad.entity[o.index() * w..(o.index() + 1) * w]);
                }
            }
            ModelKind::Transe => {
                let mut v = vec![0.0; w];
                for (&o, &go) in objects.iter().zip(g) {
                    let eo = self.entity(o);
                    v.iter_mut().zip(q.iter().zip(eo)).for_each(|(vi, (a, b))| *vi = a - b);
                    // d(-|v|)/dv
                    let scale = match self.spec.norm {
                        Norm::L2 => {
                            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                            if n > 0.0 {
                                -go / n
                            } else {
                                0.0
                            }
                        }
                        Norm::L1 => -go,
                    };
                    if self.spec.norm == Norm::L1 {
                        v.iter_mut().for_each(|x| *x = x.signum() * f64::from(u8::from(*x != 0.0)));
                    }
                    axpy(scale, &v, &mut gq);
                    axpy(-scale, &v, &mut grad.entity[o.index() * w..(o.index() + 1) * w]);
                }
            }
            ModelKind::Random => return,
        }
        let (es, er) = (self.entity(s), self.relation(r));
        let (gs, gr): (Vec<f64>, Vec<f64>) = match self.spec.kind {
            ModelKind::Transe => (gq.clone(), gq),
            ModelKind::Distmult => {
                (gq.iter().zip(er).map(|(a, b)| a * b).collect(), gq.iter().zip(es).map(|(a, b)| a * b).collect())
            }
            ModelKind::Complex => {
                let (sr, sim) = es.split_at(d);
                let (rr, rim) = er.split_at(d);
                let (gre, gim) = gq.split_at(d);
                let mut gs = vec![0.0; w];
                let mut gr = vec![0.0; w];
                for k in 0..d {
                    gs[k] = gre[k] * rr[k] + gim[k] * rim[k];
                    gs[d + k] = -gre[k] * rim[k] + gim[k] * rr[k];
                    gr[k] = gre[k] * sr[k] + gim[k] * sim[k];
                    gr[d + k] = -gre[k] * sim[k] + gim[k] * sr[k];
                }
                (gs, gr)
            }
            ModelKind::Random => unreachable!(),
        };
        axpy(1.0, &gs, &mut grad.entity[si * w..(si + 1) * w]);
        axpy(1.0, &gr, &mut grad.relation[ri * w..(ri + 1) * w]);
    }
}
