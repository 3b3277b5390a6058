//! Triples, subgraphs and the structural primitives shared by every module:
//! canonical keys, weak connectivity and novelty checks.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelationId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A directed, labelled edge `(subject, relation, object)`.
///
/// The derived ordering (subject, relation, object) is the one used by
/// canonical keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: EntityId,
    pub relation: RelationId,
    pub object: EntityId,
}

impl Triple {
    pub const fn new(subject: EntityId, relation: RelationId, object: EntityId) -> Self {
        Self { subject, relation, object }
    }

    /// Checks that every id fits the vocabulary.
    pub fn check_bounds(&self, vocab: &Vocabulary) -> Result<()> {
        for e in [self.subject, self.object] {
            if e.index() >= vocab.num_entities() {
                return Err(CoreError::IdOutOfRange { kind: "entity", id: e.index(), len: vocab.num_entities() });
            }
        }
        if self.relation.index() >= vocab.num_relations() {
            return Err(CoreError::IdOutOfRange {
                kind: "relation",
                id: self.relation.index(),
                len: vocab.num_relations(),
            });
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> impl fmt::Display + 'a {
        DisplayTriple { triple: self, vocab }
    }
}

struct DisplayTriple<'a> {
    triple: &'a Triple,
    vocab: &'a Vocabulary,
}

impl fmt::Display for DisplayTriple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {} {})",
            self.vocab.entity_label(self.triple.subject),
            self.vocab.relation_label(self.triple.relation),
            self.vocab.entity_label(self.triple.object)
        )
    }
}

/// An ordered, duplicate-free list of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Triple>", into = "Vec<Triple>")]
pub struct Subgraph {
    triples: Vec<Triple>,
}

impl Subgraph {
    pub fn new(triples: Vec<Triple>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(triples.len());
        for t in &triples {
            if !seen.insert(*t) {
                return Err(CoreError::DuplicateTriple { line: None, triple: format!("{t:?}") });
            }
        }
        Ok(Self { triples })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Appends a triple; returns `false` (and leaves the graph unchanged) if
    /// it is already present.
    pub fn push(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Every subject and object slot, in triple order (the entity multiset).
    pub fn entity_slots(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.triples.iter().flat_map(|t| [t.subject, t.object])
    }

    /// Distinct entities, sorted by id.
    pub fn entities(&self) -> Vec<EntityId> {
        self.entity_slots().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_form(self)
    }
}

impl TryFrom<Vec<Triple>> for Subgraph {
    type Error = CoreError;

    fn try_from(triples: Vec<Triple>) -> Result<Self> {
        Subgraph::new(triples)
    }
}

impl From<Subgraph> for Vec<Triple> {
    fn from(g: Subgraph) -> Self {
        g.triples
    }
}

/// Order-insensitive identity of a subgraph: its triples sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(Vec<Triple>);

impl CanonicalKey {
    pub fn triples(&self) -> &[Triple] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn canonical_form(g: &Subgraph) -> CanonicalKey {
    let mut triples = g.triples.clone();
    triples.sort_unstable();
    triples.dedup();
    CanonicalKey(triples)
}

/// Weak connectivity of the underlying undirected graph. The empty subgraph
/// is not connected.
pub fn is_connected(g: &Subgraph) -> bool {
    let entities = g.entities();
    if entities.is_empty() {
        return false;
    }
    let index = |e: EntityId| entities.binary_search(&e).expect("entity from this graph");
    let mut uf = UnionFind::new(entities.len());
    for t in g.triples() {
        uf.union(index(t.subject), index(t.object));
    }
    uf.components() == 1
}

/// Set of canonical keys that novelty is measured against.
#[derive(Debug, Clone, Default)]
pub struct NoveltyReference {
    keys: HashSet<CanonicalKey>,
}

impl NoveltyReference {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graphs<'a>(graphs: impl IntoIterator<Item = &'a Subgraph>) -> Self {
        let mut r = Self::new();
        r.extend(graphs);
        r
    }

    pub fn extend<'a>(&mut self, graphs: impl IntoIterator<Item = &'a Subgraph>) {
        self.keys.extend(graphs.into_iter().map(canonical_form));
    }

    pub fn contains_key(&self, key: &CanonicalKey) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

pub fn is_novel(g: &Subgraph, reference: &NoveltyReference) -> bool {
    !reference.contains_key(&canonical_form(g))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n], count: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.count -= 1;
    }

    pub(crate) fn components(&self) -> usize {
        self.count
    }
}
