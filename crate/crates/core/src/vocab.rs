//! Bidirectional label ↔ id maps for entities and relations.
//!
//! Ids are dense and assigned in first-seen order, so building a vocabulary
//! from the same file always yields the same ids. Entity labels starting with
//! `_` mark existential nodes (role placeholders such as `_movie`).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::{EntityId, RelationId};

/// Prefix that marks an existential node label.
pub const EXISTENTIAL_PREFIX: char = '_';

pub fn is_existential(label: &str) -> bool {
    label.starts_with(EXISTENTIAL_PREFIX)
}

/// Trims a raw label and replaces interior whitespace with underscores.
pub fn normalize_label(raw: &str) -> String {
    raw.trim()
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    entities: Vec<String>,
    relations: Vec<String>,
    entity_ids: HashMap<String, EntityId>,
    relation_ids: HashMap<String, RelationId>,
    sealed: bool,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    entities: Vec<String>,
    relations: Vec<String>,
    sealed: bool,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(repr: VocabularyRepr) -> Self {
        let mut vocab = Vocabulary {
            entities: repr.entities,
            relations: repr.relations,
            sealed: repr.sealed,
            ..Default::default()
        };
        vocab.rebuild_index();
        vocab
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr { entities: v.entities, relations: v.relations, sealed: v.sealed }
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from explicit label lists. Labels must be unique.
    pub fn from_labels<E, R>(entities: E, relations: R) -> Result<Self>
    where
        E: IntoIterator,
        E::Item: AsRef<str>,
        R: IntoIterator,
        R::Item: AsRef<str>,
    {
        let mut vocab = Self::new();
        for label in entities {
            let label = label.as_ref();
            if vocab.entity_id(label).is_some() {
                return Err(CoreError::DuplicateLabel { kind: "entity", label: label.to_owned() });
            }
            vocab.intern_entity(label)?;
        }
        for label in relations {
            let label = label.as_ref();
            if vocab.relation_id(label).is_some() {
                return Err(CoreError::DuplicateLabel { kind: "relation", label: label.to_owned() });
            }
            vocab.intern_relation(label)?;
        }
        Ok(vocab)
    }

    /// A sealed vocabulary rejects unknown labels instead of extending itself.
    pub fn seal(&mut self) {
        self.sealed = true;
    }

    pub fn sealed(mut self) -> Self {
        self.seal();
        self
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn intern_entity(&mut self, label: &str) -> Result<EntityId> {
        if let Some(id) = self.entity_id(label) {
            return Ok(id);
        }
        if self.sealed {
            return Err(CoreError::UnknownLabel { kind: "entity", label: label.to_owned() });
        }
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(label.to_owned());
        self.entity_ids.insert(label.to_owned(), id);
        Ok(id)
    }

    pub fn intern_relation(&mut self, label: &str) -> Result<RelationId> {
        if let Some(id) = self.relation_id(label) {
            return Ok(id);
        }
        if self.sealed {
            return Err(CoreError::UnknownLabel { kind: "relation", label: label.to_owned() });
        }
        let id = RelationId(self.relations.len() as u32);
        self.relations.push(label.to_owned());
        self.relation_ids.insert(label.to_owned(), id);
        Ok(id)
    }

    pub fn entity_id(&self, label: &str) -> Option<EntityId> {
        self.entity_ids.get(label).copied()
    }

    pub fn relation_id(&self, label: &str) -> Option<RelationId> {
        self.relation_ids.get(label).copied()
    }

    /// Panics if `id` is out of range; ids only come from this vocabulary.
    pub fn entity_label(&self, id: EntityId) -> &str {
        &self.entities[id.index()]
    }

    pub fn relation_label(&self, id: RelationId) -> &str {
        &self.relations[id.index()]
    }

    pub fn entity_labels(&self) -> &[String] {
        &self.entities
    }

    pub fn relation_labels(&self) -> &[String] {
        &self.relations
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn is_existential(&self, id: EntityId) -> bool {
        is_existential(self.entity_label(id))
    }

    /// Existential entities in id order.
    pub fn existential_entities(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.entities
            .iter()
            .enumerate()
            .filter(|(_, l)| is_existential(l))
            .map(|(i, _)| EntityId(i as u32))
    }

    fn rebuild_index(&mut self) {
        self.entity_ids = self
            .entities
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), EntityId(i as u32)))
            .collect();
        self.relation_ids = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), RelationId(i as u32)))
            .collect();
    }
}
