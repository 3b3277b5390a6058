//! Minimum-frequency pruning iterated to a fixed point.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{InstanceRecord, LabelTriple};
use crate::error::{CoreError, Result};
use crate::lexicon::{CITES, HAS_ACTOR, HAS_AUTHOR, HAS_DIRECTOR, HAS_NAME, HAS_SUBJECT, SUBCLASS_OF};

/// What happens to an entity found in fewer than `min_freq` instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrunePolicy {
    /// Triples touching it are deleted.
    Remove { required_relations: Vec<String> },
    /// It is renamed to a role-indexed existential label. The role prefix is
    /// taken from the first `(relation, prefix)` pair whose relation has the
    /// node as object, falling back to any triple that touches it. Triples in
    /// `drop_relations` that touch it, and triples touching role-less nodes,
    /// are deleted instead.
    Existentialize {
        roles: Vec<(String, String)>,
        drop_relations: Vec<String>,
        required_relations: Vec<String>,
    },
}

impl PrunePolicy {
    /// Infrequent persons and genres are removed; a movie needs a director
    /// and an actor to survive.
    pub fn movies() -> Self {
        Self::Remove { required_relations: vec![HAS_DIRECTOR.into(), HAS_ACTOR.into()] }
    }

    /// Infrequent authors and subjects become `_authorNNN`/`_subjectNNN`;
    /// citations of infrequent articles are dropped.
    pub fn articles() -> Self {
        let role = |r: &str, p: &str| (r.to_owned(), p.to_owned());
        Self::Existentialize {
            roles: vec![role(HAS_NAME, "_author"), role(HAS_SUBJECT, "_subject"), role(SUBCLASS_OF, "_subject")],
            drop_relations: vec![CITES.into()],
            required_relations: vec![HAS_AUTHOR.into()],
        }
    }

    pub fn required_relations(&self) -> &[String] {
        match self {
            Self::Remove { required_relations } | Self::Existentialize { required_relations, .. } => required_relations,
        }
    }
}

fn frequencies(instances: &[InstanceRecord]) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for inst in instances {
        for e in inst.entities() {
            *counts.entry(e.to_owned()).or_insert(0) += 1;
        }
    }
    counts
}

fn next_index(inst: &InstanceRecord, prefix: &str) -> usize {
    inst.nodes()
        .into_iter()
        .filter_map(|n| n.strip_prefix(prefix))
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .filter_map(|d| d.parse::<usize>().ok())
        .map(|i| i + 1)
        .max()
        .unwrap_or(0)
}

fn existentialize(
    inst: &InstanceRecord,
    infrequent: &HashSet<&str>,
    roles: &[(String, String)],
    drop_relations: &[String],
) -> Vec<LabelTriple> {
    let role_of = |node: &str| -> Option<&str> {
        let as_object = inst
            .triples
            .iter()
            .filter(|t| t.object == node)
            .find_map(|t| roles.iter().find(|(r, _)| *r == t.relation));
        let any = || {
            inst.triples
                .iter()
                .filter(|t| t.subject == node || t.object == node)
                .find_map(|t| roles.iter().find(|(r, _)| *r == t.relation))
        };
        as_object.or_else(any).map(|(_, p)| p.as_str())
    };
    let mut renamed: BTreeMap<&str, Option<String>> = BTreeMap::new();
    let mut next: HashMap<&str, usize> = HashMap::new();
    for node in inst.triples.iter().flat_map(|t| [t.subject.as_str(), t.object.as_str()]) {
        if !infrequent.contains(node) || renamed.contains_key(node) {
            continue;
        }
        let label = role_of(node).map(|prefix| {
            let i = next.entry(prefix).or_insert_with(|| next_index(inst, prefix));
            *i += 1;
            format!("{prefix}{:03}", *i - 1)
        });
        renamed.insert(node, label);
    }
    let map = |n: &str| -> Option<String> {
        match renamed.get(n) {
            Some(l) => l.clone(),
            None => Some(n.to_owned()),
        }
    };
    inst.triples
        .iter()
        .filter(|t| {
            let touches = infrequent.contains(t.subject.as_str()) || infrequent.contains(t.object.as_str());
            !(touches && drop_relations.contains(&t.relation))
        })
        .filter_map(|t| Some(LabelTriple::new(map(&t.subject)?, t.relation.clone(), map(&t.object)?)))
        .collect()
}

/// Prunes until every surviving non-existential entity occurs in at least
/// `min_freq` instances and every instance has its required relations.
pub fn prune(instances: Vec<InstanceRecord>, min_freq: usize, policy: &PrunePolicy) -> Result<Vec<InstanceRecord>> {
    if min_freq == 0 {
        return Err(CoreError::Config("min_freq must be at least 1".into()));
    }
    let mut current = instances;
    for round in 0.. {
        let counts = frequencies(&current);
        let infrequent: HashSet<&str> =
            counts.iter().filter(|(_, c)| **c < min_freq).map(|(e, _)| e.as_str()).collect();
        let required = policy.required_relations();
        let complete = |i: &InstanceRecord| !i.triples.is_empty() && required.iter().all(|r| i.has_relation(r));
        if infrequent.is_empty() && current.iter().all(complete) {
            log::debug!("prune reached a fixed point after {round} rounds");
            break;
        }
        let next: Vec<InstanceRecord> = current
            .iter()
            .map(|inst| {
                let triples = match policy {
                    PrunePolicy::Remove { .. } => inst
                        .triples
                        .iter()
                        .filter(|t| !infrequent.contains(t.subject.as_str()) && !infrequent.contains(t.object.as_str()))
                        .cloned()
                        .collect(),
                    PrunePolicy::Existentialize { roles, drop_relations, .. } => {
                        existentialize(inst, &infrequent, roles, drop_relations)
                    }
                };
                InstanceRecord { id: inst.id.clone(), triples }
            })
            .filter(complete)
            .collect();
        log::debug!("prune round {round}: {} -> {} instances, {} infrequent", current.len(), next.len(), infrequent.len());
        current = next;
    }
    if current.is_empty() {
        return Err(CoreError::Pipeline(format!("pruning at min_freq {min_freq} removed every instance")));
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn movie(id: usize, director: &str, actors: &[&str]) -> InstanceRecord {
        let mut triples = vec![LabelTriple::new("_movie", HAS_DIRECTOR, director)];
        triples.extend(actors.iter().map(|a| LabelTriple::new("_movie", HAS_ACTOR, *a)));
        InstanceRecord { id: format!("m{id}"), triples }
    }

    #[test]
    fn frequent_corpus_is_a_fixed_point() {
        let corpus: Vec<_> = (0..6).map(|i| movie(i, "D", &["A", "B"])).collect();
        assert_eq!(prune(corpus.clone(), 6, &PrunePolicy::movies()).unwrap(), corpus);
        assert_eq!(prune(corpus.clone(), 1, &PrunePolicy::movies()).unwrap(), corpus);
    }

    #[test]
    fn toy_corpus_cascades() {
        // Ten movies by director D. Actor A is in every movie, actor X in five,
        // and movie 9 has X as its only actor besides director E (unique).
        // Round 1: X (5) and E (1) are infrequent; movie 9 loses its director
        // and its only actor and is dropped. Round 2: D now occurs in 9
        // movies, A in 9, everything is frequent.
        let mut corpus: Vec<_> = (0..9).map(|i| movie(i, "D", if i < 4 { &["A", "X"] } else { &["A"] })).collect();
        corpus.push(movie(9, "E", &["X"]));
        let out = prune(corpus, 6, &PrunePolicy::movies()).unwrap();
        assert_eq!(out.len(), 9);
        assert!(out.iter().all(|m| m.entities().into_iter().collect::<Vec<_>>() == ["A", "D"]));
    }

    #[test]
    fn removal_can_cascade_over_several_rounds() {
        // B's only movies lose their director in round 1, which then makes B
        // infrequent in round 2.
        let mut corpus: Vec<_> = (0..6).map(|i| movie(i, "D", &["A"])).collect();
        corpus.extend((6..9).map(|i| movie(i, "rare", &["B"])));
        corpus.extend((9..12).map(|i| movie(i, "D", &["B"])));
        let out = prune(corpus, 6, &PrunePolicy::movies()).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|m| !m.entities().contains("B")));
    }

    #[test]
    fn everything_removed_is_an_error() {
        let corpus = vec![movie(0, "D", &["A"])];
        assert!(matches!(prune(corpus, 2, &PrunePolicy::movies()), Err(CoreError::Pipeline(_))));
    }

    #[test]
    fn articles_existentialize_roles() {
        let article = |i: usize, author: &str, cited: &str| InstanceRecord {
            id: format!("a{i}"),
            triples: vec![
                LabelTriple::new("_article", HAS_AUTHOR, "_authorpos000"),
                LabelTriple::new("_authorpos000", HAS_NAME, author),
                LabelTriple::new("_authorpos000", "has_order", "ordinal_001"),
                LabelTriple::new("_article", CITES, cited),
                LabelTriple::new("_article", HAS_SUBJECT, "Q1"),
                LabelTriple::new("Q1", SUBCLASS_OF, "Q2"),
            ],
        };
        let mut corpus: Vec<_> = (0..6).map(|i| article(i, "Frequent", "Popular")).collect();
        corpus.push(article(6, "Rare", "Obscure"));
        let out = prune(corpus, 7, &PrunePolicy::articles()).unwrap();
        assert_eq!(out.len(), 7);
        let last = &out[6];
        assert!(last.triples.contains(&LabelTriple::new("_authorpos000", HAS_NAME, "_author000")));
        assert!(!last.has_relation(CITES));
        assert!(last.triples.contains(&LabelTriple::new("_article", HAS_SUBJECT, "Q1")));
        // Frequent author at 6 < 7 is existentialized as well; Q1/Q2 occur in all 7.
        assert!(out[0].triples.contains(&LabelTriple::new("_authorpos000", HAS_NAME, "_author000")));
        for inst in &out {
            assert!(inst.entities().iter().all(|e| ["Q1", "Q2", "ordinal_001"].contains(e)), "{inst:?}");
        }
    }

    #[test]
    fn existential_indices_continue_after_existing_ones() {
        let inst = InstanceRecord::new("a", [("_article", "has_subject", "_subject000"), ("_article", "has_subject", "X")]);
        let infrequent: HashSet<&str> = ["X"].into();
        let out = existentialize(&inst, &infrequent, &[(HAS_SUBJECT.into(), "_subject".into())], &[]);
        assert_eq!(out[1], LabelTriple::new("_article", "has_subject", "_subject001"));
    }
}
