//! Logical constraint verification.
//!
//! A [`RuleSet`] is an ordered list of named rules for one dataset. Each rule
//! inspects a [`LabeledGraph`] and returns witnesses for every violation it
//! finds; [`verify`] runs all rules and collects every violation, so a report
//! never stops at the first failure. Rules are pure functions of the graph and
//! independent of each other.

mod articles;
mod movies;
mod paths;
mod tipr;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::dataset::DatasetName;
use crate::graph::Subgraph;
use crate::lexicon::Lexicon;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Structural,
    Typing,
    Temporal,
    Cardinality,
    Connectivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledTriple<'a> {
    pub subject: &'a str,
    pub relation: &'a str,
    pub object: &'a str,
}

impl fmt::Display for LabeledTriple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.relation, self.object)
    }
}

/// A subgraph viewed through its labels, the form every rule works on.
#[derive(Debug, Clone, Default)]
pub struct LabeledGraph<'a> {
    triples: Vec<LabeledTriple<'a>>,
}

impl<'a> LabeledGraph<'a> {
    pub fn new(triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>) -> Self {
        Self {
            triples: triples
                .into_iter()
                .map(|(subject, relation, object)| LabeledTriple { subject, relation, object })
                .collect(),
        }
    }

    pub fn from_subgraph(g: &Subgraph, vocab: &'a Vocabulary) -> Self {
        Self {
            triples: g
                .triples()
                .iter()
                .map(|t| LabeledTriple {
                    subject: vocab.entity_label(t.subject),
                    relation: vocab.relation_label(t.relation),
                    object: vocab.entity_label(t.object),
                })
                .collect(),
        }
    }

    pub fn triples(&self) -> &[LabeledTriple<'a>] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Distinct node labels in first-seen order.
    pub fn nodes(&self) -> Vec<&'a str> {
        let mut seen = BTreeSet::new();
        self.triples
            .iter()
            .flat_map(|t| [t.subject, t.object])
            .filter(|n| seen.insert(*n))
            .collect()
    }

    pub fn with_relation<'s>(&'s self, relation: &'s str) -> impl Iterator<Item = &'s LabeledTriple<'a>> + 's {
        self.triples.iter().filter(move |t| t.relation == relation)
    }

    /// Pairs `(x, y)` such that `y` is reachable from `x` over one or more edges.
    pub fn transitive_closure(&self, edges: &[(&'a str, &'a str)]) -> BTreeSet<(&'a str, &'a str)> {
        let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (a, b) in edges {
            succ.entry(a).or_default().insert(b);
        }
        let mut closure = BTreeSet::new();
        for start in succ.keys().copied().collect::<Vec<_>>() {
            let mut stack: Vec<&str> = succ[start].iter().copied().collect();
            let mut seen = BTreeSet::new();
            while let Some(n) = stack.pop() {
                if seen.insert(n) {
                    closure.insert((start, n));
                    if let Some(next) = succ.get(n) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
        }
        closure
    }
}

type CheckFn = dyn for<'g> Fn(&LabeledGraph<'g>) -> Vec<String> + Send + Sync;

/// One named constraint. `check` returns a witness string per violation.
#[derive(Clone)]
pub struct Rule {
    pub id: &'static str,
    pub formula: &'static str,
    pub kind: RuleKind,
    check: Arc<CheckFn>,
}

impl Rule {
    pub fn new<F>(id: &'static str, kind: RuleKind, formula: &'static str, check: F) -> Self
    where
        F: for<'g> Fn(&LabeledGraph<'g>) -> Vec<String> + Send + Sync + 'static,
    {
        Self { id, formula, kind, check: Arc::new(check) }
    }

    pub fn check(&self, g: &LabeledGraph<'_>) -> Vec<String> {
        (self.check)(g)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule").field("id", &self.id).field("kind", &self.kind).finish()
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub dataset: DatasetName,
    rules: Vec<Rule>,
}

impl RuleSet {
    /// The rule set of a dataset, with the shipped lexicon for synthetic ones.
    pub fn for_dataset(dataset: DatasetName) -> Self {
        match Lexicon::for_dataset(dataset) {
            Some(lex) => Self::with_lexicon(dataset, lex),
            None => Self::with_lexicon(dataset, Lexicon::new()),
        }
    }

    /// Builds the rule set with a caller-supplied typing lexicon. The real-world
    /// datasets type entities by their position in the graph and ignore it.
    pub fn with_lexicon(dataset: DatasetName, lexicon: Lexicon) -> Self {
        let lexicon = Arc::new(lexicon);
        let rules = match dataset {
            DatasetName::SynPaths => paths::rules(lexicon),
            DatasetName::SynTypes => types::rules(lexicon),
            DatasetName::SynTipr => tipr::rules(lexicon),
            DatasetName::WdMovies => movies::rules(),
            DatasetName::WdArticles => articles::rules(),
        };
        debug_assert!({
            let ids: BTreeSet<_> = rules.iter().map(|r| r.id).collect();
            ids.len() == rules.len()
        });
        Self { dataset, rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// A copy without the named rule.
    pub fn without(&self, id: &str) -> Self {
        Self { dataset: self.dataset, rules: self.rules.iter().filter(|r| r.id != id).cloned().collect() }
    }

    pub fn verify_labeled(&self, g: &LabeledGraph<'_>) -> ValidityReport {
        let violations: Vec<Violation> = self
            .rules
            .iter()
            .flat_map(|rule| {
                rule.check(g).into_iter().map(move |witness| Violation { rule: rule.id, kind: rule.kind, witness })
            })
            .collect();
        ValidityReport { valid: violations.is_empty(), violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub kind: RuleKind,
    pub witness: String,
}

/// Outcome of verifying one subgraph. `valid` holds iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn violated_rules(&self) -> BTreeSet<&'static str> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    pub fn violates(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return writeln!(f, "valid");
        }
        writeln!(f, "invalid ({} violations)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}\t{}", v.rule, v.witness)?;
        }
        Ok(())
    }
}

pub fn verify(g: &Subgraph, vocab: &Vocabulary, ruleset: &RuleSet) -> ValidityReport {
    ruleset.verify_labeled(&LabeledGraph::from_subgraph(g, vocab))
}

// Shared rule builders.

pub(crate) fn allowed_relations(id: &'static str, formula: &'static str, allowed: &'static [&'static str]) -> Rule {
    Rule::new(id, RuleKind::Structural, formula, move |g| {
        g.triples()
            .iter()
            .filter(|t| !allowed.contains(&t.relation))
            .map(|t| format!("{t} uses relation outside {allowed:?}"))
            .collect()
    })
}

pub(crate) fn edge_count(id: &'static str, expected: usize) -> Rule {
    Rule::new(id, RuleKind::Cardinality, "Number of edges", move |g| {
        if g.len() == expected {
            Vec::new()
        } else {
            vec![format!("{} edges, expected {expected}", g.len())]
        }
    })
}

pub(crate) fn irreflexive(id: &'static str, formula: &'static str, relation: &'static str) -> Rule {
    Rule::new(id, RuleKind::Structural, formula, move |g| {
        g.with_relation(relation).filter(|t| t.subject == t.object).map(|t| t.to_string()).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_chain() {
        let g = LabeledGraph::default();
        let c = g.transitive_closure(&[("a", "b"), ("b", "c")]);
        assert!(c.contains(&("a", "c")));
        assert!(!c.contains(&("c", "a")));
        assert_eq!(c.len(), 3);
        let cyc = g.transitive_closure(&[("a", "b"), ("b", "a")]);
        assert!(cyc.contains(&("a", "a")));
    }

    #[test]
    fn every_dataset_has_unique_rule_ids() {
        for d in DatasetName::ALL {
            let rs = RuleSet::for_dataset(d);
            let ids: BTreeSet<_> = rs.rules().iter().map(|r| r.id).collect();
            assert_eq!(ids.len(), rs.rules().len(), "{d}");
            assert!(!rs.rules().is_empty());
        }
    }
}
