//! syn-paths: a single directed path of three edges between cities.
//!
//! Degrees count triples, so two parallel edges between the same pair of
//! nodes violate the degree bounds.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{allowed_relations, edge_count, LabeledGraph, Rule, RuleKind};
use crate::lexicon::{EntityType, Lexicon, PATH_RELATIONS};

pub const RELATIONS: &str = "paths.relations";
pub const CITY_TYPING: &str = "paths.city-typing";
pub const ROOT_EXISTS: &str = "paths.root-exists";
pub const ROOT_UNIQUE: &str = "paths.root-unique";
pub const IN_DEGREE: &str = "paths.in-degree";
pub const OUT_DEGREE: &str = "paths.out-degree";
pub const ACYCLIC: &str = "paths.acyclic";
pub const ROOT_REACHES_ALL: &str = "paths.root-reaches-all";
pub const EDGE_COUNT: &str = "paths.edge-count";

fn roots<'a>(g: &LabeledGraph<'a>) -> Vec<&'a str> {
    g.nodes().into_iter().filter(|n| !g.triples().iter().any(|t| t.object == *n)).collect()
}

fn degrees<'a>(g: &LabeledGraph<'a>, incoming: bool) -> BTreeMap<&'a str, usize> {
    let mut deg = BTreeMap::new();
    for t in g.triples() {
        *deg.entry(if incoming { t.object } else { t.subject }).or_insert(0) += 1;
    }
    deg
}

fn edges<'a>(g: &LabeledGraph<'a>) -> Vec<(&'a str, &'a str)> {
    g.triples().iter().map(|t| (t.subject, t.object)).collect()
}

pub(super) fn rules(lexicon: Arc<Lexicon>) -> Vec<Rule> {
    vec![
        allowed_relations(RELATIONS, "edge(x,y) <=> cycle_to(x,y) | drive_to(x,y) | train_to(x,y)", &PATH_RELATIONS),
        Rule::new(CITY_TYPING, RuleKind::Typing, "every node is a city of the lexicon", move |g| {
            g.nodes()
                .into_iter()
                .filter(|n| !lexicon.has_type(n, EntityType::City))
                .map(|n| format!("`{n}` is not a known city"))
                .collect()
        }),
        Rule::new(ROOT_EXISTS, RuleKind::Structural, "exists x: root(x)", |g| {
            if roots(g).is_empty() {
                vec!["no node without incoming edges".into()]
            } else {
                Vec::new()
            }
        }),
        Rule::new(ROOT_UNIQUE, RuleKind::Structural, "root(a) & root(b) => a = b", |g| {
            let r = roots(g);
            if r.len() > 1 {
                vec![format!("multiple roots: {r:?}")]
            } else {
                Vec::new()
            }
        }),
        Rule::new(IN_DEGREE, RuleKind::Structural, "edge(y,x) & edge(z,x) => y = z", |g| {
            degrees(g, true)
                .into_iter()
                .filter(|(_, d)| *d > 1)
                .map(|(n, d)| format!("`{n}` has {d} incoming edges"))
                .collect()
        }),
        Rule::new(OUT_DEGREE, RuleKind::Structural, "edge(x,y) & edge(x,z) => y = z", |g| {
            degrees(g, false)
                .into_iter()
                .filter(|(_, d)| *d > 1)
                .map(|(n, d)| format!("`{n}` has {d} outgoing edges"))
                .collect()
        }),
        Rule::new(ACYCLIC, RuleKind::Structural, "connected(x,y) => x != y", |g| {
            g.transitive_closure(&edges(g))
                .into_iter()
                .filter(|(a, b)| a == b)
                .map(|(a, _)| format!("`{a}` lies on a cycle"))
                .collect()
        }),
        Rule::new(ROOT_REACHES_ALL, RuleKind::Connectivity, "root(x) => forall y: connected(x,y) | x = y", |g| {
            let closure = &g.transitive_closure(&edges(g));
            let nodes = &g.nodes();
            roots(g)
                .into_iter()
                .flat_map(|r| {
                    nodes
                        .iter()
                        .filter(move |n| **n != r && !closure.contains(&(r, **n)))
                        .map(move |n| format!("root `{r}` does not reach `{n}`"))
                        .collect::<Vec<_>>()
                })
                .collect()
        }),
        edge_count(EDGE_COUNT, 3),
    ]
}
