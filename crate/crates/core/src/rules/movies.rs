//! wd-movies: a star around the `_movie` node.
//!
//! Person and genre types are inferred from position inside the graph: objects
//! of `has_director`/`has_actor` are persons, objects of `has_genre` genres.
//!
//! The genre requirement is enforced as stated by the rule set, although the
//! extraction procedure also kept genre-less movies; such graphs report a
//! `movies.has-genre` violation and nothing else.

use std::collections::BTreeSet;

use super::{allowed_relations, LabeledGraph, Rule, RuleKind};
use crate::lexicon::{HAS_ACTOR, HAS_DIRECTOR, HAS_GENRE, MOVIES_RELATIONS, MOVIE_NODE};

pub const RELATIONS: &str = "movies.relations";
pub const HAS_DIRECTOR_EXISTS: &str = "movies.has-director";
pub const HAS_ACTOR_EXISTS: &str = "movies.has-actor";
pub const HAS_GENRE_EXISTS: &str = "movies.has-genre";
pub const STAR: &str = "movies.star";
pub const NO_PERIPHERAL_EDGES: &str = "movies.no-peripheral-edges";
pub const NO_EDGE_INTO_MOVIE: &str = "movies.no-edge-into-movie";
pub const PERSON_GENRE_DISJOINT: &str = "movies.person-genre-disjoint";

fn exists_from_movie(id: &'static str, formula: &'static str, relation: &'static str) -> Rule {
    Rule::new(id, RuleKind::Cardinality, formula, move |g| {
        if g.with_relation(relation).any(|t| t.subject == MOVIE_NODE) {
            Vec::new()
        } else {
            vec![format!("no `{MOVIE_NODE} {relation} _` triple")]
        }
    })
}

fn objects<'a>(g: &LabeledGraph<'a>, relations: &[&str]) -> BTreeSet<&'a str> {
    g.triples().iter().filter(|t| relations.contains(&t.relation)).map(|t| t.object).collect()
}

pub(super) fn rules() -> Vec<Rule> {
    vec![
        allowed_relations(
            RELATIONS,
            "connected(x,y) <=> has_director(x,y) | has_actor(x,y) | has_genre(x,y)",
            &MOVIES_RELATIONS,
        ),
        exists_from_movie(HAS_DIRECTOR_EXISTS, "exists x: has_director(movie, x)", HAS_DIRECTOR),
        exists_from_movie(HAS_ACTOR_EXISTS, "exists x: has_actor(movie, x)", HAS_ACTOR),
        exists_from_movie(HAS_GENRE_EXISTS, "exists x: has_genre(movie, x)", HAS_GENRE),
        Rule::new(STAR, RuleKind::Connectivity, "x != movie => connected(movie, x)", |g| {
            let reached: BTreeSet<_> =
                g.triples().iter().filter(|t| t.subject == MOVIE_NODE).map(|t| t.object).collect();
            g.nodes()
                .into_iter()
                .filter(|n| *n != MOVIE_NODE && !reached.contains(n))
                .map(|n| format!("`{n}` is not attached to {MOVIE_NODE}"))
                .collect()
        }),
        Rule::new(
            NO_PERIPHERAL_EDGES,
            RuleKind::Structural,
            "x != movie & y != movie => ~connected(x,y)",
            |g| {
                g.triples()
                    .iter()
                    .filter(|t| t.subject != MOVIE_NODE && t.object != MOVIE_NODE)
                    .map(|t| format!("{t} does not involve {MOVIE_NODE}"))
                    .collect()
            },
        ),
        Rule::new(NO_EDGE_INTO_MOVIE, RuleKind::Structural, "~connected(x, movie)", |g| {
            g.triples().iter().filter(|t| t.object == MOVIE_NODE).map(|t| format!("{t} points into {MOVIE_NODE}")).collect()
        }),
        Rule::new(PERSON_GENRE_DISJOINT, RuleKind::Typing, "~person(x) | ~genre(x)", |g| {
            let persons = objects(g, &[HAS_DIRECTOR, HAS_ACTOR]);
            let genres = objects(g, &[HAS_GENRE]);
            persons.intersection(&genres).map(|n| format!("`{n}` is both a person and a genre")).collect()
        }),
    ]
}
