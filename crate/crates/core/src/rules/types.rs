//! syn-types: relation domain/range typing over languages, countries and cities.

use std::sync::Arc;

use super::{allowed_relations, edge_count, Rule, RuleKind};
use crate::lexicon::{EntityType, Lexicon, COULD_BE_PART_OF, SAME_TYPE_AS, SPOKEN_IN, TYPES_RELATIONS};

pub const RELATIONS: &str = "types.relations";
pub const ENTITY_TYPING: &str = "types.entity-typing";
pub const SPOKEN_IN_TYPING: &str = "types.spoken-in";
pub const PART_OF_TYPING: &str = "types.part-of";
pub const SAME_TYPE: &str = "types.same-type";
pub const DISJOINT: &str = "types.disjoint";
pub const EDGE_COUNT: &str = "types.edge-count";

const TYPED: [EntityType; 3] = [EntityType::Language, EntityType::Country, EntityType::City];

fn domain_range(
    id: &'static str,
    formula: &'static str,
    relation: &'static str,
    domain: EntityType,
    range: EntityType,
    lexicon: Arc<Lexicon>,
) -> Rule {
    Rule::new(id, RuleKind::Typing, formula, move |g| {
        g.with_relation(relation)
            .filter(|t| !lexicon.has_type(t.subject, domain) || !lexicon.has_type(t.object, range))
            .map(|t| format!("{t} is not {domain:?} x {range:?}"))
            .collect()
    })
}

pub(super) fn rules(lexicon: Arc<Lexicon>) -> Vec<Rule> {
    let lex = lexicon.clone();
    let same = lexicon.clone();
    let disj = lexicon.clone();
    vec![
        allowed_relations(RELATIONS, "relations are same_type_as, could_be_part_of, spoken_in", &TYPES_RELATIONS),
        Rule::new(ENTITY_TYPING, RuleKind::Typing, "every node is a language, country or city", move |g| {
            g.nodes()
                .into_iter()
                .filter(|n| !TYPED.iter().any(|ty| lex.has_type(n, *ty)))
                .map(|n| format!("`{n}` has no known type"))
                .collect()
        }),
        domain_range(
            SPOKEN_IN_TYPING,
            "spoken_in(x,y) => language(x) & country(y)",
            SPOKEN_IN,
            EntityType::Language,
            EntityType::Country,
            lexicon.clone(),
        ),
        domain_range(
            PART_OF_TYPING,
            "could_be_part_of(x,y) => city(x) & country(y)",
            COULD_BE_PART_OF,
            EntityType::City,
            EntityType::Country,
            lexicon,
        ),
        Rule::new(
            SAME_TYPE,
            RuleKind::Typing,
            "same_type_as(x,y) => (language(x) & language(y)) | (city(x) & city(y)) | (country(x) & country(y))",
            move |g| {
                g.with_relation(SAME_TYPE_AS)
                    .filter(|t| !TYPED.iter().any(|ty| same.has_type(t.subject, *ty) && same.has_type(t.object, *ty)))
                    .map(|t| format!("{t} relates different types"))
                    .collect()
            },
        ),
        Rule::new(DISJOINT, RuleKind::Typing, "language, country and city are pairwise disjoint", move |g| {
            g.nodes()
                .into_iter()
                .filter_map(|n| {
                    let tys: Vec<_> = disj.types_of(n).into_iter().filter(|t| TYPED.contains(t)).collect();
                    (tys.len() > 1).then(|| format!("`{n}` has types {tys:?}"))
                })
                .collect()
        }),
        edge_count(EDGE_COUNT, 3),
    ]
}
