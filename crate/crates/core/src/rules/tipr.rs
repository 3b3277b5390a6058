//! syn-tipr: the time-indexed person role pattern.
//!
//! `before` is checked numerically on the year labels: the start year must not
//! exceed the end year. Equal years are accepted.

use std::sync::Arc;

use super::{allowed_relations, edge_count, irreflexive, Rule, RuleKind};
use crate::lexicon::{
    parse_year, EntityType, Lexicon, END_YEAR, HAS_NAME, HAS_ROLE, HAS_TIME, START_YEAR, TIPR_RELATIONS,
};

pub const RELATIONS: &str = "tipr.relations";
pub const ENTITY_TYPING: &str = "tipr.entity-typing";
pub const HAS_ROLE_TYPING: &str = "tipr.has-role";
pub const HAS_NAME_TYPING: &str = "tipr.has-name";
pub const HAS_TIME_TYPING: &str = "tipr.has-time";
pub const START_YEAR_TYPING: &str = "tipr.start-year";
pub const END_YEAR_TYPING: &str = "tipr.end-year";
pub const BEFORE: &str = "tipr.before";
pub const IRREFLEXIVE_HAS_ROLE: &str = "tipr.irreflexive-has-role";
pub const IRREFLEXIVE_HAS_NAME: &str = "tipr.irreflexive-has-name";
pub const IRREFLEXIVE_HAS_TIME: &str = "tipr.irreflexive-has-time";
pub const IRREFLEXIVE_START_YEAR: &str = "tipr.irreflexive-start-year";
pub const IRREFLEXIVE_END_YEAR: &str = "tipr.irreflexive-end-year";
pub const DISJOINT: &str = "tipr.disjoint";
pub const EDGE_COUNT: &str = "tipr.edge-count";

const TYPED: [EntityType; 5] =
    [EntityType::Academic, EntityType::Role, EntityType::Name, EntityType::Time, EntityType::Year];

fn domain_range(
    id: &'static str,
    formula: &'static str,
    relation: &'static str,
    domain: EntityType,
    range: EntityType,
    lexicon: &Arc<Lexicon>,
) -> Rule {
    let lexicon = lexicon.clone();
    Rule::new(id, RuleKind::Typing, formula, move |g| {
        g.with_relation(relation)
            .filter(|t| !lexicon.has_type(t.subject, domain) || !lexicon.has_type(t.object, range))
            .map(|t| format!("{t} is not {domain:?} x {range:?}"))
            .collect()
    })
}

pub(super) fn rules(lexicon: Arc<Lexicon>) -> Vec<Rule> {
    let typing = lexicon.clone();
    let disjoint = lexicon.clone();
    vec![
        allowed_relations(RELATIONS, "relations are has_role, has_name, has_time, start_year, end_year", &TIPR_RELATIONS),
        Rule::new(ENTITY_TYPING, RuleKind::Typing, "every node is an academic, role, name, time or year", move |g| {
            g.nodes()
                .into_iter()
                .filter(|n| !TYPED.iter().any(|ty| typing.has_type(n, *ty)))
                .map(|n| format!("`{n}` has no known type"))
                .collect()
        }),
        domain_range(
            HAS_ROLE_TYPING,
            "has_role(x,y) => academic(x) & role(y)",
            HAS_ROLE,
            EntityType::Academic,
            EntityType::Role,
            &lexicon,
        ),
        domain_range(
            HAS_NAME_TYPING,
            "has_name(x,y) => academic(x) & name(y)",
            HAS_NAME,
            EntityType::Academic,
            EntityType::Name,
            &lexicon,
        ),
        domain_range(
            HAS_TIME_TYPING,
            "has_time(x,y) => academic(x) & time(y)",
            HAS_TIME,
            EntityType::Academic,
            EntityType::Time,
            &lexicon,
        ),
        domain_range(
            START_YEAR_TYPING,
            "start_year(x,y) => time(x) & year(y)",
            START_YEAR,
            EntityType::Time,
            EntityType::Year,
            &lexicon,
        ),
        domain_range(
            END_YEAR_TYPING,
            "end_year(x,y) => time(x) & year(y)",
            END_YEAR,
            EntityType::Time,
            EntityType::Year,
            &lexicon,
        ),
        Rule::new(BEFORE, RuleKind::Temporal, "start_year(x,z) & end_year(x,y) => z <= y", |g| {
            let mut out = Vec::new();
            for start in g.with_relation(START_YEAR) {
                for end in g.with_relation(END_YEAR).filter(|e| e.subject == start.subject) {
                    if let (Some(s), Some(e)) = (parse_year(start.object), parse_year(end.object)) {
                        if s > e {
                            out.push(format!("`{}` starts in {s} but ends in {e}", start.subject));
                        }
                    }
                }
            }
            out
        }),
        irreflexive(IRREFLEXIVE_HAS_ROLE, "~has_role(x,x)", HAS_ROLE),
        irreflexive(IRREFLEXIVE_HAS_NAME, "~has_name(x,x)", HAS_NAME),
        irreflexive(IRREFLEXIVE_HAS_TIME, "~has_time(x,x)", HAS_TIME),
        irreflexive(IRREFLEXIVE_START_YEAR, "~start_year(x,x)", START_YEAR),
        irreflexive(IRREFLEXIVE_END_YEAR, "~end_year(x,x)", END_YEAR),
        Rule::new(DISJOINT, RuleKind::Typing, "academic, role, time, name and year are pairwise disjoint", move |g| {
            g.nodes()
                .into_iter()
                .filter_map(|n| {
                    let tys: Vec<_> = disjoint.types_of(n).into_iter().filter(|t| TYPED.contains(t)).collect();
                    (tys.len() > 1).then(|| format!("`{n}` has types {tys:?}"))
                })
                .collect()
        }),
        edge_count(EDGE_COUNT, 5),
    ]
}
