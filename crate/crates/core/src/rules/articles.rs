//! wd-articles: an article with an ordered author list, citations and
//! subjects with their superclasses.
//!
//! Node roles are inferred from the relations a node takes part in, plus the
//! label conventions of the dataset (`_article`, `_authorposNNN`, `_authorNNN`,
//! `_subjectNNN`, `ordinal_NNN`). Subjects and cited references may share a
//! node since both can be plain IRIs; any other pair of roles is a conflict.
//!
//! A `subclass_of(x, y)` edge is anchored when `x` is a subject of the article
//! or is reachable from one through `subclass_of` edges. Author ordinals must
//! be exactly `ordinal_001 ..= ordinal_n` for `n` author positions.

use std::collections::{BTreeMap, BTreeSet};

use super::{LabeledGraph, Rule, RuleKind};
use crate::lexicon::{ARTICLES_RELATIONS, ARTICLE_NODE, CITES, HAS_AUTHOR, HAS_NAME, HAS_ORDER, HAS_SUBJECT, SUBCLASS_OF};

pub const RELATIONS: &str = "articles.relations";
pub const HAS_AUTHOR_EXISTS: &str = "articles.has-author";
pub const ANTISYMMETRIC: &str = "articles.antisymmetric";
pub const IRREFLEXIVE: &str = "articles.irreflexive";
pub const SINGLE_ARTICLE: &str = "articles.single-article";
pub const AUTHORPOS: &str = "articles.authorpos";
pub const ORDER_FUNCTIONAL: &str = "articles.order-functional";
pub const NAME_FUNCTIONAL: &str = "articles.name-functional";
pub const ORDER_TYPING: &str = "articles.order-typing";
pub const DISJOINT: &str = "articles.disjoint";
pub const SUBCLASS_ANCHORED: &str = "articles.subclass-anchored";
pub const CITES_ORIGIN: &str = "articles.cites-origin";
pub const SUBJECT_ORIGIN: &str = "articles.subject-origin";
pub const CONSECUTIVE_ORDINALS: &str = "articles.consecutive-ordinals";

const ORDINAL_PREFIX: &str = "ordinal_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Article,
    AuthorPos,
    Author,
    Ordinal,
    Topic,
    Reference,
}

fn compatible(a: Role, b: Role) -> bool {
    a == b || matches!((a, b), (Role::Topic, Role::Reference) | (Role::Reference, Role::Topic))
}

fn ordinal_number(label: &str) -> Option<u32> {
    let digits = label.strip_prefix(ORDINAL_PREFIX)?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then(|| digits.parse().ok()).flatten()
}

fn indexed(label: &str, prefix: &str) -> bool {
    label.strip_prefix(prefix).is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

fn label_role(label: &str) -> Option<Role> {
    if label == ARTICLE_NODE {
        Some(Role::Article)
    } else if indexed(label, "_authorpos") {
        Some(Role::AuthorPos)
    } else if indexed(label, "_author") {
        Some(Role::Author)
    } else if indexed(label, "_subject") {
        Some(Role::Topic)
    } else if ordinal_number(label).is_some() {
        Some(Role::Ordinal)
    } else {
        None
    }
}

fn roles<'a>(g: &LabeledGraph<'a>) -> BTreeMap<&'a str, BTreeSet<Role>> {
    let mut roles: BTreeMap<&str, BTreeSet<Role>> = BTreeMap::new();
    for n in g.nodes() {
        roles.entry(n).or_default().extend(label_role(n));
    }
    for t in g.triples() {
        let (s, o) = match t.relation {
            HAS_AUTHOR => (Role::Article, Role::AuthorPos),
            HAS_NAME => (Role::AuthorPos, Role::Author),
            HAS_ORDER => (Role::AuthorPos, Role::Ordinal),
            CITES => (Role::Article, Role::Reference),
            HAS_SUBJECT => (Role::Article, Role::Topic),
            SUBCLASS_OF => (Role::Topic, Role::Topic),
            _ => continue,
        };
        roles.entry(t.subject).or_default().insert(s);
        roles.entry(t.object).or_default().insert(o);
    }
    roles
}

/// The article node: the subject of `has_author` edges, falling back to the
/// `_article` label or the first `cites`/`has_subject` subject.
fn article_node<'a>(g: &LabeledGraph<'a>) -> Option<&'a str> {
    g.with_relation(HAS_AUTHOR)
        .map(|t| t.subject)
        .next()
        .or_else(|| g.nodes().into_iter().find(|n| *n == ARTICLE_NODE))
        .or_else(|| g.triples().iter().find(|t| t.relation == CITES || t.relation == HAS_SUBJECT).map(|t| t.subject))
}

fn origin_rule(id: &'static str, formula: &'static str, relation: &'static str) -> Rule {
    Rule::new(id, RuleKind::Structural, formula, move |g| {
        let article = article_node(g);
        g.with_relation(relation)
            .filter(|t| Some(t.subject) != article)
            .map(|t| format!("{t} does not start at the article node"))
            .collect()
    })
}

fn functional(id: &'static str, formula: &'static str, relation: &'static str) -> Rule {
    Rule::new(id, RuleKind::Cardinality, formula, move |g| {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in g.with_relation(relation) {
            *counts.entry(t.subject).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|(_, c)| *c > 1)
            .map(|(n, c)| format!("`{n}` has {c} {relation} edges"))
            .collect()
    })
}

pub(super) fn rules() -> Vec<Rule> {
    vec![
        super::allowed_relations(
            RELATIONS,
            "connected(x,y) <=> has_author | has_name | has_order | cites | has_subject | subclass_of",
            &ARTICLES_RELATIONS,
        ),
        Rule::new(HAS_AUTHOR_EXISTS, RuleKind::Cardinality, "exists x: has_author(article, x)", |g| {
            if g.with_relation(HAS_AUTHOR).next().is_some() {
                Vec::new()
            } else {
                vec!["article has no author".into()]
            }
        }),
        Rule::new(ANTISYMMETRIC, RuleKind::Structural, "connected(x,y) => ~connected(y,x) | cites(y,x)", |g| {
            let connected: BTreeSet<_> = g.triples().iter().map(|t| (t.subject, t.object)).collect();
            let cites: BTreeSet<_> = g.with_relation(CITES).map(|t| (t.subject, t.object)).collect();
            connected
                .iter()
                .filter(|(x, y)| x != y && connected.contains(&(*y, *x)) && !cites.contains(&(*y, *x)))
                .map(|(x, y)| format!("`{x}` and `{y}` are connected both ways"))
                .collect()
        }),
        Rule::new(IRREFLEXIVE, RuleKind::Structural, "~connected(x,x)", |g| {
            g.triples().iter().filter(|t| t.subject == t.object).map(|t| t.to_string()).collect()
        }),
        Rule::new(SINGLE_ARTICLE, RuleKind::Structural, "has_author(x,y) => x = article", |g| {
            let subjects: BTreeSet<_> = g.with_relation(HAS_AUTHOR).map(|t| t.subject).collect();
            if subjects.len() > 1 {
                vec![format!("has_author edges leave several nodes: {subjects:?}")]
            } else {
                Vec::new()
            }
        }),
        Rule::new(
            AUTHORPOS,
            RuleKind::Structural,
            "authorpos(x) <=> has_author(article,x) <=> exists y: has_order(x,y) & exists y: has_name(x,y)",
            |g| {
                let positions: BTreeSet<_> = g.with_relation(HAS_AUTHOR).map(|t| t.object).collect();
                let ordered: BTreeSet<_> = g.with_relation(HAS_ORDER).map(|t| t.subject).collect();
                let named: BTreeSet<_> = g.with_relation(HAS_NAME).map(|t| t.subject).collect();
                let mut out = Vec::new();
                for p in &positions {
                    if !ordered.contains(p) {
                        out.push(format!("author position `{p}` has no order"));
                    }
                    if !named.contains(p) {
                        out.push(format!("author position `{p}` has no name"));
                    }
                }
                for n in ordered.union(&named) {
                    if !positions.contains(n) {
                        out.push(format!("`{n}` has an order or name but is not an author position"));
                    }
                }
                out
            },
        ),
        functional(ORDER_FUNCTIONAL, "has_order(x,y) & has_order(x,z) => y = z", HAS_ORDER),
        functional(NAME_FUNCTIONAL, "has_name(x,y) & has_name(x,z) => y = z", HAS_NAME),
        Rule::new(ORDER_TYPING, RuleKind::Typing, "has_order(x,y) => ordinal(y)", |g| {
            g.with_relation(HAS_ORDER)
                .filter(|t| ordinal_number(t.object).is_none())
                .map(|t| format!("{t}: `{}` is not an ordinal", t.object))
                .collect()
        }),
        Rule::new(DISJOINT, RuleKind::Typing, "author, subject, iri, name, ordinal and author_pos are disjoint", |g| {
            roles(g)
                .into_iter()
                .filter_map(|(n, rs)| {
                    let rs: Vec<_> = rs.into_iter().collect();
                    let clash = rs.iter().enumerate().any(|(i, a)| rs[i + 1..].iter().any(|b| !compatible(*a, *b)));
                    clash.then(|| format!("`{n}` plays conflicting roles {rs:?}"))
                })
                .collect()
        }),
        Rule::new(
            SUBCLASS_ANCHORED,
            RuleKind::Connectivity,
            "subclass_of(x,y) => exists z: has_subject(article,z) & subclass_trans*(z,x)",
            |g| {
                let article = article_node(g);
                let subjects: BTreeSet<_> =
                    g.with_relation(HAS_SUBJECT).filter(|t| Some(t.subject) == article).map(|t| t.object).collect();
                let edges: Vec<_> = g.with_relation(SUBCLASS_OF).map(|t| (t.subject, t.object)).collect();
                let closure = g.transitive_closure(&edges);
                edges
                    .iter()
                    .filter(|(x, _)| !subjects.contains(x) && !subjects.iter().any(|z| closure.contains(&(*z, *x))))
                    .map(|(x, y)| format!("({x} subclass_of {y}) is not anchored at a subject of the article"))
                    .collect()
            },
        ),
        origin_rule(CITES_ORIGIN, "cites(x,y) => x = article", CITES),
        origin_rule(SUBJECT_ORIGIN, "has_subject(x,y) => x = article", HAS_SUBJECT),
        Rule::new(
            CONSECUTIVE_ORDINALS,
            RuleKind::Cardinality,
            "author ordinals are exactly ordinal_001 .. ordinal_n",
            |g| {
                let positions = g.with_relation(HAS_AUTHOR).map(|t| t.object).collect::<BTreeSet<_>>().len();
                let mut ordinals: Vec<u32> = g.with_relation(HAS_ORDER).filter_map(|t| ordinal_number(t.object)).collect();
                ordinals.sort_unstable();
                let expected: Vec<u32> = (1..=positions as u32).collect();
                if ordinals == expected {
                    Vec::new()
                } else {
                    vec![format!("ordinals {ordinals:?} for {positions} author positions")]
                }
            },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DatasetName;
    use crate::rules::RuleSet;

    fn rs() -> RuleSet {
        RuleSet::for_dataset(DatasetName::WdArticles)
    }

    fn article(ordinals: &[&'static str]) -> Vec<(String, &'static str, String)> {
        let mut t = Vec::new();
        for (i, ord) in ordinals.iter().enumerate() {
            let pos = format!("_authorpos{i:03}");
            t.push(("_article".to_string(), "has_author", pos.clone()));
            t.push((pos.clone(), "has_name", format!("_author{i:03}")));
            t.push((pos, "has_order", ord.to_string()));
        }
        t.push(("_article".into(), "cites", "http://www.wikidata.org/entity/Q25938995".into()));
        t.push(("_article".into(), "has_subject", "http://www.wikidata.org/entity/Q214781".into()));
        t.push((
            "http://www.wikidata.org/entity/Q214781".into(),
            "subclass_of",
            "http://www.wikidata.org/entity/Q413".into(),
        ));
        t
    }

    fn check(triples: &[(String, &'static str, String)]) -> crate::rules::ValidityReport {
        let g = LabeledGraph::new(triples.iter().map(|(s, r, o)| (s.as_str(), *r, o.as_str())));
        rs().verify_labeled(&g)
    }

    #[test]
    fn example_article_is_valid() {
        let report = check(&article(&["ordinal_001", "ordinal_002", "ordinal_003"]));
        assert!(report.valid, "{report}");
    }

    #[test]
    fn gap_in_ordinals_is_invalid() {
        let report = check(&article(&["ordinal_001", "ordinal_003"]));
        assert_eq!(report.violated_rules().into_iter().collect::<Vec<_>>(), [CONSECUTIVE_ORDINALS]);
    }

    #[test]
    fn ordinals_must_start_at_one() {
        let report = check(&article(&["ordinal_000", "ordinal_001"]));
        assert!(report.violates(CONSECUTIVE_ORDINALS));
    }

    #[test]
    fn missing_name_and_unanchored_superclass() {
        let mut t = article(&["ordinal_001"]);
        t.retain(|(_, r, _)| *r != "has_name");
        t.push(("http://x/Q1".into(), "subclass_of", "http://x/Q2".into()));
        let report = check(&t);
        assert!(report.violates(AUTHORPOS));
        assert!(report.violates(SUBCLASS_ANCHORED));
        assert!(!report.violates(CONSECUTIVE_ORDINALS));
    }

    #[test]
    fn deep_subclass_chain_is_anchored() {
        let mut t = article(&["ordinal_001"]);
        t.push(("http://www.wikidata.org/entity/Q413".into(), "subclass_of", "http://x/Q9".into()));
        assert!(check(&t).valid);
    }

    #[test]
    fn role_conflicts_and_foreign_origins() {
        let mut t = article(&["ordinal_001"]);
        t.push(("_authorpos000".into(), "cites", "ordinal_001".into()));
        let report = check(&t);
        assert!(report.violates(DISJOINT));
        assert!(report.violates(CITES_ORIGIN));
    }

    #[test]
    fn no_author_is_invalid() {
        let report = check(&[("_article".into(), "cites", "http://x/Q1".into())]);
        assert!(report.violates(HAS_AUTHOR_EXISTS));
    }
}
