//! Fixed label lists for the synthetic datasets and the entity typing derived
//! from them.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::dataset::DatasetName;
use crate::vocab::Vocabulary;

pub const PATH_RELATIONS: [&str; 3] = ["cycle_to", "drive_to", "train_to"];

pub const SAME_TYPE_AS: &str = "same_type_as";
pub const COULD_BE_PART_OF: &str = "could_be_part_of";
pub const SPOKEN_IN: &str = "spoken_in";
pub const TYPES_RELATIONS: [&str; 3] = [SAME_TYPE_AS, COULD_BE_PART_OF, SPOKEN_IN];

pub const HAS_NAME: &str = "has_name";
pub const HAS_ROLE: &str = "has_role";
pub const HAS_TIME: &str = "has_time";
pub const START_YEAR: &str = "start_year";
pub const END_YEAR: &str = "end_year";
pub const TIPR_RELATIONS: [&str; 5] = [HAS_NAME, HAS_ROLE, HAS_TIME, START_YEAR, END_YEAR];
pub const ACADEMIC_NODE: &str = "_academic";
pub const TIME_NODE: &str = "_time";
pub const FIRST_YEAR: i32 = 1950;
pub const LAST_YEAR: i32 = 2020;

pub const HAS_DIRECTOR: &str = "has_director";
pub const HAS_ACTOR: &str = "has_actor";
pub const HAS_GENRE: &str = "has_genre";
pub const MOVIES_RELATIONS: [&str; 3] = [HAS_DIRECTOR, HAS_ACTOR, HAS_GENRE];
pub const MOVIE_NODE: &str = "_movie";

pub const HAS_AUTHOR: &str = "has_author";
pub const HAS_ORDER: &str = "has_order";
pub const CITES: &str = "cites";
pub const HAS_SUBJECT: &str = "has_subject";
pub const SUBCLASS_OF: &str = "subclass_of";
pub const ARTICLES_RELATIONS: [&str; 6] = [HAS_AUTHOR, HAS_NAME, HAS_ORDER, CITES, HAS_SUBJECT, SUBCLASS_OF];
pub const ARTICLE_NODE: &str = "_article";

fn lines(text: &'static str) -> Vec<&'static str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

pub fn cities() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/cities.txt")))
}

pub fn languages() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/languages.txt")))
}

pub fn countries() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/countries.txt")))
}

/// Cities of the syn-types lexicon (distinct from the syn-paths cities).
pub fn capitals() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/capitals.txt")))
}

pub fn person_names() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/names.txt")))
}

pub fn roles() -> &'static [&'static str] {
    static V: OnceLock<Vec<&str>> = OnceLock::new();
    V.get_or_init(|| lines(include_str!("../data/roles.txt")))
}

pub fn years() -> impl Iterator<Item = i32> {
    FIRST_YEAR..=LAST_YEAR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    City,
    Language,
    Country,
    Academic,
    Time,
    Name,
    Role,
    Year,
}

/// Maps labels to the types the lexicon assigns them. A label may carry
/// several types only if lexicons overlap, which the disjointness rules flag.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    types: HashMap<String, Vec<EntityType>>,
    year_range: Option<(i32, i32)>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add<S: AsRef<str>>(&mut self, labels: impl IntoIterator<Item = S>, ty: EntityType) -> &mut Self {
        for l in labels {
            let entry = self.types.entry(l.as_ref().to_owned()).or_default();
            if !entry.contains(&ty) {
                entry.push(ty);
            }
        }
        self
    }

    /// Integer labels inside `[first, last]` resolve to [`EntityType::Year`].
    pub fn with_years(&mut self, first: i32, last: i32) -> &mut Self {
        self.year_range = Some((first, last));
        self
    }

    pub fn types_of(&self, label: &str) -> Vec<EntityType> {
        let mut out = self.types.get(label).cloned().unwrap_or_default();
        if parse_year(label).is_some_and(|y| self.year_range.is_some_and(|(a, b)| (a..=b).contains(&y)))
            && !out.contains(&EntityType::Year)
        {
            out.push(EntityType::Year);
        }
        out
    }

    pub fn has_type(&self, label: &str, ty: EntityType) -> bool {
        self.types_of(label).contains(&ty)
    }

    pub fn for_dataset(name: DatasetName) -> Option<Lexicon> {
        let mut lex = Lexicon::new();
        match name {
            DatasetName::SynPaths => {
                lex.add(cities().iter(), EntityType::City);
            }
            DatasetName::SynTypes => {
                lex.add(languages().iter(), EntityType::Language)
                    .add(countries().iter(), EntityType::Country)
                    .add(capitals().iter(), EntityType::City);
            }
            DatasetName::SynTipr => {
                lex.add([ACADEMIC_NODE], EntityType::Academic)
                    .add([TIME_NODE], EntityType::Time)
                    .add(person_names().iter(), EntityType::Name)
                    .add(roles().iter(), EntityType::Role)
                    .with_years(FIRST_YEAR, LAST_YEAR);
            }
            DatasetName::WdMovies | DatasetName::WdArticles => return None,
        }
        Some(lex)
    }
}

pub fn parse_year(label: &str) -> Option<i32> {
    if label.is_empty() || !label.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    label.parse().ok()
}

/// Entity and relation labels of a synthetic dataset, in id order.
pub fn vocabulary_labels(name: DatasetName) -> Option<(Vec<String>, Vec<&'static str>)> {
    let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Some(match name {
        DatasetName::SynPaths => (owned(cities()), PATH_RELATIONS.to_vec()),
        DatasetName::SynTypes => {
            let mut e = owned(languages());
            e.extend(owned(countries()));
            e.extend(owned(capitals()));
            (e, TYPES_RELATIONS.to_vec())
        }
        DatasetName::SynTipr => {
            let mut e = vec![ACADEMIC_NODE.to_string(), TIME_NODE.to_string()];
            e.extend(owned(person_names()));
            e.extend(owned(roles()));
            e.extend(years().map(|y| y.to_string()));
            (e, TIPR_RELATIONS.to_vec())
        }
        DatasetName::WdMovies | DatasetName::WdArticles => return None,
    })
}

/// The sealed vocabulary of a synthetic dataset.
pub fn synthetic_vocabulary(name: DatasetName) -> Option<Vocabulary> {
    let (e, r) = vocabulary_labels(name)?;
    Some(Vocabulary::from_labels(e, r).expect("lexicon labels are unique").sealed())
}
