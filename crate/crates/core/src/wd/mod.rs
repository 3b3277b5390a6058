//! Real-world dataset handling: instance records, frequency pruning,
//! vote-based splitting and loading of the released files.
//!
//! Instance records use the subgraph text format with a header line
//! `# instance <id>` opening each record:
//!
//! ```text
//! # instance Q1
//! _movie	has_director	Albert_Brooks
//! _movie	has_genre	comedy_film
//!
//! # instance Q2
//! ...
//! ```

mod load;
mod prune;
mod split;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{CoreError, Result};
use crate::vocab::{is_existential, normalize_label};

pub use load::{load_real_dataset, verify_checksums, write_checksums, CHECKSUM_FILE};
pub use prune::{prune, PrunePolicy};
pub use split::{vote_split, CoverageReport, SplitAssignment, VoteSplitConfig};

const INSTANCE_HEADER: &str = "# instance ";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelTriple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl LabelTriple {
    pub fn new(subject: impl Into<String>, relation: impl Into<String>, object: impl Into<String>) -> Self {
        Self { subject: subject.into(), relation: relation.into(), object: object.into() }
    }
}

/// One extracted instance (a movie or an article) with string labels, since
/// pruning rewrites labels before any vocabulary exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRecord {
    pub id: String,
    pub triples: Vec<LabelTriple>,
}

impl InstanceRecord {
    pub fn new(id: impl Into<String>, triples: impl IntoIterator<Item = (&'static str, &'static str, &'static str)>) -> Self {
        Self { id: id.into(), triples: triples.into_iter().map(|(s, r, o)| LabelTriple::new(s, r, o)).collect() }
    }

    /// Distinct node labels.
    pub fn nodes(&self) -> BTreeSet<&str> {
        self.triples.iter().flat_map(|t| [t.subject.as_str(), t.object.as_str()]).collect()
    }

    /// Distinct non-existential node labels, the entities that vote and count.
    pub fn entities(&self) -> BTreeSet<&str> {
        self.nodes().into_iter().filter(|n| !is_existential(n)).collect()
    }

    pub fn has_relation(&self, relation: &str) -> bool {
        self.triples.iter().any(|t| t.relation == relation)
    }
}

pub fn parse_instances(text: &str) -> Result<Vec<InstanceRecord>> {
    let mut out: Vec<InstanceRecord> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(id) = line.strip_prefix(INSTANCE_HEADER) {
            out.push(InstanceRecord { id: id.trim().to_owned(), triples: Vec::new() });
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let record = out
            .last_mut()
            .ok_or_else(|| CoreError::Parse { line: line_no, message: "triple before the first instance header".into() })?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, r, o] = fields[..] else {
            return Err(CoreError::Parse { line: line_no, message: format!("expected 3 tab-separated fields, got {}", fields.len()) });
        };
        let t = LabelTriple::new(normalize_label(s), normalize_label(r), normalize_label(o));
        if record.triples.contains(&t) {
            return Err(CoreError::DuplicateTriple { line: Some(line_no), triple: format!("({s} {r} {o})") });
        }
        record.triples.push(t);
    }
    Ok(out)
}

pub fn serialize_instances(instances: &[InstanceRecord]) -> String {
    let mut out = String::new();
    for (i, inst) in instances.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{INSTANCE_HEADER}{}", inst.id);
        for t in &inst.triples {
            let _ = writeln!(out, "{}\t{}\t{}", t.subject, t.relation, t.object);
        }
    }
    out
}
