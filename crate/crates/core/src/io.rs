//! Text formats: tab-separated subgraph files, `id<TAB>label` sidecar maps and
//! dataset directories. Files ending in `.gz` (or starting with the gzip magic
//! bytes) are decompressed transparently.
//!
//! Subgraph file layout: one `subject<TAB>relation<TAB>object` line per
//! triple; subgraphs are separated by a single blank line. Lines beginning
//! with `#` are comments.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use sha2::{Digest, Sha256};

use crate::dataset::{DatasetBundle, DatasetName, Split};
use crate::error::{CoreError, Result};
use crate::graph::{Subgraph, Triple};
use crate::vocab::{normalize_label, Vocabulary};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Parses a subgraph file, extending `vocabulary` (or a fresh one) with any new
/// labels. A sealed vocabulary turns unknown labels into errors.
pub fn parse_subgraph_file(text: &str, vocabulary: Option<Vocabulary>) -> Result<(Vec<Subgraph>, Vocabulary)> {
    let mut vocab = vocabulary.unwrap_or_default();
    let mut graphs = Vec::new();
    let mut current: Option<Subgraph> = None;

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if let Some(g) = current.take() {
                graphs.push(g);
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let triple = parse_triple_line(line, lineno, &mut vocab)?;
        let g = current.get_or_insert_with(Subgraph::empty);
        if !g.push(triple) {
            return Err(CoreError::DuplicateTriple { line: Some(lineno), triple: line.to_owned() });
        }
    }
    if let Some(g) = current {
        graphs.push(g);
    }
    Ok((graphs, vocab))
}

fn parse_triple_line(line: &str, lineno: usize, vocab: &mut Vocabulary) -> Result<Triple> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [s, r, o] = fields.as_slice() else {
        return Err(CoreError::Parse {
            line: lineno,
            message: format!("expected 3 tab-separated fields, found {}", fields.len()),
        });
    };
    let labels = [s, r, o].map(|f| normalize_label(f));
    if labels.iter().any(String::is_empty) {
        return Err(CoreError::Parse { line: lineno, message: "empty field".into() });
    }
    let at_line = |e: CoreError| match e {
        CoreError::UnknownLabel { kind, label } => {
            CoreError::Parse { line: lineno, message: format!("unknown {kind} label `{label}`") }
        }
        other => other,
    };
    Ok(Triple::new(
        vocab.intern_entity(&labels[0]).map_err(at_line)?,
        vocab.intern_relation(&labels[1]).map_err(at_line)?,
        vocab.intern_entity(&labels[2]).map_err(at_line)?,
    ))
}

/// Serializes subgraphs in the layout accepted by [`parse_subgraph_file`].
/// Empty subgraphs have no textual representation and are rejected.
pub fn serialize_subgraphs(graphs: &[Subgraph], vocab: &Vocabulary) -> Result<String> {
    let mut out = String::new();
    for (i, g) in graphs.iter().enumerate() {
        if g.is_empty() {
            return Err(CoreError::Integrity(format!("subgraph #{i} is empty and cannot be serialized")));
        }
        if i > 0 {
            out.push('\n');
        }
        for t in g.triples() {
            t.check_bounds(vocab)?;
            out.push_str(vocab.entity_label(t.subject));
            out.push('\t');
            out.push_str(vocab.relation_label(t.relation));
            out.push('\t');
            out.push_str(vocab.entity_label(t.object));
            out.push('\n');
        }
    }
    Ok(out)
}

/// Reads a whole file as UTF-8, gunzipping when needed.
pub fn read_text(path: &Path) -> Result<String> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    if raw.starts_with(&GZIP_MAGIC) {
        let mut text = String::new();
        MultiGzDecoder::new(raw.as_slice()).read_to_string(&mut text)?;
        Ok(text)
    } else {
        String::from_utf8(raw).map_err(|e| CoreError::Integrity(format!("{}: not UTF-8 ({e})", path.display())))
    }
}

/// Writes text, gzip-compressing when the path ends in `.gz`.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let file = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(text.as_bytes())?;
        enc.finish()?.flush()?;
    } else {
        let mut file = file;
        file.write_all(text.as_bytes())?;
        file.flush()?;
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Parses an `id<TAB>label` map. Ids must be dense `0..n` (any line order).
pub fn parse_id_map(text: &str) -> Result<Vec<String>> {
    let mut entries: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| CoreError::Parse {
            line: i + 1,
            message: "expected `id<TAB>label`".into(),
        })?;
        let id = id.trim().parse::<usize>().map_err(|e| CoreError::Parse { line: i + 1, message: format!("bad id: {e}") })?;
        entries.push((id, normalize_label(label)));
    }
    entries.sort_by_key(|(id, _)| *id);
    for (expected, (id, _)) in entries.iter().enumerate() {
        if *id != expected {
            return Err(CoreError::Integrity(format!("id map is not dense: expected id {expected}, found {id}")));
        }
    }
    Ok(entries.into_iter().map(|(_, l)| l).collect())
}

pub fn serialize_id_map(labels: &[String]) -> String {
    labels.iter().enumerate().map(|(i, l)| format!("{i}\t{l}\n")).collect()
}

pub const ENTITIES_FILE: &str = "entities.txt";
pub const RELATIONS_FILE: &str = "relations.txt";

pub fn split_file_name(split: Split) -> String {
    format!("{}.tsv", split.as_str())
}

/// Writes `train.tsv`, `valid.tsv`, `test.tsv` and the id maps into `dir`.
pub fn write_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for split in Split::ALL {
        let path = dir.join(split_file_name(split));
        write_text(&path, &serialize_subgraphs(bundle.split(split), &bundle.vocabulary)?)?;
        written.push(path);
    }
    let ents = dir.join(ENTITIES_FILE);
    write_text(&ents, &serialize_id_map(bundle.vocabulary.entity_labels()))?;
    let rels = dir.join(RELATIONS_FILE);
    write_text(&rels, &serialize_id_map(bundle.vocabulary.relation_labels()))?;
    written.extend([ents, rels]);
    Ok(written)
}

/// Finds the first existing file among `candidates` (each also tried with `.gz`).
pub fn find_file(dir: &Path, candidates: &[&str]) -> Option<PathBuf> {
    candidates.iter().find_map(|name| {
        let plain = dir.join(name);
        if plain.is_file() {
            return Some(plain);
        }
        let gz = dir.join(format!("{name}.gz"));
        gz.is_file().then_some(gz)
    })
}

fn split_candidates(split: Split) -> &'static [&'static str] {
    match split {
        Split::Train => &["train.tsv", "train_split.tsv", "train.txt"],
        Split::Valid => &["valid.tsv", "val.tsv", "val_split.tsv", "valid_split.tsv", "validation.tsv", "valid.txt"],
        Split::Test => &["test.tsv", "test_split.tsv", "test.txt"],
    }
}

/// Reads a dataset directory. When id maps are present the vocabulary is taken
/// from them and sealed; otherwise it is built from the split files in
/// train → valid → test order.
pub fn read_bundle(dir: &Path, name: DatasetName) -> Result<DatasetBundle> {
    let mut vocab = match (find_file(dir, &[ENTITIES_FILE]), find_file(dir, &[RELATIONS_FILE])) {
        (Some(e), Some(r)) => {
            Vocabulary::from_labels(parse_id_map(&read_text(&e)?)?, parse_id_map(&read_text(&r)?)?)?.sealed()
        }
        _ => Vocabulary::new(),
    };
    let mut splits: [Vec<Subgraph>; 3] = Default::default();
    for split in Split::ALL {
        let path = find_file(dir, split_candidates(split)).ok_or_else(|| CoreError::MissingData {
            path: dir.join(split_file_name(split)),
            hint: format!("no {split} split file found"),
        })?;
        let text = read_text(&path)?;
        let (graphs, v) = parse_subgraph_file(&text, Some(vocab)).map_err(|e| match e {
            CoreError::Parse { line, message } => {
                CoreError::Parse { line, message: format!("{}: {message}", path.display()) }
            }
            other => other,
        })?;
        vocab = v;
        splits[split.index()] = graphs;
    }
    let [train, valid, test] = splits;
    Ok(DatasetBundle { name, vocabulary: vocab, train, valid, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PATHS_EXAMPLE: &str = "Nieuwegein\tdrive_to\tLelystad\nLelystad\tdrive_to\tIJmuiden\nIJmuiden\tcycle_to\tZaanstad\n";

    #[test]
    fn empty_stream_yields_nothing() {
        let vocab = Vocabulary::from_labels(["a"], ["r"]).unwrap();
        let (graphs, v) = parse_subgraph_file("", Some(vocab.clone())).unwrap();
        assert!(graphs.is_empty());
        assert_eq!(v, vocab);
    }

    #[test]
    fn parses_example_path_graph() {
        let (graphs, vocab) = parse_subgraph_file(PATHS_EXAMPLE, None).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].len(), 3);
        assert_eq!(vocab.num_entities(), 4);
        assert_eq!(vocab.relation_labels(), ["drive_to", "cycle_to"]);
    }

    #[test]
    fn blank_line_separates_subgraphs_and_round_trips() {
        let text = "a\tr\tb\n\nc\tr\td\n";
        let (graphs, vocab) = parse_subgraph_file(text, None).unwrap();
        assert_eq!(graphs.len(), 2);
        assert!(graphs.iter().all(|g| g.len() == 1));
        assert_eq!(serialize_subgraphs(&graphs, &vocab).unwrap(), text);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_subgraph_file("a\tr\tb\na\tr\n", None).unwrap_err();
        assert!(matches!(err, CoreError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_triple_is_integrity_error() {
        let err = parse_subgraph_file("a\tr\tb\na\tr\tb\n", None).unwrap_err();
        assert!(matches!(err, CoreError::DuplicateTriple { line: Some(2), .. }), "{err}");
        // the same triple in two different subgraphs is fine
        assert!(parse_subgraph_file("a\tr\tb\n\na\tr\tb\n", None).is_ok());
    }

    #[test]
    fn sealed_vocabulary_lookup_error() {
        let vocab = Vocabulary::from_labels(["a", "b"], ["r"]).unwrap().sealed();
        let err = parse_subgraph_file("a\tr\tz\n", Some(vocab)).unwrap_err();
        assert!(matches!(err, CoreError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn whitespace_in_labels_becomes_underscore() {
        let (_, vocab) = parse_subgraph_file("Budapest\tcould_be_part_of\tUnited Kingdom\n", None).unwrap();
        assert!(vocab.entity_id("United_Kingdom").is_some());
    }

    #[test]
    fn id_map_round_trip_and_density() {
        let labels = vec!["x".to_string(), "_movie".to_string()];
        assert_eq!(parse_id_map(&serialize_id_map(&labels)).unwrap(), labels);
        assert!(parse_id_map("0\ta\n2\tb\n").is_err());
        assert_eq!(parse_id_map("1\tb\n0\ta\n").unwrap(), ["a", "b"]);
    }

    #[test]
    fn gzip_is_transparent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.tsv.gz");
        write_text(&path, PATHS_EXAMPLE).unwrap();
        assert_eq!(fs::read(&path).unwrap()[..2], GZIP_MAGIC);
        assert_eq!(read_text(&path).unwrap(), PATHS_EXAMPLE);
    }

    #[test]
    fn bundle_directory_round_trip() {
        let (graphs, vocab) = parse_subgraph_file("a\tr\tb\n\nb\tq\tc\n\nc\tr\ta\n", None).unwrap();
        let bundle = DatasetBundle {
            name: DatasetName::SynPaths,
            vocabulary: vocab.sealed(),
            train: vec![graphs[0].clone()],
            valid: vec![graphs[1].clone()],
            test: vec![graphs[2].clone()],
        };
        let dir = tempfile::tempdir().unwrap();
        write_bundle(&bundle, dir.path()).unwrap();
        assert_eq!(read_bundle(dir.path(), DatasetName::SynPaths).unwrap(), bundle);
    }

    fn label() -> impl Strategy<Value = String> {
        "[A-Za-z_][A-Za-z0-9_]{0,6}"
    }

    proptest! {
        #[test]
        fn serialize_parse_serialize_is_identity(
            graphs in prop::collection::vec(
                prop::collection::btree_set((label(), label(), label()), 1..6), 0..6)
        ) {
            let mut text = String::new();
            for (i, g) in graphs.iter().enumerate() {
                if i > 0 { text.push('\n'); }
                for (s, r, o) in g {
                    text.push_str(&format!("{s}\t{r}\t{o}\n"));
                }
            }
            let (parsed, vocab) = parse_subgraph_file(&text, None).unwrap();
            prop_assert_eq!(parsed.len(), graphs.len());
            prop_assert_eq!(serialize_subgraphs(&parsed, &vocab).unwrap(), text);
        }
    }
}
