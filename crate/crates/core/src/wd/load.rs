//! Loading of the released real-world datasets from a local cache.
//!
//! A dataset lives in `<cache>/<name>/`. The download command records a
//! `SHA256SUMS` lock of every file it fetched; when the lock exists the files
//! are checked against it before parsing.

use std::fs;
use std::path::Path;

use crate::dataset::{DatasetBundle, DatasetName};
use crate::error::{CoreError, Result};
use crate::io::{read_bundle, sha256_file};

pub const CHECKSUM_FILE: &str = "SHA256SUMS";

/// Writes a checksum lock covering every regular file in `dir`.
pub fn write_checksums(dir: &Path) -> Result<()> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n != CHECKSUM_FILE)
        .collect();
    names.sort();
    let mut out = String::new();
    for n in names {
        out.push_str(&format!("{}  {n}\n", sha256_file(&dir.join(&n))?));
    }
    fs::write(dir.join(CHECKSUM_FILE), out)?;
    Ok(())
}

/// Checks files against the lock. Returns `false` when there is no lock.
pub fn verify_checksums(dir: &Path) -> Result<bool> {
    let lock = dir.join(CHECKSUM_FILE);
    if !lock.is_file() {
        return Ok(false);
    }
    for (i, line) in fs::read_to_string(&lock)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (expected, name) = line
            .split_once("  ")
            .ok_or_else(|| CoreError::Parse { line: i + 1, message: format!("malformed {CHECKSUM_FILE} entry") })?;
        let path = dir.join(name.trim());
        if !path.is_file() {
            return Err(CoreError::Integrity(format!("{} listed in {CHECKSUM_FILE} is missing", path.display())));
        }
        let actual = sha256_file(&path)?;
        if actual != expected.trim() {
            return Err(CoreError::Integrity(format!("checksum mismatch for {}: expected {expected}, got {actual}", path.display())));
        }
    }
    Ok(true)
}

/// Loads a released dataset and checks its split sizes against the
/// published ones.
pub fn load_real_dataset(name: DatasetName, cache_dir: &Path) -> Result<DatasetBundle> {
    if name.is_synthetic() {
        return Err(CoreError::Config(format!("{name} is synthetic; generate it instead")));
    }
    let dir = cache_dir.join(name.as_str());
    if !dir.is_dir() {
        return Err(CoreError::MissingData {
            path: dir,
            hint: format!("fetch it with `sgbench download {name}` or unpack the released archive there"),
        });
    }
    if !verify_checksums(&dir)? {
        log::warn!("{} has no {CHECKSUM_FILE}; skipping integrity check", dir.display());
    }
    let bundle = read_bundle(&dir, name)?;
    let s = name.stats();
    let sizes = bundle.split_sizes();
    if sizes != [s.train, s.valid, s.test] {
        return Err(CoreError::Integrity(format!(
            "{name} split sizes {sizes:?} differ from the published {:?}",
            [s.train, s.valid, s.test]
        )));
    }
    let (e, r) = (bundle.vocabulary.num_entities(), bundle.vocabulary.num_relations());
    if (e, r) != (s.entities, s.relations) {
        log::warn!("{name}: {e} entities / {r} relations, published {} / {}", s.entities, s.relations);
    }
    Ok(bundle)
}
