//! Fetching the released real-world datasets. This is the only command that
//! touches the network.
//!
//! The record's file list comes from the repository API. An archive whose
//! name mentions the dataset is extracted whole; a combined archive
//! contributes the entries under a directory named after the dataset. Entries
//! are flattened into `<cache>/<dataset>/`, which the loader reads by split
//! file name, and a `SHA256SUMS` lock is written so later loads can detect
//! tampering.

use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use md5::{Digest, Md5};
use serde_json::{json, Value};
use sgbench_core::io::write_text;
use sgbench_core::wd::{load_real_dataset, verify_checksums, write_checksums, CHECKSUM_FILE};
use sgbench_core::{CoreError, DatasetName};

use crate::exit::Usage;
use crate::opts::Opts;

pub const RECORD_ID: &str = "7824818";
pub const RECORD_API: &str = "https://zenodo.org/api/records/";

/// Lowercase alphanumerics only, so `wd-movies`, `wd_movies` and `WDMovies` agree.
fn squash(s: &str) -> String {
    s.chars().filter(char::is_ascii_alphanumeric).map(|c| c.to_ascii_lowercase()).collect()
}

fn mentions(path: &str, name: DatasetName) -> bool {
    squash(path).contains(&squash(name.as_str()))
}

pub fn cmd_download(opts: &Opts) -> Result<()> {
    let name = opts.dataset()?;
    if name.is_synthetic() {
        return Err(Usage(format!("{name} is synthetic; use `sgbench generate {name}`")).into());
    }
    let cache = opts.cache();
    let dir = cache.join(name.as_str());
    if dir.join(CHECKSUM_FILE).is_file() {
        verify_checksums(&dir)?;
        log::info!("{} already present and intact; nothing to fetch", dir.display());
    } else {
        fetch(name, &cache, &dir)?;
    }
    let bundle = load_real_dataset(name, &cache)?;
    let [train, valid, test] = bundle.split_sizes();
    println!(
        "{name}: {train}/{valid}/{test} train/valid/test graphs, {} entities, {} relations",
        bundle.vocabulary.num_entities(),
        bundle.vocabulary.num_relations()
    );
    Ok(())
}

fn fetch(name: DatasetName, cache: &Path, dir: &Path) -> Result<()> {
    let url = format!("{RECORD_API}{RECORD_ID}");
    log::info!("querying {url}");
    let record: Value = ureq::get(&url).call().with_context(|| format!("fetching {url}"))?.into_json()?;
    let files = record["files"].as_array().cloned().unwrap_or_default();
    let key = |f: &Value| f["key"].as_str().or_else(|| f["filename"].as_str()).unwrap_or_default().to_owned();
    let chosen = files
        .iter()
        .find(|f| mentions(&key(f), name))
        .or_else(|| files.iter().find(|f| key(f).ends_with(".zip")))
        .with_context(|| format!("record {RECORD_ID} lists no archive for {name}"))?;
    let file_name = key(chosen);
    let link = chosen["links"]["self"]
        .as_str()
        .or_else(|| chosen["links"]["download"].as_str())
        .context("archive entry has no download link")?;

    let downloads = cache.join("downloads");
    crate::ensure_dir(&downloads)?;
    let archive = downloads.join(&file_name);
    log::info!("downloading {link} to {}", archive.display());
    let md5 = download_to(link, &archive)?;
    if let Some(expected) = chosen["checksum"].as_str().and_then(|c| c.strip_prefix("md5:")) {
        if expected != md5 {
            fs::remove_file(&archive).ok();
            return Err(CoreError::Integrity(format!("{file_name}: md5 {md5}, record lists {expected}")).into());
        }
    }
    let whole = mentions(&file_name, name);
    let extracted = extract(&archive, dir, |entry| whole || mentions(entry, name))?;
    if extracted.is_empty() {
        bail!("{file_name} contains no files for {name}");
    }
    write_checksums(dir)?;
    let doc = json!({
        "command": "download",
        "build": crate::tool_info(),
        "record": RECORD_ID,
        "archive": { "name": file_name, "url": link, "md5": md5 },
        "files": extracted.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    write_text(&dir.join("manifest.json"), &serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn download_to(url: &str, path: &Path) -> Result<String> {
    let mut reader = ureq::get(url).call().with_context(|| format!("fetching {url}"))?.into_reader();
    let mut out = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut hasher = Md5::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        out.write_all(&buf[..n])?;
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Extracts the selected regular files of a zip archive into `dir`, dropping
/// their directory prefixes.
fn extract(archive: &Path, dir: &Path, select: impl Fn(&str) -> bool) -> Result<Vec<PathBuf>> {
    let mut zip = zip::ZipArchive::new(File::open(archive)?)?;
    crate::ensure_dir(dir)?;
    let mut written = Vec::new();
    for i in 0..zip.len() {
        let mut entry = zip.by_index(i)?;
        let Some(inner) = entry.enclosed_name() else { continue };
        let shown = inner.display().to_string();
        if entry.is_dir() || !select(&shown) {
            continue;
        }
        let Some(base) = inner.file_name() else { continue };
        let target = dir.join(base);
        if written.contains(&target) {
            bail!("archive has two files named {}", base.to_string_lossy());
        }
        io::copy(&mut entry, &mut File::create(&target)?)?;
        written.push(target);
    }
    Ok(written)
}
