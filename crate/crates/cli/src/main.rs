//! `sgbench`: generate, verify, train, compress, sample and download
//! subgraph-inference benchmarks.

mod download;
mod exit;
mod opts;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;
use sgbench_core::io::{find_file, parse_subgraph_file, read_bundle, read_text, sha256_file, write_bundle, write_text};
use sgbench_core::synth::{generate, GenerationManifest, GeneratorConfig, ManifestFile};
use sgbench_core::{verify, DatasetBundle, DatasetName, RuleSet, Split};
use sgbench_models::checkpoint::{load_checkpoint, save_checkpoint};
use sgbench_models::eval::SamplingSetting;
use sgbench_models::{compression_report, evaluate_sampling, train, EntityMode, EntityModel, ModelKind, StructureModel, TrainConfig};

use crate::exit::{exit_code, Contract, Usage};
use crate::opts::{Cli, Command, Opts};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let opts = cli.opts.resolve()?;
    if let Some(n) = opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Generate { dataset } => cmd_generate(&opts.with_dataset(dataset)?),
        Command::Verify { args } => cmd_verify(&opts, args),
        Command::Train { dataset, model } => cmd_train(&opts.with_dataset(dataset)?.with_model(model)?),
        Command::Compress { dataset, model } => cmd_compress(&opts.with_dataset(dataset)?.with_model(model)?),
        Command::Sample { dataset, model } => cmd_sample(&opts.with_dataset(dataset)?.with_model(model)?),
        Command::Download { dataset } => download::cmd_download(&opts.with_dataset(dataset)?),
    }
}

fn tool_info() -> serde_json::Value {
    json!({ "tool": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") })
}

fn hash_files(paths: &[PathBuf]) -> Result<Vec<ManifestFile>> {
    paths
        .iter()
        .map(|p| Ok(ManifestFile { path: p.display().to_string(), sha256: sha256_file(p)? }))
        .collect()
}

fn cmd_generate(opts: &Opts) -> Result<()> {
    let name = opts.dataset()?;
    if !name.is_synthetic() {
        return Err(Usage(format!("{name} is not synthetic; use `sgbench download {name}`")).into());
    }
    let defaults = GeneratorConfig::new(name);
    let mut config = defaults.clone().with_counts(
        opts.train.unwrap_or(defaults.train),
        opts.valid.unwrap_or(defaults.valid),
        opts.test.unwrap_or(defaults.test),
    );
    if let Some(seed) = opts.seed {
        config = config.with_seed(seed);
    }
    let out = opts.out.clone().unwrap_or_else(|| opts.cache().join(name.as_str()));
    let bundle = generate(&config)?;
    let files = write_bundle(&bundle, &out).with_context(|| format!("writing {}", out.display()))?;
    let manifest = GenerationManifest::new(&config, &bundle, hash_files(&files)?);
    let doc = json!({ "command": "generate", "build": tool_info(), "options": opts, "generation": manifest });
    write_text(&out.join("manifest.json"), &serde_json::to_string_pretty(&doc)?)?;
    println!("{name}: wrote {:?} train/valid/test graphs to {}", bundle.split_sizes(), out.display());
    Ok(())
}

/// First and last line of every subgraph in a file, following the parser's rules.
fn graph_line_ranges(text: &str) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            ranges.extend(current.take());
        } else if !line.starts_with('#') {
            let r = current.get_or_insert((i + 1, i + 1));
            r.1 = i + 1;
        }
    }
    ranges.extend(current);
    ranges
}

fn cmd_verify(opts: &Opts, args: Vec<String>) -> Result<()> {
    let mut args = args.into_iter().peekable();
    let name = match opts.dataset {
        Some(d) => d,
        None => match args.peek().and_then(|a| a.parse::<DatasetName>().ok()) {
            Some(d) => {
                args.next();
                d
            }
            None => return Err(Usage("verify needs a dataset (positional or --dataset)".into()).into()),
        },
    };
    let mut files: Vec<PathBuf> = args.map(PathBuf::from).collect();
    if files.is_empty() {
        let dir = opts.data_dir(name);
        files = Split::ALL
            .iter()
            .filter_map(|s| find_file(&dir, &[&sgbench_core::io::split_file_name(*s)]))
            .collect();
        if files.is_empty() {
            return Err(sgbench_core::CoreError::MissingData { path: dir, hint: "no split files to verify".into() }.into());
        }
    }
    let rules = RuleSet::for_dataset(name);
    let mut summaries = Vec::new();
    let mut all_valid = true;
    for path in &files {
        let text = read_text(path).with_context(|| format!("reading {}", path.display()))?;
        let (graphs, vocab) = parse_subgraph_file(&text, None).with_context(|| format!("parsing {}", path.display()))?;
        let ranges = graph_line_ranges(&text);
        let reports: Vec<_> = {
            use rayon::prelude::*;
            graphs.par_iter().map(|g| verify(g, &vocab, &rules)).collect()
        };
        let valid = reports.iter().filter(|r| r.valid).count();
        let pct = if graphs.is_empty() { 100.0 } else { 100.0 * valid as f64 / graphs.len() as f64 };
        println!("{}: {} graphs, {valid} valid ({pct:.2}%)", path.display(), graphs.len());
        let mut shown = Vec::new();
        for (i, r) in reports.iter().enumerate().filter(|(_, r)| !r.valid).take(10) {
            let (a, b) = ranges[i];
            for v in &r.violations {
                println!("  lines {a}-{b} (graph {i}): {}\t{}", v.rule, v.witness);
                shown.push(json!({ "graph": i, "lines": [a, b], "rule": v.rule, "witness": v.witness }));
            }
        }
        all_valid &= valid == graphs.len();
        summaries.push(json!({
            "file": path.display().to_string(),
            "sha256": sha256_file(path)?,
            "graphs": graphs.len(),
            "valid": valid,
            "first_violations": shown,
        }));
    }
    if let Some(out) = &opts.out {
        let doc = json!({ "command": "verify", "build": tool_info(), "dataset": name, "options": opts, "files": summaries });
        write_text(out, &serde_json::to_string_pretty(&doc)?)?;
    }
    if all_valid {
        Ok(())
    } else {
        Err(Contract("some graphs violate the rule set".into()).into())
    }
}

/// Loads the dataset: a data directory when present, otherwise synthetic
/// data is regenerated in memory with the default configuration.
fn load_data(opts: &Opts, name: DatasetName) -> Result<(DatasetBundle, serde_json::Value)> {
    let dir = opts.data_dir(name);
    let split_files: Vec<PathBuf> = ["train.tsv", "valid.tsv", "test.tsv", "entities.txt", "relations.txt"]
        .iter()
        .filter_map(|f| find_file(&dir, &[f]))
        .collect();
    if !name.is_synthetic() && opts.data.is_none() {
        let bundle = sgbench_core::wd::load_real_dataset(name, &opts.cache())?;
        return Ok((bundle, json!({ "dir": dir.display().to_string(), "files": hash_files(&split_files)? })));
    }
    if find_file(&dir, &["train.tsv", "train.txt"]).is_some() {
        let bundle = read_bundle(&dir, name).with_context(|| format!("reading {}", dir.display()))?;
        return Ok((bundle, json!({ "dir": dir.display().to_string(), "files": hash_files(&split_files)? })));
    }
    if opts.data.is_some() || !name.is_synthetic() {
        return Err(sgbench_core::CoreError::MissingData { path: dir, hint: "no dataset files found".into() }.into());
    }
    log::info!("no generated data in {}; regenerating {name} in memory", dir.display());
    let config = GeneratorConfig::new(name);
    let bundle = generate(&config)?;
    let provenance = json!({ "regenerated": GenerationManifest::new(&config, &bundle, Vec::new()) });
    Ok((bundle, provenance))
}

fn train_config(opts: &Opts, name: DatasetName, kind: ModelKind) -> TrainConfig {
    let mut c = TrainConfig::defaults(name, kind);
    c.epochs = opts.epochs.unwrap_or(c.epochs);
    c.batch_size = opts.batch.unwrap_or(c.batch_size);
    c.dim = opts.dim.unwrap_or(c.dim);
    c.lr = opts.lr.unwrap_or(c.lr);
    c.biases = opts.biases.unwrap_or(c.biases);
    c.init = opts.init.unwrap_or(c.init);
    c.patience = opts.patience.unwrap_or(c.patience);
    c.seed = opts.seed.unwrap_or(c.seed);
    c.valid_limit = opts.valid_limit.or(c.valid_limit);
    c
}

fn default_checkpoint(opts: &Opts, name: DatasetName, kind: ModelKind) -> PathBuf {
    opts.cache().join("models").join(format!("{name}-{kind}.ckpt"))
}

fn cmd_train(opts: &Opts) -> Result<()> {
    let (name, kind) = (opts.dataset()?, opts.model()?);
    if kind == ModelKind::Random {
        return Err(Usage("the random baseline has no parameters to train".into()).into());
    }
    let (bundle, data) = load_data(opts, name)?;
    let config = train_config(opts, name, kind);
    let outcome = train(&bundle, kind, &config)?;
    let path = opts.out.clone().unwrap_or_else(|| default_checkpoint(opts, name, kind));
    let manifest = json!({
        "command": "train",
        "build": tool_info(),
        "dataset": name,
        "model": kind,
        "train_config": config,
        "data": data,
        "best_epoch": outcome.best_epoch,
        "steps": outcome.steps,
        "history": outcome.history,
    });
    save_checkpoint(&path, &outcome.model, &manifest)?;
    let best = outcome.history.iter().find(|r| r.epoch == outcome.best_epoch).map(|r| r.valid_bits);
    println!(
        "{name} {kind}: best epoch {} (valid {:.2} bits/graph), checkpoint {}",
        outcome.best_epoch,
        best.unwrap_or(f64::NAN),
        path.display()
    );
    Ok(())
}

/// The structure model named by the options: the random baseline, an
/// explicit checkpoint, or the default checkpoint of the dataset/model pair.
fn structure_model(opts: &Opts, bundle: &DatasetBundle) -> Result<(StructureModel, serde_json::Value)> {
    let (n_e, n_r) = (bundle.vocabulary.num_entities(), bundle.vocabulary.num_relations());
    if opts.checkpoint.is_none() && opts.model == Some(ModelKind::Random) {
        return Ok((StructureModel::random(n_e, n_r), json!("random")));
    }
    let path = match (&opts.checkpoint, opts.model) {
        (Some(p), _) => p.clone(),
        (None, Some(kind)) => default_checkpoint(opts, bundle.name, kind),
        (None, None) => return Err(Usage("give --model or --checkpoint".into()).into()),
    };
    if !path.is_file() {
        return Err(sgbench_core::CoreError::MissingData {
            path,
            hint: "train a model first with `sgbench train`".into(),
        }
        .into());
    }
    let (model, _) = load_checkpoint(&path)?;
    if model.spec().num_entities != n_e || model.spec().num_relations != n_r {
        return Err(sgbench_core::CoreError::Integrity(format!(
            "{} was trained on a vocabulary of {} entities / {} relations, the data has {n_e} / {n_r}",
            path.display(),
            model.spec().num_entities,
            model.spec().num_relations
        ))
        .into());
    }
    Ok((model, json!({ "checkpoint": path.display().to_string(), "sha256": sha256_file(&path)? })))
}

fn entity_model(opts: &Opts, bundle: &DatasetBundle, kind: ModelKind) -> EntityModel {
    let n = bundle.vocabulary.num_entities();
    if kind == ModelKind::Random {
        EntityModel::random(n)
    } else {
        EntityModel::fit(&bundle.train, n, opts.entity_mode.unwrap_or(EntityMode::Slot), None)
    }
}

fn cmd_compress(opts: &Opts) -> Result<()> {
    let name = opts.dataset()?;
    let (bundle, data) = load_data(opts, name)?;
    let (sm, source) = structure_model(opts, &bundle)?;
    let em = entity_model(opts, &bundle, sm.kind());
    let split = opts.split.unwrap_or(Split::Test);
    let report = compression_report(&bundle, split, &em, &sm)?;
    println!("{}", sgbench_models::CompressionReport::HEADER);
    println!("{}", report.row());
    if let Some(out) = &opts.out {
        let doc = json!({
            "command": "compress",
            "build": tool_info(),
            "options": opts,
            "data": data,
            "structure_model": source,
            "report": report,
        });
        write_text(out, &serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(())
}

fn cmd_sample(opts: &Opts) -> Result<()> {
    let name = opts.dataset()?;
    let (bundle, data) = load_data(opts, name)?;
    let (sm, source) = structure_model(opts, &bundle)?;
    let em = entity_model(opts, &bundle, sm.kind());
    let settings = match opts.setting {
        Some(s) => vec![s],
        None => SamplingSetting::ALL.to_vec(),
    };
    let (n, seed) = (opts.samples.unwrap_or(10_000), opts.seed.unwrap_or(42));
    println!("{}", sgbench_models::SampleMetrics::HEADER);
    let mut results = Vec::new();
    for setting in settings {
        let run = evaluate_sampling(&bundle, &em, &sm, setting, n, seed)?;
        println!("{}", run.metrics.row(setting, name, sm.kind()));
        let mut entry = json!({ "setting": setting, "metrics": run.metrics });
        if let Some(out) = &opts.out {
            let dump = out.join(format!("samples-{setting}.tsv"));
            report::write_samples(&dump, &run.samples, &bundle.vocabulary)?;
            entry["samples"] = json!({ "file": dump.display().to_string(), "sha256": sha256_file(&dump)? });
        }
        results.push(entry);
    }
    if let Some(out) = &opts.out {
        let doc = json!({
            "command": "sample",
            "build": tool_info(),
            "options": opts,
            "data": data,
            "structure_model": source,
            "samples": n,
            "seed": seed,
            "results": results,
        });
        write_text(&out.join("manifest.json"), &serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(())
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
