use std::path::Path;

use anyhow::Result;
use sgbench_core::io::{serialize_subgraphs, write_text};
use sgbench_core::{Subgraph, Vocabulary};

/// Writes sampled graphs in the subgraph file format. Empty samples have no
/// textual form; their number is recorded in a leading comment.
pub fn write_samples(path: &Path, samples: &[Subgraph], vocab: &Vocabulary) -> Result<()> {
    if let Some(dir) = path.parent() {
        crate::ensure_dir(dir)?;
    }
    let non_empty: Vec<Subgraph> = samples.iter().filter(|g| !g.is_empty()).cloned().collect();
    let mut text = format!("# {} samples, {} empty (omitted)\n", samples.len(), samples.len() - non_empty.len());
    text.push_str(&serialize_subgraphs(&non_empty, vocab)?);
    write_text(path, &text)?;
    Ok(())
}
