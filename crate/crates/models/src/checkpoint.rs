//! Checkpoint container: an 8-byte magic, a little-endian `u32` format
//! version, a `u64` header length, a JSON header, then the parameter tensors
//! as little-endian `f64` in header order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::structure::{ModelSpec, Params, StructureModel};

pub const MAGIC: &[u8; 8] = b"SGBMODEL";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    spec: ModelSpec,
    tensor_lengths: [usize; 4],
    manifest: serde_json::Value,
}

pub fn save_checkpoint(path: &Path, model: &StructureModel, manifest: &serde_json::Value) -> Result<()> {
    let params = model.params();
    let header = Header {
        spec: model.spec().clone(),
        tensor_lengths: params.tensors().map(<[f64]>::len),
        manifest: manifest.clone(),
    };
    let json = serde_json::to_vec(&header)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut out = Vec::with_capacity(20 + json.len() + 8 * params.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for t in params.tensors() {
        for x in t {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(StructureModel, serde_json::Value)> {
    let bad = |message: &str| ModelError::Checkpoint { path: path.to_owned(), message: message.to_owned() };
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("not a model checkpoint"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported format version {version}")));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes")) as usize;
    let body = bytes.get(20..20 + len).ok_or_else(|| bad("truncated header"))?;
    let header: Header = serde_json::from_slice(body)?;
    let mut rest = &bytes[20 + len..];
    if rest.len() != 8 * header.tensor_lengths.iter().sum::<usize>() {
        return Err(bad("tensor data does not match the header"));
    }
    let mut read = |n: usize| -> Vec<f64> {
        let (head, tail) = rest.split_at(8 * n);
        rest = tail;
        head.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect()
    };
    let [e, r, eb, rb] = header.tensor_lengths;
    let params = Params { entity: read(e), relation: read(r), entity_bias: read(eb), relation_bias: read(rb) };
    let model = StructureModel::from_parts(header.spec, params).map_err(|e| bad(&e.to_string()))?;
    Ok((model, header.manifest))
}
