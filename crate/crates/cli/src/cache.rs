//! Betti rows, optionally cached on disk under `$CONFSPACE_CACHE_DIR`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use confspace::ce::CeEngine;
use confspace::model::{serialize_model, CohomologyModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

pub const CACHE_ENV: &str = "CONFSPACE_CACHE_DIR";

/// One weight: raw-degree Betti numbers and the top CE degree with chains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub k: usize,
    pub top: Option<usize>,
    pub raw: BTreeMap<usize, usize>,
}

fn key(model_json: &str, variant: &str, k: usize) -> String {
    let mut h = Sha256::new();
    h.update(model_json.as_bytes());
    h.update(b"\0");
    h.update(variant.as_bytes());
    h.update(b"\0");
    h.update(k.to_le_bytes());
    hex::encode(h.finalize())
}

fn load(path: &Path, k: usize) -> Option<Row> {
    let text = std::fs::read_to_string(path).ok()?;
    let row: Row = serde_json::from_str(&text).ok()?;
    (row.k == k).then_some(row)
}

fn compute(engine: &CeEngine, k: usize) -> Result<Row, Failure> {
    let slice = engine.slice(k)?;
    Ok(Row {
        k,
        top: slice.max_degree(),
        raw: slice.betti_raw(engine.exec()),
    })
}

/// Rows for `ks` in order. Unreadable cache entries are recomputed; write
/// failures only cost the cache.
pub fn betti_rows(engine: &CeEngine, model: &CohomologyModel, ks: &[usize]) -> Result<Vec<Row>, Failure> {
    let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()).map(PathBuf::from) else {
        return engine.exec().try_map(ks, |&k| compute(engine, k));
    };
    let model_json = serialize_model(model).map_err(|e| Failure::Invalid(e.to_string()))?;
    let variant = engine.lie_model().variant.to_string();
    let paths: Vec<PathBuf> = ks
        .iter()
        .map(|&k| dir.join(format!("{}.json", key(&model_json, &variant, k))))
        .collect();
    let items: Vec<(usize, &PathBuf)> = ks.iter().copied().zip(&paths).collect();
    let rows = engine.exec().try_map(&items, |&(k, path)| match load(path, k) {
        Some(row) => Ok::<Row, Failure>(row),
        None => {
            let row = compute(engine, k)?;
            if std::fs::create_dir_all(&dir).is_ok() {
                let text = serde_json::to_string(&row).expect("rows serialise");
                let _ = std::fs::write(path, text);
            }
            Ok(row)
        }
    })?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_separate_inputs() {
        let a = key("{}", "standard", 3);
        assert_eq!(a.len(), 64);
        assert_eq!(a, key("{}", "standard", 3));
        assert_ne!(a, key("{}", "standard", 4));
        assert_ne!(a, key("{}", "relative", 3));
        assert_ne!(a, key("{ }", "standard", 3));
    }
}
