//! Content-addressed cache of ideal enumerations, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadfield::{ideals_from_csv, ideals_to_csv, Ideal, QuadField};

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Write through a sibling temp file and rename it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| io(&tmp, e))?;
        f.sync_all().map_err(|e| io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io(path, e))
}

/// Hex SHA-256 of the cache key (d_K, N_max).
pub fn cache_key(d_k: u64, n_max: u64) -> String {
    let mut h = Sha256::new();
    h.update(format!("ideals;d_K={d_k};Nmax={n_max}").as_bytes());
    hex::encode(h.finalize())
}

pub fn ideal_cache_path(dir: &Path, d_k: u64, n_max: u64) -> PathBuf {
    dir.join(format!("ideals-{}.csv", &cache_key(d_k, n_max)[..16]))
}

/// All integral ideals of norm ≤ n_max, from the cache when a valid entry
/// exists; a corrupt entry is recomputed and replaced.
pub fn cached_ideals(dir: &Path, field: &QuadField, n_max: u64) -> Result<Vec<Ideal>> {
    let path = ideal_cache_path(dir, field.d_k(), n_max);
    if let Ok(text) = fs::read_to_string(&path) {
        match ideals_from_csv(&text) {
            Ok(ids) => {
                log::debug!("ideal cache hit {}", path.display());
                return Ok(ids);
            }
            Err(e) => log::warn!("discarding corrupt cache entry {}: {e}", path.display()),
        }
    }
    let ids = field.enumerate_ideals(n_max, &Ideal::unit());
    write_atomic(&path, ideals_to_csv(&ids).as_bytes())?;
    log::debug!("ideal cache fill {}", path.display());
    Ok(ids)
}
