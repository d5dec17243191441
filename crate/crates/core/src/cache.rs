//! On-disk polynomial cache.
//!
//! Files are named `phi_<N>.txt` and `hclass_<D>.txt` and hold the canonical
//! text encodings from [`crate::poly`]. Writes go to a uniquely named temp
//! file in the same directory and are renamed into place, so readers never
//! observe a partial file. Unreadable or malformed entries are treated as
//! misses and recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use crate::error::Result;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "JCOVER_CACHE";

static DIR: RwLock<Option<PathBuf>> = RwLock::new(None);
static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Sets (or with `None`, disables) the process-wide cache directory,
/// overriding `$JCOVER_CACHE`.
pub fn configure(dir: Option<PathBuf>) {
    *DIR.write().unwrap_or_else(|e| e.into_inner()) = dir.or_else(|| Some(PathBuf::new()));
}

/// The active cache directory: an explicit [`configure`] call wins, then
/// `$JCOVER_CACHE`. Library users get no disk cache unless they opt in.
pub fn directory() -> Option<PathBuf> {
    let configured = DIR.read().unwrap_or_else(|e| e.into_inner()).clone();
    match configured {
        Some(p) if p.as_os_str().is_empty() => None,
        Some(p) => Some(p),
        None => std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from),
    }
}

/// `$JCOVER_CACHE`, else `$XDG_CACHE_HOME/jcover`, else `~/.cache/jcover`.
pub fn platform_default() -> Option<PathBuf> {
    let env = |k: &str| {
        std::env::var_os(k)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    };
    env(CACHE_ENV)
        .or_else(|| env("XDG_CACHE_HOME").map(|p| p.join("jcover")))
        .or_else(|| env("HOME").map(|p| p.join(".cache").join("jcover")))
}

pub fn phi_file_name(n: u64) -> String {
    format!("phi_{n}.txt")
}

pub fn hclass_file_name(disc: i64) -> String {
    format!("hclass_{disc}.txt")
}

/// Reads a cache entry from the active directory, `None` on any miss.
pub fn read(name: &str) -> Option<String> {
    fs::read_to_string(directory()?.join(name)).ok()
}

/// Stores a cache entry in the active directory; a no-op without one.
pub fn write(name: &str, contents: &str) -> Result<()> {
    match directory() {
        Some(dir) => write_atomic(&dir.join(name), contents),
        None => Ok(()),
    }
}

/// Writes `contents` to `path` via a temp file and rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("entry");
    let tmp = dir.join(format!(
        ".{file_name}.{}.{}.tmp",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
