//! Line-delimited JSON cache of exact invariants keyed by `(p, q, r)`.
//!
//! New entries are buffered and written on `flush`, which copies the file
//! with the additions to a temporary sibling and renames it into place.

use fig8::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Bumped whenever the invariant formulas change; older lines are ignored.
pub const CACHE_VERSION: u32 = 1;
const FILE_NAME: &str = "tau.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub p: i64,
    pub q: i64,
    pub r: u32,
    pub tau_re: f64,
    pub tau_im: f64,
    pub version: u32,
    /// Seconds since the Unix epoch.
    pub created: u64,
}

pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<(i64, i64, u32), CacheEntry>,
    pending: Vec<CacheEntry>,
    pub hits: usize,
}

impl Cache {
    /// Read the cache in `dir`; a missing file gives an empty cache.
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        let path = dir.join(FILE_NAME);
        let mut entries = BTreeMap::new();
        if let Ok(text) = std::fs::read_to_string(&path) {
            for line in text.lines() {
                if let Ok(e) = serde_json::from_str::<CacheEntry>(line) {
                    if e.version == CACHE_VERSION {
                        entries.insert((e.p, e.q, e.r), e);
                    }
                }
            }
        }
        Ok(Cache { path, entries, pending: Vec::new(), hits: 0 })
    }

    pub fn get(&mut self, p: i64, q: i64, r: u32) -> Option<Complex64> {
        let e = self.entries.get(&(p, q, r))?;
        self.hits += 1;
        Some(Complex64::new(e.tau_re, e.tau_im))
    }

    pub fn insert(&mut self, p: i64, q: i64, r: u32, tau: Complex64) {
        if self.entries.contains_key(&(p, q, r)) {
            return;
        }
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let e = CacheEntry { p, q, r, tau_re: tau.re, tau_im: tau.im, version: CACHE_VERSION, created };
        self.entries.insert((p, q, r), e.clone());
        self.pending.push(e);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Append pending entries through a temporary file and an atomic rename.
    pub fn flush(&mut self) -> std::io::Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let dir = self.path.parent().unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir)?;
        let mut text = std::fs::read_to_string(&self.path).unwrap_or_default();
        if !text.is_empty() && !text.ends_with('\n') {
            text.push('\n');
        }
        for e in &self.pending {
            text.push_str(&serde_json::to_string(e).expect("entry serializes"));
            text.push('\n');
        }
        let tmp = dir.join(format!(".{FILE_NAME}.{}.tmp", std::process::id()));
        {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &self.path)?;
        self.pending.clear();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let vals = [
            Complex64::new(0.1 + 0.2, -1.0 / 3.0),
            Complex64::new(f64::MIN_POSITIVE, 1e300),
            Complex64::new(-0.7163774152812262, std::f64::consts::PI),
            Complex64::new(0.38819660112501053, -0.5065553282342465),
        ];
        let mut c = Cache::open(dir.path()).unwrap();
        for (k, v) in vals.iter().enumerate() {
            c.insert(1, 1, 10 + k as u32, *v);
        }
        c.flush().unwrap();
        let mut back = Cache::open(dir.path()).unwrap();
        assert_eq!(back.len(), vals.len());
        for (k, v) in vals.iter().enumerate() {
            let got = back.get(1, 1, 10 + k as u32).unwrap();
            assert_eq!(got.re.to_bits(), v.re.to_bits());
            assert_eq!(got.im.to_bits(), v.im.to_bits());
        }
        assert_eq!(back.hits, vals.len());
    }

    #[test]
    fn appends_and_skips_foreign_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(FILE_NAME);
        std::fs::write(
            &path,
            "garbage\n{\"p\":1,\"q\":1,\"r\":5,\"tau_re\":1.0,\"tau_im\":0.0,\"version\":0,\"created\":0}\n",
        )
        .unwrap();
        let mut c = Cache::open(dir.path()).unwrap();
        assert_eq!(c.len(), 0);
        c.insert(2, 1, 7, Complex64::new(0.5, 0.25));
        c.flush().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("garbage\n"));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(Cache::open(dir.path()).unwrap().len(), 1);
    }
}
