//! Per-(ensemble, method, N) result cache. Each entry carries a checksum of
//! its own content; entries that fail to parse or verify are ignored and
//! recomputed. Writes go to a temporary file that is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bicubic_core::golden::sha256_hex;
use bicubic_core::{EnsembleId, Method};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::engines::method_name;

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    ensemble: String,
    colored: bool,
    method: Method,
    n: usize,
    count: String,
    sha256: String,
}

fn digest(id: EnsembleId, method: Method, n: usize, count: &str) -> String {
    sha256_hex(format!("{}|{}|{}|{}|{}", id.tag, id.colored, method_name(method), n, count).as_bytes())
}

pub enum Lookup {
    Hit(BigUint),
    Miss,
    /// Present but unreadable or failing its checksum.
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Cache> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn path(&self, id: EnsembleId, method: Method, n: usize) -> PathBuf {
        let family = if id.colored { "bicubic" } else { "cubic" };
        self.dir.join(format!("{}-{family}-{}-{n}.json", id.tag, method_name(method)))
    }

    pub fn get(&self, id: EnsembleId, method: Method, n: usize) -> Lookup {
        let path = self.path(id, method, n);
        let Ok(text) = fs::read_to_string(&path) else {
            return Lookup::Miss;
        };
        let entry: Entry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let same_key = entry.format == 1
            && entry.ensemble == id.tag.to_string()
            && entry.colored == id.colored
            && entry.method == method
            && entry.n == n;
        if !same_key || entry.sha256 != digest(id, method, n, &entry.count) {
            return Lookup::Corrupt(format!("{}: checksum mismatch", path.display()));
        }
        match entry.count.parse() {
            Ok(c) => Lookup::Hit(c),
            Err(_) => Lookup::Corrupt(format!("{}: count is not an integer", path.display())),
        }
    }

    pub fn put(&self, id: EnsembleId, method: Method, n: usize, count: &BigUint) -> Result<()> {
        let count = count.to_string();
        let entry = Entry {
            format: 1,
            ensemble: id.tag.to_string(),
            colored: id.colored,
            method,
            n,
            sha256: digest(id, method, n, &count),
            count,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
        tmp.persist(self.path(id, method, n))?;
        Ok(())
    }
}
