//! Verdict cache keyed by `(sha256 of forms file, field, B_K, norm bound)`.
//!
//! Layout: a plain-text `index.txt` with one `key file` line per entry, and
//! one JSON file of reports per entry.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::EliminationReport;

pub const CACHE_ENV: &str = "FERMAT_PP3_CACHE_DIR";
pub const DEFAULT_DIR_NAME: &str = ".fermat-pp3-cache";
const INDEX: &str = "index.txt";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub content_sha256: String,
    pub field: u32,
    pub b_k: u64,
    pub norm_bound: u64,
}

impl CacheKey {
    pub fn new(content: &[u8], field: u32, b_k: u64, norm_bound: u64) -> Self {
        CacheKey { content_sha256: sha256_hex(content), field, b_k, norm_bound }
    }

    pub fn id(&self) -> String {
        format!("{}-d{}-{}-{}", self.content_sha256, self.field, self.b_k, self.norm_bound)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct VerdictCache {
    dir: PathBuf,
}

impl VerdictCache {
    pub fn at(dir: impl Into<PathBuf>) -> Self {
        VerdictCache { dir: dir.into() }
    }

    /// `$FERMAT_PP3_CACHE_DIR` if set, else a hidden directory beside the forms file.
    pub fn for_forms_file(forms: &Path) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Self::at(dir),
            _ => {
                let parent = forms.parent().filter(|p| !p.as_os_str().is_empty());
                Self::at(parent.unwrap_or(Path::new(".")).join(DEFAULT_DIR_NAME))
            }
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_name(key: &CacheKey) -> String {
        format!("{}.json", key.id())
    }

    /// Cached reports, or `None` on a miss or unreadable entry.
    pub fn get(&self, key: &CacheKey) -> Option<Vec<EliminationReport>> {
        let index = fs::read_to_string(self.dir.join(INDEX)).ok()?;
        let id = key.id();
        let file = index.lines().find_map(|line| {
            let (k, f) = line.split_once(' ')?;
            (k == id).then(|| f.trim().to_string())
        })?;
        let body = fs::read_to_string(self.dir.join(file)).ok()?;
        serde_json::from_str(&body).ok()
    }

    pub fn put(&self, key: &CacheKey, reports: &[EliminationReport]) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let name = Self::entry_name(key);
        let body = serde_json::to_string_pretty(reports).map_err(io::Error::other)?;
        fs::write(self.dir.join(&name), body)?;
        let index_path = self.dir.join(INDEX);
        let id = key.id();
        let existing = fs::read_to_string(&index_path).unwrap_or_default();
        if existing.lines().any(|l| l.split_once(' ').map(|(k, _)| k) == Some(id.as_str())) {
            return Ok(());
        }
        let mut f = fs::OpenOptions::new().create(true).append(true).open(index_path)?;
        writeln!(f, "{id} {name}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eliminate::Verdict;
    use num_bigint::{BigInt, BigUint};

    fn sample() -> Vec<EliminationReport> {
        vec![EliminationReport {
            form_id: "a".into(),
            field: 7,
            level_exponent: 3,
            qf_poly: "x".into(),
            per_prime: vec![],
            c_f: BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap(),
            prime_divisors: vec![BigUint::from(2u32)],
            verdict: Verdict::Survivors { primes: vec![BigUint::from(44497u32)] },
        }]
    }

    #[test]
    fn round_trip_and_key_sensitivity() {
        let dir = tempfile::tempdir().unwrap();
        let cache = VerdictCache::at(dir.path());
        let key = CacheKey::new(b"file", 7, 199, 50);
        assert!(cache.get(&key).is_none());
        cache.put(&key, &sample()).unwrap();
        cache.put(&key, &sample()).unwrap();
        assert_eq!(cache.get(&key), Some(sample()));
        assert!(cache.get(&CacheKey::new(b"file", 7, 200, 50)).is_none());
        assert!(cache.get(&CacheKey::new(b"file", 7, 199, 40)).is_none());
        assert!(cache.get(&CacheKey::new(b"other", 7, 199, 50)).is_none());
        assert!(cache.get(&CacheKey::new(b"file", 19, 199, 50)).is_none());
        let index = fs::read_to_string(dir.path().join(INDEX)).unwrap();
        assert_eq!(index.lines().count(), 1);
    }

    #[test]
    fn sha_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
