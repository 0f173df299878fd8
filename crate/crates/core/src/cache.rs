//! Content-addressed disk cache: one JSON file per key, written to a
//! temporary file and renamed into place. Keys are content hashes, so
//! collisions are impossible by construction and last-write-wins races are
//! harmless (both writers carry the same value in deterministic runs).

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A stored cache value with its key echoed back and a creation timestamp.
/// Entries are immutable once written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub value: serde_json::Value,
    pub created_at: u64,
}

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<serde_json::Value> {
        let raw = std::fs::read_to_string(self.path_for(key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&raw).ok()?;
        Some(entry.value)
    }

    pub fn put(&self, key: &str, value: serde_json::Value) {
        let entry = CacheEntry {
            key: key.to_string(),
            value,
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let Ok(raw) = serde_json::to_vec(&entry) else { return };
        let final_path = self.path_for(key);
        // Unique temp name per writer; rename is atomic and last-write-wins
        // is harmless because values are deterministic functions of keys.
        static WRITER: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
        let writer = WRITER.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let tmp_path = self
            .dir
            .join(format!(".{key}.{}.{writer}.tmp", std::process::id()));
        if std::fs::write(&tmp_path, raw).is_ok() {
            let _ = std::fs::rename(&tmp_path, &final_path);
        }
    }

    pub fn get_typed<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        serde_json::from_value(self.get(key)?).ok()
    }

    pub fn put_typed<T: Serialize>(&self, key: &str, value: &T) {
        if let Ok(v) = serde_json::to_value(value) {
            self.put(key, v);
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.path_for(key).exists()
    }
}

/// Hash a namespaced payload into a cache key.
pub fn content_key(namespace: &str, payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(namespace.as_bytes());
    hasher.update([0u8]);
    hasher.update(payload.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
