use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::report::Payload;
use crate::error::{Error, Result};

/// Content-addressed store of computed payloads, one JSON file per key.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Cache> {
        fs::create_dir_all(dir.as_ref()).map_err(io)?;
        Ok(Cache {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash of module, operation, canonical input and the config that affects the result.
    pub fn key(module: &str, op: &str, input: &str, config: &Value) -> String {
        let canon = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "module": module,
            "op": op,
            "input": input,
            "config": config,
        });
        let digest = Sha256::digest(canon.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn get(&self, key: &str) -> Option<Payload> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Written to a temporary file in the same directory and renamed into place.
    pub fn put(&self, key: &str, payload: &Payload) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        let text = serde_json::to_string(payload).map_err(|e| Error::Io(e.to_string()))?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(self.path(key)).map_err(|e| io(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::report::Check;

    #[test]
    fn round_trip_and_key_sensitivity() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path().join("sub")).unwrap();
        let cfg = json!({"p": 2});
        let k = Cache::key("ends", "ends", "Zp", &cfg);
        assert_eq!(k.len(), 64);
        assert_ne!(k, Cache::key("ends", "ends", "Zp", &json!({"p": 3})));
        assert!(c.get(&k).is_none());
        let p = Payload {
            result: json!({"e": "2"}),
            checks: vec![Check::new("x", true)],
            flags: vec![],
        };
        c.put(&k, &p).unwrap();
        assert_eq!(c.get(&k), Some(p.clone()));
        c.put(&k, &p).unwrap();
        fs::write(c.path(&k), "garbage").unwrap();
        assert!(c.get(&k).is_none());
    }
}
