//! Persistence for record metadata and artifact blobs.
//!
//! Documents are JSON values grouped into collections and keyed by id.
//! Each id can also own named binary artifacts.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde_json::Value;
use thiserror::Error;

pub const SIMULATIONS: &str = "simulations";
pub const SERIES: &str = "series";

const META_FILE: &str = "meta.json";
const ARTIFACT_DIR: &str = "artifacts";
const INDEX_FILE: &str = "index.log";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store unavailable: {0}")]
    Unavailable(String),
    #[error("document `{0}` is not valid JSON: {1}")]
    Corrupt(String, String),
    #[error("invalid key `{0}`")]
    InvalidKey(String),
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Unavailable(e.to_string())
    }
}

pub trait DocumentStore: Send + Sync {
    fn put(&self, collection: &str, id: &str, document: &Value) -> Result<(), StoreError>;

    fn get(&self, collection: &str, id: &str) -> Result<Option<Value>, StoreError>;

    /// Ids in the order they were first written.
    fn list(&self, collection: &str) -> Result<Vec<String>, StoreError>;

    /// Removes the document and its artifacts. Returns whether it existed.
    fn delete(&self, collection: &str, id: &str) -> Result<bool, StoreError>;

    fn put_artifact(&self, collection: &str, id: &str, name: &str, bytes: &[u8]) -> Result<(), StoreError>;

    fn get_artifact(&self, collection: &str, id: &str, name: &str) -> Result<Option<Vec<u8>>, StoreError>;

    fn list_artifacts(&self, collection: &str, id: &str) -> Result<Vec<String>, StoreError>;
}

fn check_key(key: &str) -> Result<(), StoreError> {
    let ok = !key.is_empty()
        && key != "."
        && key != ".."
        && !key.starts_with('_')
        && key.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidKey(key.to_string()))
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().expect("path has a parent");
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("doc"),
        uuid::Uuid::new_v4().simple()
    ));
    let mut file = fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn read_optional(path: &Path) -> Result<Option<Vec<u8>>, StoreError> {
    match fs::read(path) {
        Ok(bytes) => Ok(Some(bytes)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Directory-per-document store:
/// `<root>/<id>/meta.json` and `<root>/<id>/artifacts/<name>` for
/// simulations, `<root>/_<collection>/<id>/...` for other collections.
#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
    index_lock: Mutex<()>,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(FileStore {
            root,
            index_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn collection_dir(&self, collection: &str) -> PathBuf {
        if collection == SIMULATIONS {
            self.root.clone()
        } else {
            self.root.join(format!("_{collection}"))
        }
    }

    fn document_dir(&self, collection: &str, id: &str) -> Result<PathBuf, StoreError> {
        check_key(id)?;
        Ok(self.collection_dir(collection).join(id))
    }

    fn index_path(&self, collection: &str) -> PathBuf {
        let dir = self.collection_dir(collection);
        if collection == SIMULATIONS {
            dir.join(format!("_{INDEX_FILE}"))
        } else {
            dir.join(INDEX_FILE)
        }
    }

    fn read_index(&self, collection: &str) -> Result<Vec<String>, StoreError> {
        let text = read_optional(&self.index_path(collection))?.unwrap_or_default();
        Ok(String::from_utf8_lossy(&text)
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect())
    }
}

impl DocumentStore for FileStore {
    fn put(&self, collection: &str, id: &str, document: &Value) -> Result<(), StoreError> {
        let dir = self.document_dir(collection, id)?;
        let bytes = serde_json::to_vec_pretty(document).map_err(|e| StoreError::Unavailable(e.to_string()))?;
        let _guard = self.index_lock.lock().expect("index lock");
        let is_new = !dir.join(META_FILE).exists();
        write_atomic(&dir.join(META_FILE), &bytes)?;
        if is_new {
            let mut ids = self.read_index(collection)?;
            if !ids.iter().any(|i| i == id) {
                ids.push(id.to_string());
                let body: String = ids.iter().map(|i| format!("{i}\n")).collect();
                write_atomic(&self.index_path(collection), body.as_bytes())?;
            }
        }
        Ok(())
    }

    fn get(&self, collection: &str, id: &str) -> Result<Option<Value>, StoreError> {
        let dir = match self.document_dir(collection, id) {
            Ok(dir) => dir,
            Err(_) => return Ok(None),
        };
        match read_optional(&dir.join(META_FILE))? {
            Some(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| StoreError::Corrupt(id.to_string(), e.to_string())),
            None => Ok(None),
        }
    }

    fn list(&self, collection: &str) -> Result<Vec<String>, StoreError> {
        let _guard = self.index_lock.lock().expect("index lock");
        let ids = self.read_index(collection)?;
        let dir = self.collection_dir(collection);
        Ok(ids.into_iter().filter(|id| dir.join(id).join(META_FILE).is_file()).collect())
    }

    fn delete(&self, collection: &str, id: &str) -> Result<bool, StoreError> {
        let dir = self.document_dir(collection, id)?;
        let _guard = self.index_lock.lock().expect("index lock");
        let existed = dir.join(META_FILE).exists();
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        let ids: Vec<String> = self.read_index(collection)?.into_iter().filter(|i| i != id).collect();
        let body: String = ids.iter().map(|i| format!("{i}\n")).collect();
        write_atomic(&self.index_path(collection), body.as_bytes())?;
        Ok(existed)
    }

    fn put_artifact(&self, collection: &str, id: &str, name: &str, bytes: &[u8]) -> Result<(), StoreError> {
        check_key(name)?;
        let path = self.document_dir(collection, id)?.join(ARTIFACT_DIR).join(name);
        write_atomic(&path, bytes)
    }

    fn get_artifact(&self, collection: &str, id: &str, name: &str) -> Result<Option<Vec<u8>>, StoreError> {
        if check_key(name).is_err() {
            return Ok(None);
        }
        let dir = match self.document_dir(collection, id) {
            Ok(dir) => dir,
            Err(_) => return Ok(None),
        };
        read_optional(&dir.join(ARTIFACT_DIR).join(name))
    }

    fn list_artifacts(&self, collection: &str, id: &str) -> Result<Vec<String>, StoreError> {
        let dir = self.document_dir(collection, id)?.join(ARTIFACT_DIR);
        let entries = match fs::read_dir(&dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut names = Vec::new();
        for entry in entries {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if !name.starts_with('.') {
                names.push(name);
            }
        }
        names.sort();
        Ok(names)
    }
}

#[derive(Debug, Default)]
struct MemoryCollection {
    order: Vec<String>,
    documents: HashMap<String, Value>,
    artifacts: HashMap<String, HashMap<String, Vec<u8>>>,
}

/// In-process store for tests and one-shot CLI runs.
#[derive(Debug, Default)]
pub struct MemoryStore {
    collections: Mutex<HashMap<String, MemoryCollection>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn put(&self, collection: &str, id: &str, document: &Value) -> Result<(), StoreError> {
        check_key(id)?;
        let mut all = self.collections.lock().expect("store lock");
        let c = all.entry(collection.to_string()).or_default();
        if c.documents.insert(id.to_string(), document.clone()).is_none() {
            c.order.push(id.to_string());
        }
        Ok(())
    }

    fn get(&self, collection: &str, id: &str) -> Result<Option<Value>, StoreError> {
        let all = self.collections.lock().expect("store lock");
        Ok(all.get(collection).and_then(|c| c.documents.get(id).cloned()))
    }

    fn list(&self, collection: &str) -> Result<Vec<String>, StoreError> {
        let all = self.collections.lock().expect("store lock");
        Ok(all.get(collection).map(|c| c.order.clone()).unwrap_or_default())
    }

    fn delete(&self, collection: &str, id: &str) -> Result<bool, StoreError> {
        let mut all = self.collections.lock().expect("store lock");
        let Some(c) = all.get_mut(collection) else {
            return Ok(false);
        };
        c.order.retain(|i| i != id);
        c.artifacts.remove(id);
        Ok(c.documents.remove(id).is_some())
    }

    fn put_artifact(&self, collection: &str, id: &str, name: &str, bytes: &[u8]) -> Result<(), StoreError> {
        check_key(id)?;
        check_key(name)?;
        let mut all = self.collections.lock().expect("store lock");
        all.entry(collection.to_string())
            .or_default()
            .artifacts
            .entry(id.to_string())
            .or_default()
            .insert(name.to_string(), bytes.to_vec());
        Ok(())
    }

    fn get_artifact(&self, collection: &str, id: &str, name: &str) -> Result<Option<Vec<u8>>, StoreError> {
        let all = self.collections.lock().expect("store lock");
        Ok(all
            .get(collection)
            .and_then(|c| c.artifacts.get(id))
            .and_then(|a| a.get(name).cloned()))
    }

    fn list_artifacts(&self, collection: &str, id: &str) -> Result<Vec<String>, StoreError> {
        let all = self.collections.lock().expect("store lock");
        let mut names: Vec<String> = all
            .get(collection)
            .and_then(|c| c.artifacts.get(id))
            .map(|a| a.keys().cloned().collect())
            .unwrap_or_default();
        names.sort();
        Ok(names)
    }
}
