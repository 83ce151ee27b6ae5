//! Run manifests and atomic CSV/JSON writers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::error::CliError;
use crate::spec::sha256_hex;

/// Everything needed to rerun a command. `wall_time_s` is the only field
/// that varies between identical runs and is left out of the hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub spec_hashes: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub versions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("ssd".into(), env!("CARGO_PKG_VERSION").into());
        versions.insert("ssd-core".into(), crate::CORE_VERSION.into());
        RunManifest {
            command: command.into(),
            args,
            spec_hashes: BTreeMap::new(),
            seed: None,
            tolerances: BTreeMap::new(),
            versions,
            wall_time_s: None,
        }
    }

    /// First 16 hex digits of the SHA-256 of the manifest without timing.
    pub fn hash(&self) -> String {
        let mut m = self.clone();
        m.wall_time_s = None;
        let bytes = serde_json::to_vec(&m).expect("manifest serializes");
        sha256_hex(&bytes)[..16].to_string()
    }
}

/// Writes files into one output directory, each tagged with the manifest hash.
#[derive(Debug)]
pub struct OutDir {
    pub dir: PathBuf,
    pub hash: String,
}

impl OutDir {
    pub fn create(dir: &Path, manifest: &RunManifest) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf(), hash: manifest.hash() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Pretty JSON with a top-level `manifest` field.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut v = serde_json::to_value(value)?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("manifest".into(), serde_json::Value::String(self.hash.clone()));
        }
        let mut bytes = serde_json::to_vec_pretty(&v)?;
        bytes.push(b'\n');
        let p = self.path(name);
        write_atomic(&p, &bytes)?;
        Ok(p)
    }

    /// CSV whose first line is `# manifest=<hash>`.
    pub fn csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut buf = format!("# manifest={}\n", self.hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        let p = self.path(name);
        write_atomic(&p, &buf)?;
        Ok(p)
    }

    pub fn manifest(&self, manifest: &RunManifest) -> Result<PathBuf, CliError> {
        let mut bytes = serde_json::to_vec_pretty(manifest)?;
        bytes.push(b'\n');
        let p = self.path(&format!("manifest-{}.json", self.hash));
        write_atomic(&p, &bytes)?;
        Ok(p)
    }
}

/// Write to a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Shortest representation that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
