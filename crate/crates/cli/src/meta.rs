//! Output directories and the `run_meta.json` written alongside every run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use stclust_core::ingest::{DatasetManifest, ELEVATION_FILE, MANIFEST_FILE};
use stclust_core::GridGeometry;

use crate::fail::{CmdResult, Failure};

pub const TOOL: &str = "stclust";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const RUN_META_FILE: &str = "run_meta.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct RunMeta<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    params: &'a P,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<GridGeometry>,
    inputs: &'a [InputDigest],
    outputs: &'a [String],
}

pub fn digest(path: &Path) -> CmdResult<InputDigest> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Digests of the manifest, every payload file and the elevation grid if present.
pub fn dataset_digests(root: &Path, manifest: &DatasetManifest) -> CmdResult<Vec<InputDigest>> {
    let mut out = vec![digest(&root.join(MANIFEST_FILE))?];
    for &year in &manifest.years {
        out.push(digest(&manifest.payload_path(root, year))?);
    }
    let elevation = root.join(ELEVATION_FILE);
    if elevation.is_file() {
        out.push(digest(&elevation)?);
    }
    Ok(out)
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

/// Collects the files a command writes so `run_meta.json` can list them.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> CmdResult<Self> {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CmdResult {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| Failure::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CmdResult {
        self.write(name, &json_bytes(value))
    }

    /// Writes `run_meta.json`, consuming the directory handle.
    pub fn finish<P: Serialize>(
        self,
        command: &str,
        params: &P,
        geometry: Option<GridGeometry>,
        inputs: &[InputDigest],
    ) -> CmdResult {
        let meta = RunMeta {
            tool: TOOL,
            version: VERSION,
            command,
            params,
            geometry,
            inputs,
            outputs: &self.written,
        };
        let path = self.path(RUN_META_FILE);
        fs::write(&path, json_bytes(&meta)).map_err(|e| Failure::io(&path, e))
    }
}

/// Grid recorded in the `run_meta.json` beside a label file.
pub fn sibling_geometry(labels: &Path) -> CmdResult<GridGeometry> {
    let dir = labels.parent().unwrap_or(Path::new("."));
    let path = dir.join(RUN_META_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Failure::io(&path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let geometry = value
        .get("geometry")
        .ok_or_else(|| Failure::invalid(format!("{}: no geometry recorded", path.display())))?;
    let g: GridGeometry =
        serde_json::from_value(geometry.clone()).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    g.validate()?;
    Ok(g)
}
