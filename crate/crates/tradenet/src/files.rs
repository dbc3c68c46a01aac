//! Versioned JSON files: parameters, run configurations and manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tradenet_core::GlobalParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported schema_version {found}, expected {SCHEMA_VERSION}")]
    Schema { path: PathBuf, found: u32 },
}

impl FileError {
    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub params: GlobalParams,
}

impl ParamsFile {
    pub fn new(params: GlobalParams) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            params,
        }
    }
}

/// Reads a JSON file, checking its `schema_version` when present.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let version: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| FileError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    if let Some(found) = version.get("schema_version").and_then(|v| v.as_u64()) {
        if found != u64::from(SCHEMA_VERSION) {
            return Err(FileError::Schema {
                path: path.to_path_buf(),
                found: found as u32,
            });
        }
    }
    serde_json::from_value(version).map_err(|source| FileError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes pretty JSON through a temporary file renamed into place.
pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<(), FileError> {
    let io_err = |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut text = serde_json::to_string_pretty(value).map_err(|source| FileError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    let mut file = fs::File::create(&tmp).map_err(io_err)?;
    file.write_all(text.as_bytes()).map_err(io_err)?;
    file.sync_all().map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn load_params(path: &Path) -> Result<GlobalParams, FileError> {
    load_json::<ParamsFile>(path).map(|f| f.params)
}

pub fn save_params(params: &GlobalParams, path: &Path) -> Result<(), FileError> {
    save_json(&ParamsFile::new(*params), path)
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String, FileError> {
    let io_err = |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::open(path).map_err(io_err)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(io_err)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Agent and link counts of the dataset a command ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub sellers: usize,
    pub buyers: usize,
    pub empirical_links: usize,
}

/// Record of one command invocation, enough to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config_path: Option<PathBuf>,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub threads: Option<usize>,
    /// SHA-256 of every input file, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub dataset: Option<DatasetSummary>,
    pub outputs: Vec<PathBuf>,
    /// Command-specific outcome, such as iterations used per run.
    pub results: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: std::env::args().collect(),
            config_path: None,
            parameters: serde_json::Value::Null,
            seeds: Vec::new(),
            threads: None,
            inputs: BTreeMap::new(),
            dataset: None,
            outputs: Vec::new(),
            results: serde_json::Value::Null,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), FileError> {
        let hash = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), hash);
        Ok(())
    }
}
