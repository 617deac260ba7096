//! Run manifests: every artifact-producing command writes
//! `<out>.manifest.json` beside its primary output, echoing the resolved
//! configuration and the SHA-256 of every input file. Two artifacts are
//! comparable iff their manifests agree on inputs and seeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use zsl_core::{Error, Result};

#[derive(Debug, Serialize)]
pub struct Manifest {
    command: String,
    config: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        Manifest {
            command: command.to_owned(),
            config: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn flag(mut self, key: &str, value: impl ToString) -> Manifest {
        self.config.insert(key.to_owned(), value.to_string());
        self
    }

    /// Records the input's path and content hash.
    pub fn input(mut self, path: &Path) -> Result<Manifest> {
        let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
        self.inputs.insert(
            path.display().to_string(),
            zsl_core::model::sha256_hex(&bytes),
        );
        Ok(self)
    }

    pub fn option_input(self, path: Option<&PathBuf>) -> Result<Manifest> {
        match path {
            Some(p) => self.input(p),
            None => Ok(self),
        }
    }

    pub fn output(mut self, path: &Path) -> Manifest {
        self.outputs.push(path.display().to_string());
        self
    }

    /// Writes `<primary_out>.manifest.json`.
    pub fn write_beside(&self, primary_out: &Path) -> Result<()> {
        let path = manifest_path(primary_out);
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        std::fs::write(&path, json).map_err(|e| io_err(&path, e))
    }
}

pub fn manifest_path(primary_out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", primary_out.display()))
}

pub fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
