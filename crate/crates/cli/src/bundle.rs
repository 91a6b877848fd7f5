//! Output directory with a digest manifest.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::fail::Failure;

#[derive(Serialize)]
struct Entry {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config: &'a RunConfig,
    files: Vec<Entry>,
}

pub struct Bundle {
    dir: PathBuf,
    files: Vec<Entry>,
}

impl Bundle {
    pub fn create(cfg: &RunConfig) -> Result<Self, Failure> {
        fs::create_dir_all(&cfg.out).map_err(Failure::io)?;
        Ok(Bundle { dir: cfg.out.clone(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, data: &str) -> Result<(), Failure> {
        fs::write(self.dir.join(name), data).map_err(Failure::io)?;
        self.files.push(Entry { path: name.into(), bytes: data.len(), sha256: hex::encode(Sha256::digest(data)) });
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).expect("artifacts serialize");
        s.push('\n');
        self.write(name, &s)
    }

    /// Writes `manifest.json` (files sorted by name) and returns its path.
    pub fn finish(mut self, command: &str, cfg: &RunConfig) -> Result<PathBuf, Failure> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let m = Manifest { command, config: cfg, files: self.files };
        let mut s = serde_json::to_string_pretty(&m).expect("manifest serializes");
        s.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, s).map_err(Failure::io)?;
        Ok(path)
    }
}
