//! Output directory with a run manifest: every emitted file is recorded,
//! alongside the command echo, config digest, seed and tool version.

use crate::units::round_sig;
use serde::Serialize;
use std::fs;
use std::io;
use std::path::PathBuf;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(dir: PathBuf) -> io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, content: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), content)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &serde_json::Value) -> io::Result<()> {
        let rounded = round_json(value.clone());
        let text = serde_json::to_string_pretty(&rounded).expect("json");
        self.write(name, &(text + "\n"))
    }

    pub fn path(&self) -> &PathBuf {
        &self.dir
    }

    /// Writes the manifest; it lists every file including itself.
    pub fn finish(mut self, command: String, config_digest: &str, seed: u64) -> io::Result<()> {
        self.files.push("manifest.json".to_string());
        self.files.sort();
        let manifest = RunManifest {
            command,
            config_digest: config_digest.to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.files.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest json");
        fs::write(self.dir.join("manifest.json"), text + "\n")
    }
}

/// Rounds every number in a JSON tree to 9 significant digits so repeated
/// runs serialize byte-identically.
pub fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value::*;
    match v {
        Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    return serde_json::Number::from_f64(round_sig(f, 9))
                        .map(Number)
                        .unwrap_or(Null);
                }
            }
            Number(n)
        }
        Array(items) => Array(items.into_iter().map(round_json).collect()),
        Object(map) => Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}
