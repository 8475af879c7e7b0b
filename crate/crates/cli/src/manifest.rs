use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// What a run used: every resolved parameter and a digest of every input.
#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub params: serde_json::Value,
    pub inputs: BTreeMap<&'static str, InputDigest>,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, params: &impl Serialize) -> Result<Self> {
        Ok(Self {
            subcommand,
            params: serde_json::to_value(params)?,
            inputs: BTreeMap::new(),
            seed: None,
            tool_version: TOOL_VERSION,
        })
    }

    pub fn input(&mut self, flag: &'static str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("{}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(
            flag,
            InputDigest {
                path: path.display().to_string(),
                sha256,
            },
        );
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Write to `path` when given, otherwise to standard error.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        let json = corelite::json::to_sorted_string(self)?;
        match path {
            Some(p) => std::fs::write(p, json).with_context(|| format!("{}", p.display()))?,
            None => eprint!("manifest: {json}"),
        }
        Ok(())
    }
}
