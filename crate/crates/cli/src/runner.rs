use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sparsedisc::combin::DEFAULT_SUPPORT_CAP;

use crate::commands::{execute, RunContext};
use crate::config;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub version: String,
    pub seed: u64,
    pub cap: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub cap: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Validates the config, runs it, and writes results plus a manifest.
/// Nothing is written unless validation succeeds.
pub fn run(config_path: &Path, ov: &Overrides) -> Result<(PathBuf, RunManifest), CliError> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let cfg = config::parse(&text)?;
    let seed = ov.seed.unwrap_or(cfg.seed);
    let cap = ov.cap.or(cfg.params.cap).map_or(DEFAULT_SUPPORT_CAP, u128::from);
    let out_dir = ov
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.command.name()));
    let started = Instant::now();
    let mut artifacts = execute(&cfg, &RunContext { seed, cap })?;
    artifacts.sort_by(|a, b| a.name.cmp(&b.name));
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    for a in &artifacts {
        let path = out_dir.join(&a.name);
        fs::write(&path, &a.contents).map_err(|e| CliError::io(&path, e))?;
    }
    let manifest = RunManifest {
        command: cfg.command.name().into(),
        config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        version: sparsedisc::VERSION.into(),
        seed,
        cap: u64::try_from(cap).unwrap_or(u64::MAX),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: artifacts.iter().map(|a| a.name.clone()).collect(),
    };
    let path = out_dir.join(MANIFEST);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok((out_dir, manifest))
}
