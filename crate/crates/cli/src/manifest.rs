//! Run manifests: everything needed to repeat a run, written next to its outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use metapath_embed::{Schema, SyntheticSpec, TrainConfig};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

impl InputDigest {
    pub fn of(role: &str, path: &Path, contents: &[u8]) -> Self {
        InputDigest {
            role: role.to_owned(),
            path: path.to_owned(),
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub seed: u64,
    /// `flag` when the seed was given, `entropy` when it was drawn.
    pub seed_source: &'static str,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub versions: BTreeMap<&'static str, &'static str>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timings: BTreeMap<&'static str, f64>,
}

fn versions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("metapath-embed", metapath_embed::VERSION),
        ("metapath-embed-cli", env!("CARGO_PKG_VERSION")),
    ])
}

impl RunManifest {
    pub fn for_training(
        cfg: &TrainConfig,
        schema: &Schema,
        seed_source: &'static str,
        inputs: Vec<InputDigest>,
        outputs: &[PathBuf],
    ) -> Self {
        let meta_paths: Vec<_> = cfg
            .meta_paths
            .iter()
            .map(|w| serde_json::json!({ "meta_path": w.meta_path.render(schema), "weight": w.weight }))
            .collect();
        RunManifest {
            command: "train",
            config: serde_json::json!({
                "meta_paths": meta_paths,
                "mode": cfg.mode.to_string(),
                "dim": cfg.dim,
                "negatives": cfg.negatives,
                "gamma": cfg.gamma,
                "total_samples": cfg.total_samples,
                "lr_init": cfg.lr_init,
                "lr_floor": cfg.lr_floor,
                "threads": cfg.threads,
                "symmetric": cfg.symmetric,
                "chunk_size": cfg.chunk_size,
            }),
            seed: cfg.seed,
            seed_source,
            inputs,
            outputs: outputs.to_vec(),
            versions: versions(),
            timings: BTreeMap::new(),
        }
    }

    /// No timings, so the same seed reproduces the manifest byte for byte too.
    pub fn for_synth(spec: &SyntheticSpec, seed_source: &'static str, outputs: &[PathBuf]) -> Self {
        RunManifest {
            command: "synth",
            config: serde_json::json!({
                "communities": spec.communities,
                "authors_per_community": spec.authors_per_community,
                "venues_per_community": spec.venues_per_community,
                "papers_per_author": spec.papers_per_author,
                "noise": spec.noise,
            }),
            seed: spec.seed,
            seed_source,
            inputs: Vec::new(),
            outputs: outputs.to_vec(),
            versions: versions(),
            timings: BTreeMap::new(),
        }
    }

    pub fn timing(mut self, name: &'static str, d: Duration) -> Self {
        self.timings.insert(name, d.as_secs_f64());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
