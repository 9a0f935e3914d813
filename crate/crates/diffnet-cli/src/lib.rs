//! Config-driven experiment runner over the `diffnet` library: parses a
//! JSON experiment description, builds the graphs, runs the requested
//! experiment, and writes CSV tables, SVG figures, and a manifest with
//! content hashes. Identical config + seed always reproduces byte-identical
//! outputs.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod svg;

use std::path::{Path, PathBuf};

use config::ExperimentConfig;

/// Runs a validated config, writing outputs under `out_dir` (defaults to
/// the config's own `output_dir`). Returns every written path, manifest
/// included.
pub fn run_config(
    config: &ExperimentConfig,
    out_override: Option<&Path>,
) -> Result<Vec<PathBuf>, String> {
    let out_dir = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output_dir));
    let output = experiments::run_experiment(config, &out_dir)?;
    let manifest_path = manifest::write_manifest(
        &out_dir,
        config.kind.name(),
        config.seed,
        &config.canonical_json(),
        &output.artifacts,
    )
    .map_err(|e| format!("cannot write manifest: {e}"))?;
    let mut all = output.artifacts;
    all.push(manifest_path);
    Ok(all)
}
