//! Run configuration: command-line flags over an optional TOML file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use qrg_core::xy_model::Dimension;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file.
///
/// ```toml
/// dim = 2
/// j = 1.0
/// threads = 4
///
/// [flow]
/// gamma0 = -0.26
/// steps = 2
///
/// [scaling]
/// steps = [1, 2, 3]
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<u32>,
    pub j: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub flow: FlowFile,
    #[serde(default)]
    pub concurrence: CurveFile,
    #[serde(default)]
    pub scaling: CurveFile,
    #[serde(default)]
    pub groundstate: GroundStateFile,
    #[serde(default, rename = "fixed-points")]
    pub fixed_points: FixedPointsFile,
    #[serde(default)]
    pub jsweep: JSweepFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    pub gamma0: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub steps: Option<Vec<usize>>,
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateFile {
    pub gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointsFile {
    pub grid: Option<usize>,
    pub curve_out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JSweepFile {
    pub gamma_points: Option<usize>,
    pub j_values: Option<Vec<f64>>,
    pub step: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags shared by every subcommand, after merging.
#[derive(Debug, Clone)]
pub struct Common {
    pub dimension: Dimension,
    pub j: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn resolve_dimension(flag: Option<u32>, file: Option<u32>) -> anyhow::Result<Dimension> {
    let Some(d) = flag.or(file) else {
        bail!("missing required field `dim`");
    };
    Ok(Dimension::try_from(d)?)
}

pub fn require_odd_grid(field: &str, grid: usize, min: usize) -> anyhow::Result<usize> {
    if grid < min || grid.is_multiple_of(2) {
        bail!("invalid `{field}`: must be odd and >= {min}, got {grid}");
    }
    Ok(grid)
}
