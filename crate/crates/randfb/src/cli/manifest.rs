//! Run manifests: the resolved configuration of a command, written next
//! to its outputs. Replaying a manifest regenerates every CSV byte for
//! byte (the recorded duration is informational only).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentConfig, SignalSpec};

/// Fully resolved command, sufficient to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ResolvedCommand {
    EnergyHist {
        config: ExperimentConfig,
        bins: usize,
    },
    Deviation {
        config: ExperimentConfig,
    },
    Framebounds {
        config: ExperimentConfig,
    },
    Condition {
        config: ExperimentConfig,
    },
    Bounds {
        signal: SignalSpec,
        num_filters: usize,
        filter_len: usize,
        sigma_sq: Option<f64>,
        tail_probability: f64,
    },
}

impl ResolvedCommand {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EnergyHist { .. } => "energy-hist",
            Self::Deviation { .. } => "deviation",
            Self::Framebounds { .. } => "framebounds",
            Self::Condition { .. } => "condition",
            Self::Bounds { .. } => "bounds",
        }
    }

    pub fn master_seed(&self) -> u64 {
        match self {
            Self::EnergyHist { config, .. }
            | Self::Deviation { config }
            | Self::Framebounds { config }
            | Self::Condition { config } => config.master_seed,
            Self::Bounds { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub master_seed: u64,
    pub threads: usize,
    pub svg: bool,
    #[serde(flatten)]
    pub run: ResolvedCommand,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(run: ResolvedCommand, threads: usize, svg: bool) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: run.master_seed(),
            threads,
            svg,
            run,
            outputs: Vec::new(),
            warnings: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("cannot parse manifest: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidParameter(format!("cannot serialize manifest: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
