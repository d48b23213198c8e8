//! Run configuration.
//!
//! Every scan subcommand accepts the same configuration surface twice: once
//! as a JSON file (`--config`) and once as individual flags.  Flags always
//! win over file values, field by field.  Angles are strings so π-fractions
//! (`pi/4`, `3pi/8`) work in both places; they are parsed during command
//! resolution, not here.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// The full configuration surface shared by the scan subcommands.  All
/// fields are optional; each command checks for what it needs and applies
/// its own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// State spec: `phi+`, `phi'+`, `psi'+`, `chi`, `phi:delta=<angle>`,
    /// or `raw:<amplitudes>`.
    pub state: Option<String>,
    /// White-noise fraction p ∈ [0, 1] mixed into the state.
    pub noise: Option<f64>,
    /// Measurement circle for photon 1: `hd`, `hr`, `dr`, `rotz:<angle>`,
    /// `rotx:<angle>`.
    pub circle_a: Option<String>,
    /// Measurement circle for photon 2 (same syntax).
    pub circle_b: Option<String>,
    /// Fixed first-detector angle t_a (native parameter of `circle_a`).
    pub fixed_a: Option<String>,
    /// Fixed first-detector angle t_a′.
    pub fixed_a_prime: Option<String>,
    /// Grid resolution per axis.
    pub resolution: Option<usize>,
    /// Circle-pair panel for `circlescan`: `zz`, `xx`, `zx`, `xz`.
    pub panel: Option<String>,
    /// Path t_b′ = slope·t_b + offset for `path` and `simulate`.
    #[serde(skip_serializing_if = "PathConfig::is_empty")]
    pub path: PathConfig,
    /// Monte Carlo block for `simulate` (and optionally `path`).
    #[serde(skip_serializing_if = "McConfig::is_empty")]
    pub monte_carlo: McConfig,
    /// Main artifact file; `.csv` or `.json` decides the format.
    pub output: Option<PathBuf>,
    /// Per-setting coincidence-count file (`simulate` only).
    pub counts: Option<PathBuf>,
    /// Heatmap PNG file (`landscape` and `circlescan`).
    pub image: Option<PathBuf>,
}

impl ScanConfig {
    /// Overlays `self` (flag values) on `file`: any field set here wins,
    /// anything unset falls back to the file value.
    pub fn overlaid_on(self, file: ScanConfig) -> ScanConfig {
        ScanConfig {
            state: self.state.or(file.state),
            noise: self.noise.or(file.noise),
            circle_a: self.circle_a.or(file.circle_a),
            circle_b: self.circle_b.or(file.circle_b),
            fixed_a: self.fixed_a.or(file.fixed_a),
            fixed_a_prime: self.fixed_a_prime.or(file.fixed_a_prime),
            resolution: self.resolution.or(file.resolution),
            panel: self.panel.or(file.panel),
            path: self.path.overlaid_on(file.path),
            monte_carlo: self.monte_carlo.overlaid_on(file.monte_carlo),
            output: self.output.or(file.output),
            counts: self.counts.or(file.counts),
            image: self.image.or(file.image),
        }
    }
}

/// An affine sweep t_b′ = slope·t_b + offset sampled over [start, end].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathConfig {
    /// Slope of the partner angle (default 1).
    pub slope: Option<f64>,
    /// Offset angle (required by `path`/`simulate`).
    pub offset: Option<String>,
    /// First sampled t_b (default 0).
    pub start: Option<String>,
    /// Last sampled t_b (default: the native-range end of `circle_b`).
    pub end: Option<String>,
    /// Sample spacing (default: 1/49 of the range, giving 50 points).
    pub step: Option<String>,
}

impl PathConfig {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    fn overlaid_on(self, file: PathConfig) -> PathConfig {
        PathConfig {
            slope: self.slope.or(file.slope),
            offset: self.offset.or(file.offset),
            start: self.start.or(file.start),
            end: self.end.or(file.end),
            step: self.step.or(file.step),
        }
    }
}

/// Monte Carlo sampling parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    /// Photon pairs generated per analyzer setting.
    pub pairs: Option<u64>,
    /// Master seed; per-setting substreams are derived from it (default 0).
    pub seed: Option<u64>,
}

impl McConfig {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    fn overlaid_on(self, file: McConfig) -> McConfig {
        McConfig {
            pairs: self.pairs.or(file.pairs),
            seed: self.seed.or(file.seed),
        }
    }
}
