//! Run configuration: a single JSON document in which every field has a
//! default, so the verification suite runs with zero arguments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use fplanch::{LogGrid, MuGrid};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ZGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub steps: usize,
}

impl Default for ZGridSpec {
    fn default() -> Self {
        Self {
            re_min: -1.2,
            re_max: 1.2,
            im_min: -1.2,
            im_max: 1.2,
            steps: 41,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub eta_min: f64,
    pub eta_max: f64,
    pub n: usize,
    pub mu_max: f64,
    pub m: usize,
    /// Exponential-family amplitudes exercised by the suites.
    pub amplitudes: Vec<f64>,
    pub z_grid: ZGridSpec,
    /// Witness offsets, strictly decreasing.
    pub deltas: Vec<f64>,
    pub out_dir: PathBuf,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eta_min: fplanch::halfline::DEFAULT_ETA_MIN,
            eta_max: fplanch::halfline::DEFAULT_ETA_MAX,
            n: fplanch::halfline::DEFAULT_N,
            mu_max: fplanch::halfline::DEFAULT_MU_MAX,
            m: fplanch::halfline::DEFAULT_MU_NODES,
            amplitudes: vec![0.5, 1.0, 2.0],
            z_grid: ZGridSpec::default(),
            deltas: vec![0.2, 0.1, 0.05, 0.02],
            out_dir: PathBuf::from("."),
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    /// Validate everything up front; no computation starts on a bad config.
    pub fn validate(&self) -> Result<(), String> {
        LogGrid::new(self.eta_min, self.eta_max, self.n).map_err(|e| e.to_string())?;
        MuGrid::new(self.mu_max, self.m).map_err(|e| e.to_string())?;
        if self.amplitudes.is_empty() || self.amplitudes.iter().any(|a| !(*a > 0.0)) {
            return Err("amplitudes must be a non-empty list of positive rates".into());
        }
        if self.z_grid.steps < 2 {
            return Err("z grid needs at least 2 steps per axis".into());
        }
        if !(self.z_grid.re_min < self.z_grid.re_max && self.z_grid.im_min < self.z_grid.im_max) {
            return Err("z grid bounds must be ordered".into());
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err("deltas must be a non-empty list of positive offsets".into());
        }
        if self.deltas.windows(2).any(|p| p[1] >= p[0]) {
            return Err("deltas must be strictly decreasing".into());
        }
        Ok(())
    }

    pub fn log_grid(&self) -> Arc<LogGrid> {
        Arc::new(LogGrid::new(self.eta_min, self.eta_max, self.n).expect("validated"))
    }

    pub fn mu_grid(&self) -> Arc<MuGrid> {
        Arc::new(MuGrid::new(self.mu_max, self.m).expect("validated"))
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}
