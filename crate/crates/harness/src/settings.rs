use std::path::{Path, PathBuf};

use rateamp_core::{AdmmConfig, DykstraConfig, FgmConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DykstraSettings {
    pub max_sweeps: usize,
    pub tolerance: f64,
    pub check_stride: usize,
}

impl From<DykstraSettings> for DykstraConfig {
    fn from(s: DykstraSettings) -> Self {
        DykstraConfig {
            max_sweeps: s.max_sweeps,
            tolerance: s.tolerance,
            check_stride: s.check_stride,
        }
    }
}

impl From<DykstraConfig> for DykstraSettings {
    fn from(c: DykstraConfig) -> Self {
        Self {
            max_sweeps: c.max_sweeps,
            tolerance: c.tolerance,
            check_stride: c.check_stride,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FgmSettings {
    pub max_iter: usize,
    pub dykstra: DykstraSettings,
    #[serde(default)]
    pub early_stop: Option<f64>,
}

impl FgmSettings {
    pub fn config(&self) -> FgmConfig {
        FgmConfig {
            max_iter: self.max_iter,
            dykstra: self.dykstra.into(),
            early_stop: self.early_stop,
            ..FgmConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmmSettings {
    pub rho: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl AdmmSettings {
    pub fn config(&self) -> AdmmConfig {
        AdmmConfig {
            rho: self.rho,
            max_iter: self.max_iter,
            tolerance: self.tolerance,
            ..AdmmConfig::default()
        }
    }
}

/// Scale knobs shared by the timing and convergence experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub horizons: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub n_u: usize,
    pub cond_target: f64,
    /// Standard deviation of `x0` (and hence of `q`).
    pub x0_std: f64,
    /// Timed solves per instance after the discarded warm-up.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub fgm: FgmSettings,
    pub admm: AdmmSettings,
    /// Dykstra sweeps recorded by the projection-only traces.
    #[serde(default = "default_dykstra_sweeps")]
    pub dykstra_sweeps: usize,
    /// Starting-point standard deviations for the projection-only traces.
    #[serde(default = "default_start_stds")]
    pub start_stds: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_repeats() -> usize {
    5
}

fn default_dykstra_sweeps() -> usize {
    1000
}

fn default_start_stds() -> Vec<f64> {
    vec![100.0, 10.0]
}

impl BenchmarkSpec {
    /// Per-iteration timing defaults: 20 instances, `T ∈ {8, 16, 32}`, 200
    /// outer iterations per solve, inner Dykstra checked every 10th sweep.
    pub fn timing_default() -> Self {
        Self {
            horizons: vec![8, 16, 32],
            instances: 20,
            seed: 2024,
            n_u: 1,
            cond_target: 100.0,
            x0_std: 10.0,
            repeats: default_repeats(),
            fgm: FgmSettings {
                max_iter: 200,
                dykstra: DykstraConfig::INNER_CHECKED.into(),
                early_stop: None,
            },
            admm: AdmmSettings {
                rho: 1.0,
                max_iter: 200,
                tolerance: None,
            },
            dykstra_sweeps: default_dykstra_sweeps(),
            start_stds: default_start_stds(),
            output: None,
        }
    }

    /// Convergence-trace defaults: `T ∈ {4, 8, 16, 32}`, fixed 50-sweep inner projection.
    pub fn convergence_default() -> Self {
        Self {
            horizons: vec![4, 8, 16, 32],
            fgm: FgmSettings {
                max_iter: 300,
                dykstra: DykstraConfig::INNER_FIXED.into(),
                early_stop: None,
            },
            admm: AdmmSettings {
                rho: 1.0,
                max_iter: 300,
                tolerance: None,
            },
            ..Self::timing_default()
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(crate::error::io_err(path))?;
        let spec: Self = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(HarnessError::Config {
                field,
                reason: reason.into(),
            })
        };
        if self.instances == 0 {
            return bad("instances", "must be >= 1");
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|&t| t < 2) {
            return bad("horizons", "need at least one horizon, each >= 2");
        }
        if self.n_u == 0 {
            return bad("n_u", "must be >= 1");
        }
        if !(self.cond_target >= 1.0) {
            return bad("cond_target", "must be >= 1");
        }
        if self.repeats == 0 {
            return bad("repeats", "must be >= 1");
        }
        if self.fgm.max_iter == 0 || self.admm.max_iter == 0 {
            return bad("max_iter", "must be >= 1");
        }
        if !(self.admm.rho > 0.0) {
            return bad("rho", "must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let spec = BenchmarkSpec::timing_default();
        let text = serde_json::to_string(&spec).unwrap();
        let back: BenchmarkSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn rejects_short_horizon() {
        let mut spec = BenchmarkSpec::timing_default();
        spec.horizons = vec![1];
        assert!(spec.validate().is_err());
        spec.horizons = vec![4];
        spec.instances = 0;
        assert!(spec.validate().is_err());
    }
}
