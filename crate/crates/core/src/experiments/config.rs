use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::network::DuplicatePolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Expand,
    Multiconfig,
    NinitSweep,
    RaseeStats,
    RaseeDynamics,
    Blip,
    Thermal,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Expand => "expand",
            Self::Multiconfig => "multiconfig",
            Self::NinitSweep => "ninit_sweep",
            Self::RaseeStats => "rasee_stats",
            Self::RaseeDynamics => "rasee_dynamics",
            Self::Blip => "blip",
            Self::Thermal => "thermal",
        }
    }
}

/// Full description of one run. Every field has a default, so a config file
/// only needs the keys it changes; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub n_init: usize,
    pub passes: usize,
    pub pool_size: usize,
    pub duplicate_policy: DuplicatePolicy,
    pub e0: f64,
    pub gamma0: f64,
    /// Horizon in units of τ.
    pub t_max: f64,
    pub t_step: f64,
    pub n_configs: usize,
    pub n_samples: usize,
    /// RaSEE truncation; `None` means the full spectrum.
    pub n_e: Option<usize>,
    /// Truncations compared by `rasee_stats`; `None` means n/4, n/2, n.
    pub rasee_levels: Option<Vec<usize>>,
    /// Site-basis random superpositions drawn by `rasee_stats`.
    pub n_position_samples: usize,
    pub n_trajectories: usize,
    pub n_init_values: Vec<usize>,
    pub snapshot_times: Vec<f64>,
    /// Temperature of the Boltzmann comparison written next to the energy
    /// distribution of the expanding state.
    pub boltzmann_temperature: Option<f64>,
    pub reversal_time: f64,
    pub delta_grid: Vec<f64>,
    /// Perturbation strengths whose full S_x(t) series the blip run writes.
    pub blip_series_deltas: Vec<f64>,
    pub temperature_grid: Vec<f64>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

/// `{0, 0.01, …, 0.5}`.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 100.0).collect()
}

/// Six points per decade from 1e-2 to 1e3.
pub fn default_temperature_grid() -> Vec<f64> {
    (0..=30)
        .map(|i| 10f64.powf(-2.0 + i as f64 / 6.0))
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Expand,
            n: 1024,
            n_init: 64,
            passes: crate::network::DEFAULT_PASSES,
            pool_size: crate::network::DEFAULT_POOL_SIZE,
            duplicate_policy: DuplicatePolicy::Redraw,
            e0: 0.0,
            gamma0: 1.0,
            t_max: 20.0,
            t_step: 0.05,
            n_configs: 10,
            n_samples: 300,
            n_e: None,
            rasee_levels: None,
            n_position_samples: 300,
            n_trajectories: 10,
            n_init_values: vec![4, 8, 16, 32, 64, 128],
            snapshot_times: vec![0.0, 0.5, 2.0, 10.0],
            boltzmann_temperature: None,
            reversal_time: 10.0,
            delta_grid: default_delta_grid(),
            blip_series_deltas: vec![0.0, 0.01, 0.05, 0.1, 0.3],
            temperature_grid: default_temperature_grid(),
            master_seed: DEFAULT_MASTER_SEED,
            output_dir: PathBuf::from("out"),
            cache_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn for_experiment(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            ..Self::default()
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn n_e(&self) -> usize {
        self.n_e.unwrap_or(self.n)
    }

    pub fn rasee_levels(&self) -> Vec<usize> {
        self.rasee_levels
            .clone()
            .unwrap_or_else(|| vec![self.n / 4, self.n / 2, self.n])
    }

    /// Number of time points `t_i = i·t_step` covering `[0, horizon]`.
    pub fn steps_to(&self, horizon: f64) -> usize {
        (horizon / self.t_step).round() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if self.pool_size == 0 || self.pool_size >= self.n {
            return Err(invalid(format!("pool_size must be in 1..{}", self.n)));
        }
        if self.passes == 0 {
            return Err(invalid("passes must be positive"));
        }
        if !(self.gamma0 > 0.0) || !self.e0.is_finite() {
            return Err(invalid("gamma0 must be positive and e0 finite"));
        }
        if !(self.t_step > 0.0) || !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(invalid("t_step must be positive and t_max non-negative"));
        }
        if self.t_max > 0.0 && self.t_max < self.t_step {
            return Err(invalid("t_max must be at least t_step"));
        }
        if self.n_init == 0 || self.n_init > self.n {
            return Err(invalid("n_init must be in 1..=n"));
        }
        let sweep = self.experiment == ExperimentKind::NinitSweep;
        if sweep && self.n_init_values.iter().any(|&v| v == 0 || v > self.n) {
            return Err(invalid("n_init_values must lie in 1..=n"));
        }
        let counts = [
            ("n_configs", self.n_configs),
            ("n_samples", self.n_samples),
            ("n_trajectories", self.n_trajectories),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(invalid(format!("{name} must be positive")));
        }
        if self.n_e() == 0
            || self.n_e() > self.n
            || self.rasee_levels().iter().any(|&l| l == 0 || l > self.n)
        {
            return Err(invalid("RaSEE truncations must lie in 1..=n"));
        }
        let unit = |d: &f64| (0.0..=1.0).contains(d);
        if !self.delta_grid.iter().all(unit) || !self.blip_series_deltas.iter().all(unit) {
            return Err(invalid("delta values must lie in [0, 1]"));
        }
        if self
            .temperature_grid
            .iter()
            .any(|&t| !(t > 0.0) || !t.is_finite())
        {
            return Err(invalid("temperatures must be positive"));
        }
        if matches!(self.boltzmann_temperature, Some(t) if !(t > 0.0)) {
            return Err(invalid("boltzmann_temperature must be positive"));
        }
        if !(self.reversal_time >= 0.0) || self.snapshot_times.iter().any(|&t| !(t >= 0.0)) {
            return Err(invalid("times must be non-negative"));
        }
        Ok(())
    }
}
