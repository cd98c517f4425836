//! End-to-end experiment drivers.
//!
//! Each `run_*` function is pure: it builds the network(s) it needs from the
//! configuration's master seed, computes its tables and returns them. [`run`]
//! dispatches on the configured experiment, writes the CSV files and a
//! manifest into the output directory.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::json;

pub use config::{ExperimentConfig, ExperimentKind};
use output::{Cell, CsvTable, Manifest};

use crate::cache::SpectrumCache;
use crate::entropy::{position_probabilities, s_vn, s_vn_pure, s_x, smi, ProbabilityDistribution};
use crate::error::{Error, Result};
use crate::network::{
    assemble_hamiltonian, build_connectivity_with, generate_sites, ConnectivityGraph, GraphExport,
    Hamiltonian, SiteSet,
};
use crate::rng::{derive_seed, tags};
use crate::scalar::Real;
use crate::spectral::{
    diagonalize, evolve, evolve_backward, scaled_energies, Evolution, PureState, Spectrum,
};
use crate::states::{
    boltzmann_distribution, confined_state, perturbed_initial_state, position_expectation,
    random_position_superposition, rasee, thermal_density,
};

/// One network configuration with its exact spectrum.
#[derive(Debug, Clone)]
pub struct System<T> {
    pub config_index: usize,
    pub seed: u64,
    pub sites: SiteSet<T>,
    pub graph: ConnectivityGraph,
    pub hamiltonian: Hamiltonian<T>,
    pub spectrum: Spectrum<T>,
    scaled: Vec<T>,
}

impl<T: Real> System<T> {
    pub fn scaled_energies(&self) -> &[T] {
        &self.scaled
    }

    pub fn export(&self) -> GraphExport {
        GraphExport::new(&self.sites, &self.graph)
    }
}

/// Seed of configuration `index`; sites and connectivity use separate
/// streams of this seed.
pub fn config_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.master_seed, tags::CONFIG, &[index as u64])
}

pub fn build_system<T: Real>(cfg: &ExperimentConfig, index: usize) -> Result<System<T>> {
    let seed = config_seed(cfg, index);
    let sites = generate_sites::<T>(cfg.n, seed)?;
    let graph = build_connectivity_with(
        &sites,
        cfg.passes,
        cfg.pool_size,
        seed,
        cfg.duplicate_policy,
    )?;
    let hamiltonian = assemble_hamiltonian(&graph, T::lit(cfg.e0), T::lit(cfg.gamma0))?;
    let spectrum = match &cfg.cache_dir {
        Some(dir) => SpectrumCache::new(dir)?.get_or_compute(&graph, &hamiltonian)?,
        None => diagonalize(&hamiltonian)?.with_id(graph.content_hash()),
    };
    let scaled = scaled_energies(&spectrum);
    Ok(System {
        config_index: index,
        seed,
        sites,
        graph,
        hamiltonian,
        spectrum,
        scaled,
    })
}

/// Entropies and expectation values of a state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord<T> {
    pub t: T,
    pub s_x: T,
    pub s_e: T,
    pub s_vn: T,
    pub mean_x: T,
    pub mean_y: T,
    pub e_s: T,
}

pub const SERIES_HEADER: [&str; 7] = ["t", "s_x", "s_e", "s_vn", "mean_x", "mean_y", "e_s"];

/// Measures `psi` (the state at time `t`) on `sys`.
pub fn measure<T: Real>(sys: &System<T>, psi: &PureState<T>, t: T) -> Result<EntropyRecord<T>> {
    let p_x = position_probabilities(psi)?;
    let p_e = ProbabilityDistribution::new(
        sys.spectrum
            .project(psi)
            .iter()
            .map(|c| c.norm_sqr())
            .collect(),
    )?;
    let [mean_x, mean_y] = position_expectation(&sys.sites, &p_x);
    Ok(EntropyRecord {
        t,
        s_x: smi(&p_x),
        s_e: smi(&p_e),
        s_vn: s_vn_pure(psi)?,
        mean_x,
        mean_y,
        e_s: p_e
            .as_slice()
            .iter()
            .zip(&sys.scaled)
            .map(|(&p, &e)| p * e)
            .sum(),
    })
}

/// `t_i = i · t_step` for `i = 0..steps`.
pub fn time_grid<T: Real>(cfg: &ExperimentConfig, horizon: f64) -> Vec<T> {
    (0..cfg.steps_to(horizon))
        .map(|i| T::lit(i as f64 * cfg.t_step))
        .collect()
}

/// Evolves `psi0` over `times` and measures every point.
pub fn time_series<T: Real>(
    sys: &System<T>,
    psi0: &PureState<T>,
    times: &[T],
) -> Result<Vec<EntropyRecord<T>>> {
    let evolution = Evolution::new(psi0, &sys.spectrum);
    times
        .par_iter()
        .map(|&t| measure(sys, &evolution.at(t), t))
        .collect()
}

/// Mean `S_x` over the second half of the horizon.
pub fn late_time_mean<T: Real>(series: &[EntropyRecord<T>]) -> T {
    let horizon = series.last().map_or(T::zero(), |r| r.t);
    let half = horizon * T::lit(0.5);
    let late: Vec<T> = series
        .iter()
        .filter(|r| r.t >= half)
        .map(|r| r.s_x)
        .collect();
    late.iter().copied().sum::<T>() / T::from_usize_lossy(late.len().max(1))
}

fn series_table<T: Real>(series: &[EntropyRecord<T>]) -> CsvTable {
    let mut t = CsvTable::new(&SERIES_HEADER);
    for r in series {
        t.push(
            [r.t, r.s_x, r.s_e, r.s_vn, r.mean_x, r.mean_y, r.e_s].map(|v| Cell::from(v.as_f64())),
        );
    }
    t
}

#[derive(Debug, Clone)]
pub struct Snapshot<T> {
    pub t: T,
    pub probabilities: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct ExpandResult<T> {
    pub system: System<T>,
    pub series: Vec<EntropyRecord<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    /// `|⟨E_k|ψ(0)⟩|²` for every eigenstate.
    pub energy_distribution: Vec<T>,
    pub boltzmann: Option<Vec<T>>,
    pub late_s_x: T,
}

fn expand_on<T: Real>(
    cfg: &ExperimentConfig,
    system: System<T>,
    n_init: usize,
) -> Result<ExpandResult<T>> {
    let psi0 = confined_state(&system.sites, n_init)?;
    let series = time_series(&system, &psi0, &time_grid(cfg, cfg.t_max))?;
    let evolution = Evolution::new(&psi0, &system.spectrum);
    let snapshots = cfg
        .snapshot_times
        .iter()
        .map(|&t| {
            let t = T::lit(t);
            let p = position_probabilities(&evolution.at(t))?;
            Ok(Snapshot {
                t,
                probabilities: p.into_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let energy_distribution = evolution
        .energy_amplitudes()
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let boltzmann = cfg
        .boltzmann_temperature
        .map(|t| boltzmann_distribution(&system.spectrum, T::lit(t)).map(|p| p.into_vec()))
        .transpose()?;
    let late_s_x = late_time_mean(&series);
    Ok(ExpandResult {
        system,
        series,
        snapshots,
        energy_distribution,
        boltzmann,
        late_s_x,
    })
}

/// Free expansion of the state confined to the `n_init` sites nearest the
/// origin, on configuration 0.
pub fn run_expand<T: Real>(cfg: &ExperimentConfig) -> Result<ExpandResult<T>> {
    let system = build_system(cfg, 0)?;
    expand_on(cfg, system, cfg.n_init)
}

#[derive(Debug, Clone)]
pub struct ConfigSummary<T> {
    pub config_index: usize,
    pub seed: u64,
    pub s_e: T,
    pub e_s: T,
    pub late_s_x: T,
}

#[derive(Debug, Clone)]
pub struct MulticonfigResult<T> {
    pub runs: Vec<ExpandResult<T>>,
    pub summary: Vec<ConfigSummary<T>>,
}

/// [`run_expand`] repeated over `n_configs` independently seeded networks.
pub fn run_multiconfig<T: Real>(cfg: &ExperimentConfig) -> Result<MulticonfigResult<T>> {
    let runs = (0..cfg.n_configs)
        .map(|i| expand_on(cfg, build_system(cfg, i)?, cfg.n_init))
        .collect::<Result<Vec<_>>>()?;
    let summary = runs
        .iter()
        .map(|r| ConfigSummary {
            config_index: r.system.config_index,
            seed: r.system.seed,
            s_e: r.series[0].s_e,
            e_s: r.series[0].e_s,
            late_s_x: r.late_s_x,
        })
        .collect();
    Ok(MulticonfigResult { runs, summary })
}

#[derive(Debug, Clone)]
pub struct NinitRow<T> {
    pub n_init: usize,
    pub s_x0: T,
    pub e_s: T,
    pub late_s_x: T,
    pub series: Vec<EntropyRecord<T>>,
}

#[derive(Debug, Clone)]
pub struct NinitSweepResult<T> {
    pub system: System<T>,
    pub rows: Vec<NinitRow<T>>,
}

/// Free expansion from several confinements on one network (one eigensolve).
pub fn run_ninit_sweep<T: Real>(cfg: &ExperimentConfig) -> Result<NinitSweepResult<T>> {
    let system = build_system(cfg, 0)?;
    let times = time_grid(cfg, cfg.t_max);
    let rows = cfg
        .n_init_values
        .iter()
        .map(|&n_init| {
            let psi0 = confined_state(&system.sites, n_init)?;
            let series = time_series(&system, &psi0, &times)?;
            Ok(NinitRow {
                n_init,
                s_x0: series[0].s_x,
                e_s: series[0].e_s,
                late_s_x: late_time_mean(&series),
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NinitSweepResult { system, rows })
}

#[derive(Debug, Clone)]
pub struct RaseeSample<T> {
    pub n_e: usize,
    pub sample: usize,
    pub seed: u64,
    pub s_x: T,
    pub mean_x: T,
    pub mean_y: T,
    pub e_s: T,
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RaseeLevelSummary {
    pub n_e: usize,
    pub samples: usize,
    pub s_x: Stat,
    pub e_s: Stat,
    pub mean_x: Stat,
    pub mean_y: Stat,
}

#[derive(Debug, Clone)]
pub struct RaseeStatsResult<T> {
    pub system: System<T>,
    pub samples: Vec<RaseeSample<T>>,
    pub levels: Vec<RaseeLevelSummary>,
    /// `(sample, seed, S_x)` of random superpositions of site states.
    pub position_samples: Vec<(usize, u64, T)>,
    pub position_s_x: Stat,
}

/// RaSEE statistics for each truncation in `rasee_levels`, plus the same
/// construction in the site basis for comparison.
pub fn run_rasee_stats<T: Real>(cfg: &ExperimentConfig) -> Result<RaseeStatsResult<T>> {
    let system = build_system(cfg, 0)?;
    let mut samples = Vec::new();
    let mut levels = Vec::new();
    for n_e in cfg.rasee_levels() {
        let batch = (0..cfg.n_samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cfg.master_seed, tags::RASEE, &[n_e as u64, i as u64]);
                let psi = rasee(&system.spectrum, n_e, seed)?;
                let r = measure(&system, &psi, T::zero())?;
                Ok(RaseeSample {
                    n_e,
                    sample: i,
                    seed,
                    s_x: r.s_x,
                    mean_x: r.mean_x,
                    mean_y: r.mean_y,
                    e_s: r.e_s,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        levels.push(RaseeLevelSummary {
            n_e,
            samples: batch.len(),
            s_x: Stat::of(batch.iter().map(|s| s.s_x.as_f64())),
            e_s: Stat::of(batch.iter().map(|s| s.e_s.as_f64())),
            mean_x: Stat::of(batch.iter().map(|s| s.mean_x.as_f64())),
            mean_y: Stat::of(batch.iter().map(|s| s.mean_y.as_f64())),
        });
        samples.extend(batch);
    }
    let position_samples = (0..cfg.n_position_samples)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, tags::POSITION, &[i as u64]);
            let psi = random_position_superposition::<T>(cfg.n, seed)?;
            Ok((i, seed, s_x(&psi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let position_s_x = Stat::of(position_samples.iter().map(|s| s.2.as_f64()));
    Ok(RaseeStatsResult {
        system,
        samples,
        levels,
        position_samples,
        position_s_x,
    })
}

#[derive(Debug, Clone)]
pub struct RaseeDynamicsResult<T> {
    pub system: System<T>,
    pub seeds: Vec<u64>,
    pub trajectories: Vec<Vec<EntropyRecord<T>>>,
}

/// Unitary evolution of `n_trajectories` RaSEE initial states.
pub fn run_rasee_dynamics<T: Real>(cfg: &ExperimentConfig) -> Result<RaseeDynamicsResult<T>> {
    let system = build_system(cfg, 0)?;
    let times = time_grid(cfg, cfg.t_max);
    let seeds: Vec<u64> = (0..cfg.n_trajectories)
        .map(|i| derive_seed(cfg.master_seed, tags::RASEE_DYNAMICS, &[i as u64]))
        .collect();
    let mut trajectories = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let psi0 = rasee(&system.spectrum, cfg.n_e(), seed)?;
        trajectories.push(time_series(&system, &psi0, &times)?);
    }
    Ok(RaseeDynamicsResult {
        system,
        seeds,
        trajectories,
    })
}

#[derive(Debug, Clone)]
pub struct BlipResult<T> {
    pub system: System<T>,
    pub noise_seed: u64,
    /// `(δ, series over [0, 2·reversal_time])` for each of `blip_series_deltas`.
    pub series: Vec<(f64, Vec<EntropyRecord<T>>)>,
    /// `(δ, S_x at reversal_time)` for each of `delta_grid`.
    pub sweep: Vec<(f64, T)>,
}

/// Forward evolution of the time-reversed confined state, with and without
/// a RaSEE admixture of strength δ.
pub fn run_blip<T: Real>(cfg: &ExperimentConfig) -> Result<BlipResult<T>> {
    let system = build_system(cfg, 0)?;
    let reversal = T::lit(cfg.reversal_time);
    let localized = confined_state(&system.sites, cfg.n_init)?;
    let psi0 = evolve_backward(&localized, &system.spectrum, reversal)
        .with_label("time-reversed confined state");
    let noise_seed = derive_seed(cfg.master_seed, tags::BLIP_NOISE, &[0]);
    let noise = rasee(&system.spectrum, cfg.n_e(), noise_seed)?;
    let times = time_grid(cfg, 2.0 * cfg.reversal_time);

    let series = cfg
        .blip_series_deltas
        .iter()
        .map(|&delta| {
            let start = perturbed_initial_state(&psi0, &noise, T::lit(delta))?;
            Ok((delta, time_series(&system, &start, &times)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = cfg
        .delta_grid
        .par_iter()
        .map(|&delta| {
            let start = perturbed_initial_state(&psi0, &noise, T::lit(delta))?;
            Ok((delta, s_x(&evolve(&start, &system.spectrum, reversal))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlipResult {
        system,
        noise_seed,
        series,
        sweep,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalRow<T> {
    pub temperature: T,
    pub s_x: T,
    pub s_vn: T,
    pub e_s: T,
    /// Shannon measure of the Boltzmann occupations.
    pub occupation_smi: T,
}

#[derive(Debug, Clone)]
pub struct ThermalResult<T> {
    pub system: System<T>,
    pub rows: Vec<ThermalRow<T>>,
}

/// Canonical ensemble over `temperature_grid`; `S_vN` comes from the
/// eigenvalues of the assembled density matrix.
pub fn run_thermal<T: Real>(cfg: &ExperimentConfig) -> Result<ThermalResult<T>> {
    let system = build_system(cfg, 0)?;
    let rows = cfg
        .temperature_grid
        .iter()
        .map(|&temp| {
            let (ensemble, rho) = thermal_density(&system.spectrum, T::lit(temp))?;
            Ok(ThermalRow {
                temperature: ensemble.temperature,
                s_x: s_x(&rho)?,
                s_vn: s_vn(&rho)?,
                e_s: ensemble.scaled_energy(&system.spectrum),
                occupation_smi: smi(&ensemble.occupation),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThermalResult { system, rows })
}

/// Files written by one run, relative to the output directory.
#[derive(Debug, Default)]
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn csv(&mut self, name: String, table: &CsvTable) -> Result<()> {
        table.write(&self.dir.join(&name))?;
        self.files.push(name);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::json(&path, e))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn graph<T: Real>(&mut self, name: &str, sys: &System<T>) -> Result<()> {
        sys.export().write(&self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Label used in file names: `0.05` → `0.05`, `10` → `10`.
fn tag(x: f64) -> String {
    output::fmt_sig(x)
}

fn write_expand<T: Real>(out: &mut Outputs, r: &ExpandResult<T>, suffix: &str) -> Result<()> {
    out.csv(format!("series{suffix}.csv"), &series_table(&r.series))?;
    for snap in &r.snapshots {
        let mut t = CsvTable::new(&["site", "x", "y", "probability"]);
        for (k, (&p, pos)) in snap
            .probabilities
            .iter()
            .zip(r.system.sites.positions())
            .enumerate()
        {
            t.push([
                Cell::from(k),
                Cell::from(pos[0].as_f64()),
                Cell::from(pos[1].as_f64()),
                Cell::from(p.as_f64()),
            ]);
        }
        out.csv(
            format!("snapshot{suffix}_t{}.csv", tag(snap.t.as_f64())),
            &t,
        )?;
    }
    let mut energy = CsvTable::new(&["k", "e_s", "probability", "boltzmann"]);
    for (k, (&p, &e)) in r
        .energy_distribution
        .iter()
        .zip(r.system.scaled_energies())
        .enumerate()
    {
        let b = r.boltzmann.as_ref().map_or(f64::NAN, |b| b[k].as_f64());
        energy.push([
            Cell::from(k),
            Cell::from(e.as_f64()),
            Cell::from(p.as_f64()),
            Cell::from(b),
        ]);
    }
    out.csv(format!("energy_distribution{suffix}.csv"), &energy)
}

fn degree_json<T: Real>(sys: &System<T>) -> serde_json::Value {
    let d = sys.graph.degree_stats();
    json!({"min": d.min, "max": d.max, "mean": d.mean, "edges": sys.graph.edge_count()})
}

/// Runs the configured experiment and writes its tables plus `manifest.json`
/// into `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = Outputs {
        dir,
        files: Vec::new(),
    };
    let mut seeds = vec![("config[0]".to_string(), config_seed(cfg, 0))];

    match cfg.experiment {
        ExperimentKind::Expand => {
            let r = run_expand::<f64>(cfg)?;
            write_expand(&mut out, &r, "")?;
            out.graph("graph.json", &r.system)?;
            let es = r.system.scaled_energies();
            out.json(
                "summary.json",
                &json!({
                    "s_x0": r.series[0].s_x, "s_e": r.series[0].s_e, "e_s": r.series[0].e_s,
                    "late_s_x": r.late_s_x, "scaled_energy_max": es[es.len() - 1],
                    "degrees": degree_json(&r.system),
                }),
            )?;
        }
        ExperimentKind::Multiconfig => {
            let r = run_multiconfig::<f64>(cfg)?;
            seeds = r
                .summary
                .iter()
                .map(|s| (format!("config[{}]", s.config_index), s.seed))
                .collect();
            let mut summary = CsvTable::new(&["config", "seed", "s_e", "e_s", "late_s_x"]);
            for (run, s) in r.runs.iter().zip(&r.summary) {
                out.csv(
                    format!("series_config{}.csv", s.config_index),
                    &series_table(&run.series),
                )?;
                out.graph(&format!("graph_config{}.json", s.config_index), &run.system)?;
                summary.push([
                    Cell::from(s.config_index),
                    Cell::from(s.seed),
                    Cell::from(s.s_e),
                    Cell::from(s.e_s),
                    Cell::from(s.late_s_x),
                ]);
            }
            out.csv("summary.csv".into(), &summary)?;
        }
        ExperimentKind::NinitSweep => {
            let r = run_ninit_sweep::<f64>(cfg)?;
            let mut summary = CsvTable::new(&["n_init", "s_x0", "e_s", "late_s_x"]);
            for row in &r.rows {
                out.csv(
                    format!("series_ninit{}.csv", row.n_init),
                    &series_table(&row.series),
                )?;
                summary.push([
                    Cell::from(row.n_init),
                    Cell::from(row.s_x0),
                    Cell::from(row.e_s),
                    Cell::from(row.late_s_x),
                ]);
            }
            out.csv("summary.csv".into(), &summary)?;
            out.graph("graph.json", &r.system)?;
        }
        ExperimentKind::RaseeStats => {
            let r = run_rasee_stats::<f64>(cfg)?;
            let mut samples =
                CsvTable::new(&["n_e", "sample", "seed", "s_x", "mean_x", "mean_y", "e_s"]);
            for s in &r.samples {
                samples.push([
                    Cell::from(s.n_e),
                    Cell::from(s.sample),
                    Cell::from(s.seed),
                    Cell::from(s.s_x),
                    Cell::from(s.mean_x),
                    Cell::from(s.mean_y),
                    Cell::from(s.e_s),
                ]);
            }
            out.csv("rasee_samples.csv".into(), &samples)?;
            let mut summary = CsvTable::new(&[
                "n_e",
                "samples",
                "s_x_mean",
                "s_x_stderr",
                "e_s_mean",
                "e_s_stderr",
                "mean_x",
                "mean_y",
            ]);
            for l in &r.levels {
                summary.push([
                    Cell::from(l.n_e),
                    Cell::from(l.samples),
                    Cell::from(l.s_x.mean),
                    Cell::from(l.s_x.stderr),
                    Cell::from(l.e_s.mean),
                    Cell::from(l.e_s.stderr),
                    Cell::from(l.mean_x.mean),
                    Cell::from(l.mean_y.mean),
                ]);
            }
            out.csv("rasee_summary.csv".into(), &summary)?;
            let mut pos = CsvTable::new(&["sample", "seed", "s_x"]);
            for &(i, seed, sx) in &r.position_samples {
                pos.push([Cell::from(i), Cell::from(seed), Cell::from(sx)]);
            }
            out.csv("position_samples.csv".into(), &pos)?;
            out.graph("graph.json", &r.system)?;
        }
        ExperimentKind::RaseeDynamics => {
            let r = run_rasee_dynamics::<f64>(cfg)?;
            for (i, (traj, &seed)) in r.trajectories.iter().zip(&r.seeds).enumerate() {
                out.csv(format!("series_sample{i}.csv"), &series_table(traj))?;
                seeds.push((format!("rasee_dynamics[{i}]"), seed));
            }
            out.graph("graph.json", &r.system)?;
        }
        ExperimentKind::Blip => {
            let r = run_blip::<f64>(cfg)?;
            seeds.push(("blip_noise".into(), r.noise_seed));
            for (delta, series) in &r.series {
                out.csv(
                    format!("series_delta{}.csv", tag(*delta)),
                    &series_table(series),
                )?;
            }
            let mut sweep = CsvTable::new(&["delta", "s_x_at_reversal"]);
            for &(delta, sx) in &r.sweep {
                sweep.push([Cell::from(delta), Cell::from(sx)]);
            }
            out.csv("delta_sweep.csv".into(), &sweep)?;
            out.graph("graph.json", &r.system)?;
        }
        ExperimentKind::Thermal => {
            let r = run_thermal::<f64>(cfg)?;
            let mut table = CsvTable::new(&["temperature", "s_x", "s_vn", "e_s"]);
            for row in &r.rows {
                table.push([row.temperature, row.s_x, row.s_vn, row.e_s].map(Cell::from));
            }
            out.csv("thermal.csv".into(), &table)?;
            out.graph("graph.json", &r.system)?;
        }
    }

    let manifest = Manifest {
        experiment: cfg.experiment.name().to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        master_seed: cfg.master_seed,
        seeds,
        outputs: out.files,
        started_unix_seconds: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    };
    manifest.write(&out.dir)?;
    Ok(manifest)
}

/// Re-runs the experiment recorded in `manifest_path`, writing into
/// `output_dir` (or the recorded directory when `None`).
pub fn rerun_from_manifest(manifest_path: &Path, output_dir: Option<PathBuf>) -> Result<Manifest> {
    let manifest = Manifest::read(manifest_path)?;
    let mut cfg = manifest.config;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    run(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            experiment: kind,
            n: 96,
            n_init: 8,
            pool_size: 30,
            t_max: 2.0,
            t_step: 0.25,
            n_configs: 2,
            n_samples: 12,
            n_position_samples: 12,
            n_trajectories: 2,
            n_init_values: vec![4, 8, 16],
            snapshot_times: vec![0.0, 1.0],
            reversal_time: 1.0,
            delta_grid: vec![0.0, 0.1, 0.5],
            blip_series_deltas: vec![0.0, 0.1],
            temperature_grid: vec![0.1, 10.0],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn zero_horizon_gives_initial_record() {
        let cfg = ExperimentConfig {
            t_max: 0.0,
            ..small(ExperimentKind::Expand)
        };
        let r = run_expand::<f64>(&cfg).unwrap();
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.series[0].t, 0.0);
        assert!((r.series[0].s_x - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_config_matches_expand() {
        let cfg = ExperimentConfig {
            n_configs: 1,
            ..small(ExperimentKind::Multiconfig)
        };
        let multi = run_multiconfig::<f64>(&cfg).unwrap();
        let single = run_expand::<f64>(&cfg).unwrap();
        assert_eq!(multi.runs[0].series, single.series);
    }

    #[test]
    fn ninit_row_matches_expand() {
        let cfg = small(ExperimentKind::NinitSweep);
        let sweep = run_ninit_sweep::<f64>(&cfg).unwrap();
        let expand = run_expand::<f64>(&cfg).unwrap();
        let row = sweep.rows.iter().find(|r| r.n_init == cfg.n_init).unwrap();
        assert_eq!(row.series, expand.series);
    }

    #[test]
    fn rasee_dynamics_zero_horizon_reproduces_samples() {
        let cfg = ExperimentConfig {
            t_max: 0.0,
            ..small(ExperimentKind::RaseeDynamics)
        };
        let r = run_rasee_dynamics::<f64>(&cfg).unwrap();
        for (traj, &seed) in r.trajectories.iter().zip(&r.seeds) {
            let psi = rasee(&r.system.spectrum, cfg.n, seed).unwrap();
            assert_eq!(traj.len(), 1);
            assert_eq!(traj[0].s_x, s_x(&psi).unwrap());
        }
    }

    #[test]
    fn blip_without_noise_relocalizes() {
        let cfg = small(ExperimentKind::Blip);
        let r = run_blip::<f64>(&cfg).unwrap();
        assert!((r.sweep[0].1 - 3.0).abs() < 1e-9);
        assert!(r.sweep[2].1 > r.sweep[0].1);
    }

    #[test]
    fn every_experiment_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        for kind in [
            ExperimentKind::Expand,
            ExperimentKind::Multiconfig,
            ExperimentKind::NinitSweep,
            ExperimentKind::RaseeStats,
            ExperimentKind::RaseeDynamics,
            ExperimentKind::Blip,
            ExperimentKind::Thermal,
        ] {
            let cfg = ExperimentConfig {
                output_dir: dir.path().join(kind.name()),
                ..small(kind)
            };
            let m = run(&cfg).unwrap();
            assert!(!m.outputs.is_empty());
            for f in &m.outputs {
                assert!(cfg.output_dir.join(f).exists(), "{f}");
            }
            assert!(cfg.output_dir.join(Manifest::FILE_NAME).exists());
        }
    }
}
