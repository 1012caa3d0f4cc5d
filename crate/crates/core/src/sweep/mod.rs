//! Parameter-grid sweeps, run configuration and output writers.

mod config;
mod svg;
mod table;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lobes::{lobe_diagram, LobeDiagram};
use crate::meanfield::{
    converge_truncation, density, MeanFieldError, MeanFieldSolution, SearchConfig,
};
use crate::model::ModelParams;
use crate::spectrum::{spectrum_vs_anharmonicity, SpectrumError, SpectrumRow};

pub use config::{
    ConfigError, LobesConfig, OutputConfig, OutputFormat, PhaseAxes, RunConfig, SpectrumConfig,
    SCHEMA_VERSION, WORKERS_ENV,
};
pub use svg::{emit_heatmap, render_heatmap, HeatmapError, Observable};
pub use table::{
    lobe_tables_csv, parse_phase_csv, phase_csv, spectrum_csv, write_phase_csv, TableError,
    PHASE_COLUMNS,
};

/// Uniform samples from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxisError {
    #[error("axis needs at least one sample")]
    Empty,
    #[error("single-sample axis must have start == stop, got {start} and {stop}")]
    SinglePointRange { start: f64, stop: f64 },
    #[error("axis endpoints must be finite")]
    NonFinite,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x, 1)
    }

    pub fn validate(&self) -> Result<(), AxisError> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(AxisError::NonFinite);
        }
        match self.count {
            0 => Err(AxisError::Empty),
            1 if self.start != self.stop => Err(AxisError::SinglePointRange {
                start: self.start,
                stop: self.stop,
            }),
            _ => Ok(()),
        }
    }

    pub fn samples(&self) -> Vec<f64> {
        let last = self.count.saturating_sub(1);
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last as f64)
                }
            })
            .collect()
    }
}

/// Per-point diagnostics. A point with `bracket_boundary`,
/// `truncation_warning` or `solver_error` carries no converged result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PointFlags {
    /// Hellmann-Feynman and finite-difference densities disagree, or the
    /// finite-difference stencil crosses a Mott/superfluid boundary.
    pub degeneracy: bool,
    /// The energy minimum sits at the edge of the order-parameter search.
    pub bracket_boundary: bool,
    /// Results still changed at the largest photon cutoff.
    pub truncation_warning: bool,
    /// The solver raised an error; the numeric fields are zero.
    pub solver_error: bool,
}

impl PointFlags {
    pub const NAMES: [&'static str; 4] = [
        "degeneracy",
        "bracket_boundary",
        "truncation_warning",
        "solver_error",
    ];

    fn bits(&self) -> [bool; 4] {
        [
            self.degeneracy,
            self.bracket_boundary,
            self.truncation_warning,
            self.solver_error,
        ]
    }

    pub fn names(&self) -> Vec<&'static str> {
        Self::NAMES
            .iter()
            .zip(self.bits())
            .filter_map(|(n, on)| on.then_some(*n))
            .collect()
    }

    pub fn set(&mut self, name: &str) -> bool {
        match name {
            "degeneracy" => self.degeneracy = true,
            "bracket_boundary" => self.bracket_boundary = true,
            "truncation_warning" => self.truncation_warning = true,
            "solver_error" => self.solver_error = true,
            _ => return false,
        }
        true
    }

    pub fn is_failure(&self) -> bool {
        self.bracket_boundary || self.truncation_warning || self.solver_error
    }
}

impl Serialize for PointFlags {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointFlags {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        let mut flags = PointFlags::default();
        for n in &names {
            if !flags.set(n) {
                return Err(serde::de::Error::custom(format!("unknown flag `{n}`")));
            }
        }
        Ok(flags)
    }
}

/// One grid point of a phase sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub j_over_lambda: f64,
    pub mu_minus_omega_over_lambda: f64,
    pub anh: f64,
    pub delta: f64,
    pub psi_min: f64,
    pub rho: f64,
    pub energy: f64,
    pub n_max_used: usize,
    pub flags: PointFlags,
}

/// Grid point in reduced units plus the physical parameters it maps to.
fn point_params(base: &ModelParams, j: f64, mu: f64, anh: f64, delta: f64) -> ModelParams {
    ModelParams {
        j_hop: j * base.lambda1,
        mu: base.omega_c + mu * base.lambda1,
        anh,
        delta,
        ..*base
    }
}

/// Solves one grid point. Never fails: problems end up in the flags.
pub fn solve_point(
    base: &ModelParams,
    search: &SearchConfig,
    j: f64,
    mu: f64,
    anh: f64,
    delta: f64,
) -> SweepRecord {
    let params = point_params(base, j, mu, anh, delta);
    let mut flags = PointFlags::default();
    let from_solution = |s: &MeanFieldSolution, flags: PointFlags| SweepRecord {
        j_over_lambda: j,
        mu_minus_omega_over_lambda: mu,
        anh,
        delta,
        psi_min: s.psi_min,
        rho: s.rho.max(0.0),
        energy: s.energy,
        n_max_used: s.n_max_used,
        flags,
    };
    match converge_truncation(&params, search.n_max_start, search) {
        Ok(solution) => {
            match density(&params, &solution, search) {
                Ok(d) => flags.degeneracy = d.warning.is_some(),
                Err(_) => flags.degeneracy = true,
            }
            from_solution(&solution, flags)
        }
        Err(MeanFieldError::BracketAtBoundary { partial, .. }) => {
            flags.bracket_boundary = true;
            from_solution(&partial, flags)
        }
        Err(MeanFieldError::TruncationNotConverged { last, .. }) => {
            flags.truncation_warning = true;
            from_solution(&last, flags)
        }
        Err(_) => {
            flags.solver_error = true;
            SweepRecord {
                j_over_lambda: j,
                mu_minus_omega_over_lambda: mu,
                anh,
                delta,
                psi_min: 0.0,
                rho: 0.0,
                energy: 0.0,
                n_max_used: 0,
                flags,
            }
        }
    }
}

fn worker_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to start worker pool")
}

/// Runs every `(delta, anh, J, mu)` point of the configured grid.
///
/// Records come back ordered by `delta`, then `anh`, then `J`, then `mu`
/// axis index, whatever the evaluation order. `progress(done, total)` is
/// called from worker threads as points finish.
pub fn sweep_phase_with_progress(
    config: &RunConfig,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Vec<SweepRecord> {
    let axes = &config.axes;
    let (js, mus, anhs, deltas) = (
        axes.j.samples(),
        axes.mu.samples(),
        axes.anh.samples(),
        axes.delta.samples(),
    );
    let mut points = Vec::with_capacity(js.len() * mus.len() * anhs.len() * deltas.len());
    for &delta in &deltas {
        for &anh in &anhs {
            for &j in &js {
                for &mu in &mus {
                    points.push((j, mu, anh, delta));
                }
            }
        }
    }
    let total = points.len();
    let done = AtomicUsize::new(0);
    let base = config.model;
    let search = config.solver;
    worker_pool(config.worker_count()).install(|| {
        points
            .par_iter()
            .map(|&(j, mu, anh, delta)| {
                let r = solve_point(&base, &search, j, mu, anh, delta);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                r
            })
            .collect()
    })
}

pub fn sweep_phase(config: &RunConfig) -> Vec<SweepRecord> {
    sweep_phase_with_progress(config, &|_, _| {})
}

/// Sector spectra over the configured `(delta, anh)` grid, grouped by
/// detuning.
pub fn sweep_spectrum(config: &RunConfig) -> Result<Vec<SpectrumRow>, SpectrumError> {
    let spec = &config.spectrum;
    let anh_axis = spec.anh.samples();
    let deltas = spec.delta.samples();
    let tables: Vec<Result<Vec<SpectrumRow>, SpectrumError>> = worker_pool(config.worker_count())
        .install(|| {
            deltas
                .par_iter()
                .map(|&delta| {
                    spectrum_vs_anharmonicity(
                        &config.model.with_delta(delta),
                        &anh_axis,
                        spec.n_max_sector,
                    )
                })
                .collect()
        });
    let mut rows = Vec::new();
    for t in tables {
        rows.extend(t?);
    }
    Ok(rows)
}

/// One lobe diagram per configured detuning.
pub fn sweep_lobes(config: &RunConfig) -> Result<Vec<(f64, LobeDiagram)>, SpectrumError> {
    let spec = &config.lobes;
    let anh_axis = spec.anh.samples();
    spec.delta
        .samples()
        .into_iter()
        .map(|delta| {
            Ok((
                delta,
                lobe_diagram(&config.model.with_delta(delta), &anh_axis, spec.n_max_lobe)?,
            ))
        })
        .collect()
}
