use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AxisError, AxisSpec};
use crate::meanfield::SearchConfig;
use crate::model::{ModelError, ModelParams};

/// The only configuration layout this build understands.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "JCH_PHASE_WORKERS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config must set `schema_version`")]
    MissingSchemaVersion,
    #[error("unsupported schema_version {found}, expected {SCHEMA_VERSION}")]
    UnsupportedSchemaVersion { found: u32 },
    #[error("axis `{name}`: {source}")]
    Axis {
        name: &'static str,
        #[source]
        source: AxisError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solver: {0}")]
    Solver(String),
    #[error("`{0}` must be at least 1")]
    TooSmall(&'static str),
    #[error("{WORKERS_ENV}={0} is not a positive integer")]
    WorkersEnv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
    /// Also write one heatmap per panel and observable.
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            svg: false,
        }
    }
}

/// Grid of the phase sweep, in units of `lambda1`; `mu` is measured from
/// `omega_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseAxes {
    pub j: AxisSpec,
    pub mu: AxisSpec,
    pub anh: AxisSpec,
    pub delta: AxisSpec,
}

impl Default for PhaseAxes {
    fn default() -> Self {
        Self {
            j: AxisSpec::new(0.0, 0.2, 80),
            mu: AxisSpec::new(-2.5, 0.5, 80),
            anh: AxisSpec::new(-1.0, 1.0, 3),
            delta: AxisSpec::point(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub anh: AxisSpec,
    pub delta: AxisSpec,
    pub n_max_sector: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            anh: AxisSpec::new(-3.0, 3.0, 241),
            delta: AxisSpec::new(-2.0, 2.0, 3),
            n_max_sector: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LobesConfig {
    pub anh: AxisSpec,
    pub delta: AxisSpec,
    pub n_max_lobe: usize,
}

impl Default for LobesConfig {
    fn default() -> Self {
        Self {
            anh: AxisSpec::new(-3.0, 3.0, 241),
            delta: AxisSpec::point(0.0),
            n_max_lobe: 4,
        }
    }
}

/// Everything a run needs. Every field except `schema_version` has a
/// default, so a config file only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required in files; the field-level default keeps a missing key
    /// detectable despite the struct-wide defaults.
    #[serde(default)]
    pub schema_version: Option<u32>,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub model: ModelParams,
    pub axes: PhaseAxes,
    pub solver: SearchConfig,
    pub spectrum: SpectrumConfig,
    pub lobes: LobesConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: Some(SCHEMA_VERSION),
            workers: None,
            model: ModelParams::default(),
            axes: PhaseAxes::default(),
            solver: SearchConfig::default(),
            spectrum: SpectrumConfig::default(),
            lobes: LobesConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        match config.schema_version {
            None => return Err(ConfigError::MissingSchemaVersion),
            Some(SCHEMA_VERSION) => {}
            Some(found) => return Err(ConfigError::UnsupportedSchemaVersion { found }),
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate()?;
        let axes = [
            ("axes.j", self.axes.j),
            ("axes.mu", self.axes.mu),
            ("axes.anh", self.axes.anh),
            ("axes.delta", self.axes.delta),
            ("spectrum.anh", self.spectrum.anh),
            ("spectrum.delta", self.spectrum.delta),
            ("lobes.anh", self.lobes.anh),
            ("lobes.delta", self.lobes.delta),
        ];
        for (name, axis) in axes {
            axis.validate()
                .map_err(|source| ConfigError::Axis { name, source })?;
        }
        let (j_lo, j_hi) = (
            self.axes.j.start.min(self.axes.j.stop),
            self.axes.j.start.max(self.axes.j.stop),
        );
        if j_lo < 0.0 {
            return Err(ModelError::NegativeHopping { value: j_lo }.into());
        }
        // Extreme corners must give valid (finite) physical parameters.
        for j in [j_lo, j_hi] {
            for mu in [self.axes.mu.start, self.axes.mu.stop] {
                self.model
                    .with_hopping(j * self.model.lambda1)
                    .with_mu(self.model.omega_c + mu * self.model.lambda1)
                    .validate()?;
            }
        }
        let s = &self.solver;
        if s.grid_points < 3 {
            return Err(ConfigError::Solver("grid_points must be at least 3".into()));
        }
        if s.n_max_start < 2 || s.n_max_cap < s.n_max_start {
            return Err(ConfigError::Solver(
                "need 2 <= n_max_start <= n_max_cap".into(),
            ));
        }
        let positive = [
            ("golden_tol", s.golden_tol),
            ("fd_step", s.fd_step),
            ("degeneracy_tol", s.degeneracy_tol),
            ("truncation_tol", s.truncation_tol),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(ConfigError::Solver(format!(
                "{name} must be positive and finite"
            )));
        }
        if let Some(p) = s.psi_max {
            if !(p.is_finite() && p > 0.0) {
                return Err(ConfigError::Solver(
                    "psi_max must be positive and finite".into(),
                ));
            }
        }
        if self.spectrum.n_max_sector < 1 {
            return Err(ConfigError::TooSmall("spectrum.n_max_sector"));
        }
        if self.lobes.n_max_lobe < 1 {
            return Err(ConfigError::TooSmall("lobes.n_max_lobe"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::TooSmall("workers"));
        }
        Ok(())
    }

    /// Applies the worker-count environment override.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(raw) = std::env::var(WORKERS_ENV) {
            match raw.trim().parse::<usize>() {
                Ok(n) if n > 0 => self.workers = Some(n),
                _ => return Err(ConfigError::WorkersEnv(raw)),
            }
        }
        Ok(())
    }

    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
