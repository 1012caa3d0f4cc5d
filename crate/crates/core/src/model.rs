//! Physical parameters, qubit/photon product states and the truncated basis.
//!
//! Every energy is measured in units of the qubit-cavity coupling `lambda1`,
//! which is therefore pinned to one by default. The qubit frequency is never
//! stored: it is `omega_c + delta`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by [`ModelParams::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("coupling `{field}` must be positive, got {value}")]
    NonPositiveCoupling { field: &'static str, value: f64 },
    #[error("hopping `j_hop` must be nonnegative, got {value}")]
    NegativeHopping { value: f64 },
    #[error("coordination number `z` must be at least 1, got {value}")]
    InvalidCoordination { value: u32 },
    #[error("parameter `{field}` is not finite")]
    NonFinite { field: &'static str },
}

/// Parameters of the on-site extended Jaynes-Cummings model plus the lattice
/// terms (hopping and chemical potential).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Cavity frequency.
    pub omega_c: f64,
    /// Qubit-cavity detuning `omega_q - omega_c`.
    pub delta: f64,
    /// Anharmonicity `omega_ef - omega_ge`.
    pub anh: f64,
    /// `|g> <-> |e>` coupling; the energy unit.
    pub lambda1: f64,
    /// `|e> <-> |f>` coupling.
    pub lambda2: f64,
    /// Number of nearest neighbours entering the mean-field decoupling.
    pub z: u32,
    /// Photon hopping rate between neighbouring cavities.
    pub j_hop: f64,
    /// Chemical potential.
    pub mu: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_c: 0.0,
            delta: 0.0,
            anh: 0.0,
            lambda1: 1.0,
            lambda2: std::f64::consts::SQRT_2,
            z: 3,
            j_hop: 0.0,
            mu: 0.0,
        }
    }
}

impl ModelParams {
    /// Qubit `|g> -> |e>` transition frequency.
    pub fn omega_q(&self) -> f64 {
        self.omega_c + self.delta
    }

    /// Returns the parameters unchanged if every invariant holds.
    pub fn validate(self) -> Result<Self, ModelError> {
        let reals = [
            ("omega_c", self.omega_c),
            ("delta", self.delta),
            ("anh", self.anh),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("j_hop", self.j_hop),
            ("mu", self.mu),
        ];
        if let Some((field, _)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ModelError::NonFinite { field });
        }
        if self.lambda1 <= 0.0 {
            return Err(ModelError::NonPositiveCoupling {
                field: "lambda1",
                value: self.lambda1,
            });
        }
        if self.lambda2 <= 0.0 {
            return Err(ModelError::NonPositiveCoupling {
                field: "lambda2",
                value: self.lambda2,
            });
        }
        if self.z == 0 {
            return Err(ModelError::InvalidCoordination { value: self.z });
        }
        if self.j_hop < 0.0 {
            return Err(ModelError::NegativeHopping { value: self.j_hop });
        }
        Ok(self)
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn with_hopping(self, j_hop: f64) -> Self {
        Self { j_hop, ..self }
    }

    pub fn with_anh(self, anh: f64) -> Self {
        Self { anh, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }
}

/// The three retained qubit levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitLevel {
    G,
    E,
    F,
}

impl QubitLevel {
    pub const ALL: [QubitLevel; 3] = [QubitLevel::G, QubitLevel::E, QubitLevel::F];

    /// Qubit contribution to the polariton number.
    pub fn excitations(self) -> usize {
        match self {
            QubitLevel::G => 0,
            QubitLevel::E => 1,
            QubitLevel::F => 2,
        }
    }

    /// Position of the level inside one photon-number block of the basis.
    pub fn rank(self) -> usize {
        self.excitations()
    }

    fn from_rank(rank: usize) -> Self {
        Self::ALL[rank]
    }
}

impl fmt::Display for QubitLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            QubitLevel::G => "g",
            QubitLevel::E => "e",
            QubitLevel::F => "f",
        };
        f.write_str(c)
    }
}

/// Product state `|level, photons>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub level: QubitLevel,
    pub photons: usize,
}

impl BasisState {
    pub fn new(level: QubitLevel, photons: usize) -> Self {
        Self { level, photons }
    }

    /// Polariton number `a^dag a + |e><e| + 2|f><f|`.
    pub fn excitation_number(&self) -> usize {
        self.photons + self.level.excitations()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.level, self.photons)
    }
}

/// Free-function form of [`BasisState::excitation_number`].
pub fn excitation_number(state: BasisState) -> usize {
    state.excitation_number()
}

/// All product states with at most `n_max` photons, ordered as
/// `index = 3 * photons + rank(level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedBasis {
    n_max: usize,
}

impl TruncatedBasis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        3 * (self.n_max + 1)
    }

    /// `None` when the state lies outside the photon cutoff.
    pub fn index(&self, state: BasisState) -> Option<usize> {
        (state.photons <= self.n_max).then(|| 3 * state.photons + state.level.rank())
    }

    pub fn state(&self, index: usize) -> Option<BasisState> {
        (index < self.dim()).then(|| BasisState::new(QubitLevel::from_rank(index % 3), index / 3))
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(move |i| BasisState::new(QubitLevel::from_rank(i % 3), i / 3))
    }
}
