//! Ground-state phase diagram of a cavity lattice whose sites each hold a
//! weakly anharmonic three-level qubit, in the single-site mean-field
//! approximation.
//!
//! * [`model`]: parameters and the truncated qubit/photon basis.
//! * [`eigen`]: dense symmetric eigensolvers.
//! * [`spectrum`]: exact zero-hopping sector spectra.
//! * [`meanfield`]: the mean-field Hamiltonian, order-parameter
//!   minimisation and density.
//! * [`lobes`]: Mott-lobe boundaries in the weak-hopping limit.
//! * [`sweep`]: parameter grids, configuration, CSV/JSON/SVG output.

pub mod eigen;
pub mod lobes;
pub mod meanfield;
pub mod model;
pub mod spectrum;
pub mod sweep;

pub use eigen::{
    eigh, ground_pair, lowest_eigenvalue, EigenDecomposition, EigenError, SymmetricMatrix,
};
pub use lobes::{lobe_boundary, lobe_diagram, LobeBoundary, LobeCrossing, LobeDiagram, LobeWidth};
pub use meanfield::{
    build_mf_matrix, converge_truncation, density, ground_energy, minimize_psi, DensityEstimate,
    MeanFieldError, MeanFieldMatrixSpec, MeanFieldSolution, SearchConfig,
};
pub use model::{BasisState, ModelError, ModelParams, QubitLevel, TruncatedBasis};
pub use spectrum::{
    lower_branch, sector_matrix, sector_spectrum, single_excitation_nonlinearity,
    spectrum_vs_anharmonicity, Branch, SectorSpectrum, SpectrumRow,
};
pub use sweep::{
    sweep_lobes, sweep_phase, sweep_spectrum, AxisSpec, PointFlags, RunConfig, SweepRecord,
};
