//! Single-site mean-field problem.
//!
//! Decoupling the hopping with a real order parameter `psi = <a>` leaves one
//! site coupled to a classical field:
//!
//! ```text
//! H_MF = H_site - z J psi (a + a^dag) + z J psi^2 - mu N
//! ```
//!
//! The ground energy `E_g(psi)` is minimised over `psi >= 0` on a truncated
//! Fock space; `psi_min = 0` is the Mott insulator, `psi_min > 0` the
//! superfluid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::{ground_pair, lowest_eigenvalue, EigenError, SymmetricMatrix};
use crate::model::{BasisState, ModelError, ModelParams, QubitLevel, TruncatedBasis};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanFieldError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("photon cutoff n_max = {n_max} is below the minimum of 2")]
    TruncationTooSmall { n_max: usize },
    #[error("order parameter must be nonnegative and finite, got {psi}")]
    InvalidPsi { psi: f64 },
    #[error("energy minimum sits at the search edge psi_max = {psi_max}")]
    BracketAtBoundary {
        psi_max: f64,
        partial: Box<MeanFieldSolution>,
    },
    #[error("results still changing when the photon cutoff reached {n_max}")]
    TruncationNotConverged {
        n_max: usize,
        last: Box<MeanFieldSolution>,
    },
}

/// Knobs of the order-parameter search and the truncation policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Points of the coarse scan over `[0, psi_max]`.
    pub grid_points: usize,
    /// Upper end of the search. `None` means `sqrt(n_max) / 2`, which grows
    /// with the cutoff.
    pub psi_max: Option<f64>,
    /// Final golden-section bracket width.
    pub golden_tol: f64,
    /// Relative step of the chemical-potential finite difference.
    pub fd_step: f64,
    /// `|rho - rho_fd|` above which a point is reported as degenerate.
    pub degeneracy_tol: f64,
    pub n_max_start: usize,
    pub n_max_cap: usize,
    /// Largest change of `psi_min` and `rho` accepted between two cutoffs.
    pub truncation_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 64,
            psi_max: None,
            golden_tol: 1e-9,
            fd_step: 1e-4,
            degeneracy_tol: 1e-3,
            n_max_start: 4,
            n_max_cap: 64,
            truncation_tol: 1e-8,
        }
    }
}

impl SearchConfig {
    pub fn psi_max_for(&self, n_max: usize) -> f64 {
        self.psi_max.unwrap_or_else(|| (n_max as f64).sqrt() / 2.0)
    }
}

/// Inputs of [`build_mf_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldMatrixSpec {
    pub params: ModelParams,
    pub psi: f64,
    pub basis: TruncatedBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSolution {
    pub psi_min: f64,
    /// `E_g(psi_min)`, including the `z J psi^2` constant.
    pub energy: f64,
    pub ground_vector: Vec<f64>,
    /// Hellmann-Feynman density `<N>` in the ground state.
    pub rho: f64,
    pub n_max_used: usize,
    pub converged: bool,
    pub psi_bracket: (f64, f64),
}

/// Diagonal energy of `|s, n>` in the mean-field Hamiltonian, without the
/// `z J psi^2` constant. Only the combination `omega_c - mu` enters.
fn diagonal_energy(params: &ModelParams, state: BasisState) -> f64 {
    let detuning = params.omega_c - params.mu;
    let qubit = match state.level {
        QubitLevel::G => 0.0,
        QubitLevel::E => params.delta,
        QubitLevel::F => 2.0 * params.delta + params.anh,
    };
    state.excitation_number() as f64 * detuning + qubit
}

/// Mean-field Hamiltonian of one site in the truncated basis.
pub fn build_mf_matrix(spec: &MeanFieldMatrixSpec) -> Result<SymmetricMatrix, MeanFieldError> {
    let n_max = spec.basis.n_max();
    if n_max < 2 {
        return Err(MeanFieldError::TruncationTooSmall { n_max });
    }
    if !(spec.psi.is_finite() && spec.psi >= 0.0) {
        return Err(MeanFieldError::InvalidPsi { psi: spec.psi });
    }
    let p = &spec.params;
    let field = p.z as f64 * p.j_hop * spec.psi;
    let constant = field * spec.psi;
    let basis = spec.basis;
    let idx = |level, n| 3 * n + QubitLevel::rank(level);

    let mut m = SymmetricMatrix::zeros(basis.dim());
    for state in basis.states() {
        let i = basis.index(state).expect("state from basis");
        m.set(i, i, diagonal_energy(p, state) + constant);
    }
    for n in 0..n_max {
        let amp = ((n + 1) as f64).sqrt();
        m.set(
            idx(QubitLevel::G, n + 1),
            idx(QubitLevel::E, n),
            p.lambda1 * amp,
        );
        m.set(
            idx(QubitLevel::E, n + 1),
            idx(QubitLevel::F, n),
            p.lambda2 * amp,
        );
        if field != 0.0 {
            for level in QubitLevel::ALL {
                m.set(idx(level, n), idx(level, n + 1), -field * amp);
            }
        }
    }
    Ok(m)
}

fn spec(params: &ModelParams, psi: f64, n_max: usize) -> MeanFieldMatrixSpec {
    MeanFieldMatrixSpec {
        params: *params,
        psi,
        basis: TruncatedBasis::new(n_max),
    }
}

/// Lowest eigenvalue of the mean-field matrix at fixed `psi`.
pub fn ground_energy(params: &ModelParams, psi: f64, n_max: usize) -> Result<f64, MeanFieldError> {
    let m = build_mf_matrix(&spec(params, psi, n_max))?;
    Ok(lowest_eigenvalue(&m)?)
}

/// Ground energy and vector at fixed `psi`.
pub fn ground_state(
    params: &ModelParams,
    psi: f64,
    n_max: usize,
) -> Result<(f64, Vec<f64>), MeanFieldError> {
    let m = build_mf_matrix(&spec(params, psi, n_max))?;
    Ok(ground_pair(&m)?)
}

/// `<(a + a^dag) / 2>` in a real state over the truncated basis.
pub fn field_expectation(vector: &[f64]) -> f64 {
    let photons_max = vector.len() / 3;
    let mut sum = 0.0;
    for n in 0..photons_max.saturating_sub(1) {
        let amp = ((n + 1) as f64).sqrt();
        for r in 0..3 {
            sum += vector[3 * (n + 1) + r] * vector[3 * n + r] * amp;
        }
    }
    sum
}

/// `<N>` with `N = a^dag a + |e><e| + 2|f><f|`.
pub fn number_expectation(vector: &[f64]) -> f64 {
    vector
        .iter()
        .enumerate()
        .map(|(i, x)| (i / 3 + i % 3) as f64 * x * x)
        .sum()
}

/// `dE_g/dpsi = z J (2 psi - <a + a^dag>)` from the ground vector.
fn energy_slope(params: &ModelParams, psi: f64, vector: &[f64]) -> f64 {
    let zj = params.z as f64 * params.j_hop;
    zj * 2.0 * (psi - field_expectation(vector))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]`; returns the final bracket and the
/// better of its two interior points.
fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64, MeanFieldError>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<((f64, f64), f64), MeanFieldError> {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(((lo, hi), if fc <= fd { c } else { d }))
}

/// Outcome of locating the zero of the energy slope inside a window.
enum Polish {
    /// Slope is positive just above `psi = 0`: the minimum is at the origin.
    Origin,
    Root(f64),
    /// The window does not bracket a sign change.
    NoBracket,
}

/// Finds where `dE_g/dpsi` changes sign from nonpositive to positive inside
/// `[lo, hi]`, using regula falsi with the Illinois modification.
fn polish_slope(
    params: &ModelParams,
    n_max: usize,
    lo: f64,
    hi: f64,
) -> Result<Polish, MeanFieldError> {
    let slope = |psi: f64| -> Result<f64, MeanFieldError> {
        let (_, v) = ground_state(params, psi, n_max)?;
        Ok(energy_slope(params, psi, &v))
    };
    let zj = params.z as f64 * params.j_hop;
    let (mut a, mut b) = (lo, hi);
    let mut gb = slope(b)?;
    if gb <= 0.0 {
        return Ok(Polish::NoBracket);
    }
    let mut ga = if a == 0.0 {
        let probe = b.min(1e-8);
        if slope(probe)? > 0.0 {
            return Ok(Polish::Origin);
        }
        0.0
    } else {
        slope(a)?
    };
    if ga > 0.0 {
        return Ok(Polish::NoBracket);
    }

    let mut side = 0i8;
    for _ in 0..200 {
        let width = b - a;
        if width <= 4.0 * f64::EPSILON * b.max(1.0) {
            break;
        }
        // The slope vanishes at psi = 0 by symmetry; a secant anchored there
        // says nothing, so bisect until `a` leaves the origin.
        let x = if ga < 0.0 {
            let s = a - ga * width / (gb - ga);
            if s > a && s < b {
                s
            } else {
                a + 0.5 * width
            }
        } else {
            a + 0.5 * width
        };
        let gx = slope(x)?;
        if gx.abs() <= 1e-13 * zj {
            return Ok(Polish::Root(x));
        }
        if gx <= 0.0 {
            a = x;
            ga = gx;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            gb = gx;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Polish::Root(0.5 * (a + b)))
}

fn solution_at(
    params: &ModelParams,
    psi: f64,
    n_max: usize,
    converged: bool,
    psi_bracket: (f64, f64),
) -> Result<MeanFieldSolution, MeanFieldError> {
    let (energy, ground_vector) = ground_state(params, psi, n_max)?;
    let rho = number_expectation(&ground_vector);
    Ok(MeanFieldSolution {
        psi_min: psi,
        energy,
        ground_vector,
        rho,
        n_max_used: n_max,
        converged,
        psi_bracket,
    })
}

/// Global minimum of `E_g(psi)` over `[0, psi_max]`: coarse scan, golden
/// section inside the best grid cell, then a slope polish.
pub fn minimize_psi(
    params: &ModelParams,
    n_max: usize,
    search: &SearchConfig,
) -> Result<MeanFieldSolution, MeanFieldError> {
    let params = params.validate()?;
    if n_max < 2 {
        return Err(MeanFieldError::TruncationTooSmall { n_max });
    }
    let psi_max = search.psi_max_for(n_max);
    if params.j_hop == 0.0 || psi_max <= 0.0 {
        // E_g does not depend on psi; ties resolve to the origin.
        return solution_at(&params, 0.0, n_max, true, (0.0, 0.0));
    }

    let points = search.grid_points.max(3);
    let step = psi_max / (points - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..points {
        let e = ground_energy(&params, k as f64 * step, n_max)?;
        if e < best.1 {
            best = (k, e);
        }
    }
    let k = best.0;
    if k == points - 1 {
        let partial = solution_at(&params, psi_max, n_max, false, (psi_max - step, psi_max))?;
        return Err(MeanFieldError::BracketAtBoundary {
            psi_max,
            partial: Box::new(partial),
        });
    }
    let lo = k.saturating_sub(1) as f64 * step;
    let hi = (k + 1) as f64 * step;

    let f = |psi: f64| ground_energy(&params, psi, n_max);
    let (bracket, psi_golden) = golden_section(f, lo, hi, search.golden_tol)?;

    let reach = 1e-6f64.max(10.0 * (bracket.1 - bracket.0));
    let windows = [
        ((psi_golden - reach).max(lo), (psi_golden + reach).min(hi)),
        (lo, hi),
    ];
    let mut psi_min = psi_golden;
    for (a, b) in windows {
        match polish_slope(&params, n_max, a, b)? {
            Polish::Origin => {
                psi_min = 0.0;
                break;
            }
            Polish::Root(x) => {
                psi_min = x;
                break;
            }
            Polish::NoBracket => {}
        }
    }
    // The polished point must not lose to the origin.
    if psi_min > 0.0
        && ground_energy(&params, 0.0, n_max)? <= ground_energy(&params, psi_min, n_max)?
    {
        psi_min = 0.0;
    }
    solution_at(&params, psi_min, n_max, true, bracket)
}

/// Hellmann-Feynman density and its finite-difference cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    /// `<N>` in the ground state at `psi_min`; the reported value.
    pub rho: f64,
    /// `-[E_min(mu + h) - E_min(mu - h)] / 2h`.
    pub rho_fd: f64,
    pub warning: Option<DegeneracyWarning>,
}

/// The two density routes disagree, or the finite-difference stencil
/// straddles a Mott/superfluid boundary. Either way `rho` may jump here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyWarning {
    pub rho: f64,
    pub rho_fd: f64,
    pub stencil_changes_phase: bool,
}

/// Density at a solved point. `solution` must come from [`minimize_psi`] or
/// [`converge_truncation`] for the same `params`; the finite difference is
/// taken at the same cutoff.
pub fn density(
    params: &ModelParams,
    solution: &MeanFieldSolution,
    search: &SearchConfig,
) -> Result<DensityEstimate, MeanFieldError> {
    let h = search.fd_step * params.mu.abs().max(1.0);
    let n_max = solution.n_max_used;
    let fixed = SearchConfig {
        psi_max: Some(search.psi_max_for(n_max)),
        ..*search
    };
    let side = |mu: f64| -> Result<MeanFieldSolution, MeanFieldError> {
        match minimize_psi(&params.with_mu(mu), n_max, &fixed) {
            Err(MeanFieldError::BracketAtBoundary { partial, .. }) => Ok(*partial),
            other => other,
        }
    };
    let up = side(params.mu + h)?;
    let down = side(params.mu - h)?;
    let rho = solution.rho;
    let rho_fd = -(up.energy - down.energy) / (2.0 * h);
    let mott = solution.psi_min == 0.0;
    let stencil_changes_phase = (up.psi_min == 0.0) != mott || (down.psi_min == 0.0) != mott;
    let warning = ((rho - rho_fd).abs() > search.degeneracy_tol || stencil_changes_phase)
        .then_some(DegeneracyWarning {
            rho,
            rho_fd,
            stencil_changes_phase,
        });
    Ok(DensityEstimate {
        rho,
        rho_fd,
        warning,
    })
}

/// Whether the mean-field energy is unbounded below, `z J >= omega_c - mu`.
///
/// The photon part of the site Hamiltonian is a displaced oscillator with
/// minimum `z J psi^2 (1 - z J / (omega_c - mu))`, while the qubit coupling
/// lowers the energy further by an amount growing like `psi`. Once the
/// quadratic coefficient stops being positive, `E_g` decreases without limit
/// (in `psi` for `J > 0`, in the polariton number for `J = 0`) and no cutoff
/// yields a converged answer.
pub fn grand_potential_unbounded(params: &ModelParams) -> bool {
    params.z as f64 * params.j_hop >= params.omega_c - params.mu
}

/// Repeats [`minimize_psi`] with the cutoff doubled from `n_max_start` until
/// `psi_min` and `rho` stop changing.
///
/// With the default `psi_max` policy a minimum at the search edge is treated
/// as a sign the cutoff is too small, and the cutoff keeps doubling. An
/// explicit `psi_max` does not grow, so the edge error is returned at once.
/// When [`grand_potential_unbounded`] holds, the first cutoff's result is
/// returned as `BracketAtBoundary` (or `TruncationNotConverged` at `J = 0`)
/// without doubling.
pub fn converge_truncation(
    params: &ModelParams,
    n_max_start: usize,
    search: &SearchConfig,
) -> Result<MeanFieldSolution, MeanFieldError> {
    if n_max_start < 2 {
        return Err(MeanFieldError::TruncationTooSmall { n_max: n_max_start });
    }
    let cap = search.n_max_cap.max(n_max_start);
    if grand_potential_unbounded(&params.validate()?) {
        return match minimize_psi(params, n_max_start, search) {
            Ok(solution) if params.j_hop == 0.0 => Err(MeanFieldError::TruncationNotConverged {
                n_max: n_max_start,
                last: Box::new(solution),
            }),
            Ok(solution) => Err(MeanFieldError::BracketAtBoundary {
                psi_max: search.psi_max_for(n_max_start),
                partial: Box::new(MeanFieldSolution {
                    converged: false,
                    ..solution
                }),
            }),
            Err(e) => Err(e),
        };
    }
    let mut n_max = n_max_start;
    let mut previous: Option<MeanFieldSolution> = None;
    loop {
        match minimize_psi(params, n_max, search) {
            Ok(solution) => {
                if let Some(prev) = &previous {
                    let tol = search.truncation_tol;
                    if (solution.psi_min - prev.psi_min).abs() <= tol
                        && (solution.rho - prev.rho).abs() <= tol
                    {
                        return Ok(solution);
                    }
                }
                if n_max >= cap {
                    return Err(MeanFieldError::TruncationNotConverged {
                        n_max,
                        last: Box::new(solution),
                    });
                }
                previous = Some(solution);
            }
            Err(MeanFieldError::BracketAtBoundary { .. })
                if search.psi_max.is_none() && n_max < cap =>
            {
                previous = None;
            }
            Err(e) => return Err(e),
        }
        n_max = (2 * n_max).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigh;
    use crate::spectrum::{lower_branch, sector_matrix};

    fn params(delta: f64, anh: f64, j: f64, mu: f64) -> ModelParams {
        ModelParams {
            delta,
            anh,
            j_hop: j,
            mu,
            ..ModelParams::default()
        }
    }

    #[test]
    fn rejects_small_cutoff() {
        let s = spec(&ModelParams::default(), 0.0, 1);
        assert_eq!(
            build_mf_matrix(&s).unwrap_err(),
            MeanFieldError::TruncationTooSmall { n_max: 1 }
        );
    }

    #[test]
    fn zero_hopping_blocks_match_sector_matrices() {
        let p = params(0.7, -0.4, 0.0, 0.0);
        let m = build_mf_matrix(&spec(&p, 0.8, 6)).unwrap();
        for n in 2..=6 {
            let sector = sector_matrix(&p, n).unwrap();
            let idx = [3 * n, 3 * (n - 1) + 1, 3 * (n - 2) + 2];
            for a in 0..3 {
                for b in 0..3 {
                    assert!((m.get(idx[a], idx[b]) - sector.get(a, b)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn zero_psi_kills_hopping() {
        let with_j = build_mf_matrix(&spec(&params(0.0, 1.0, 0.3, -1.0), 0.0, 5)).unwrap();
        let without = build_mf_matrix(&spec(&params(0.0, 1.0, 0.0, -1.0), 0.0, 5)).unwrap();
        assert_eq!(with_j, without);
    }

    #[test]
    fn hopping_entries_and_constant() {
        let p = params(0.0, 0.0, 0.1, 0.0);
        let bare = build_mf_matrix(&spec(&p, 0.0, 4)).unwrap();
        let m = build_mf_matrix(&spec(&p, 0.5, 4)).unwrap();
        for n in 0..4 {
            for r in 0..3 {
                let (i, j) = (3 * n + r, 3 * (n + 1) + r);
                assert!((m.get(i, j) + 0.15 * ((n + 1) as f64).sqrt()).abs() < 1e-15);
            }
        }
        for i in 0..m.dim() {
            assert!((m.get(i, i) - bare.get(i, i) - 0.075).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_hopping_energy_is_lowest_sector() {
        let p = params(0.0, 0.0, 0.0, 0.0);
        let e = ground_energy(&p, 0.3, 8).unwrap();
        let min = (0..=8)
            .map(|n| lower_branch(&p, n).unwrap())
            .fold(f64::INFINITY, f64::min);
        // E(-,N) = -sqrt(3N - 2) at resonance and zero anharmonicity; the two
        // partial sectors above the cutoff lie higher.
        let d = eigh(&build_mf_matrix(&spec(&p, 0.3, 8)).unwrap()).unwrap();
        assert!((e - min).abs() < 1e-12);
        assert!((d.eigenvalues[0] - min).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_ground_deep_below_first_lobe() {
        let p = params(0.0, 0.0, 0.0, -2.0);
        for n in 1..=10 {
            assert!(lower_branch(&p, n).unwrap() - p.mu * n as f64 > 0.0);
        }
        for j in [0.0, 0.05, 0.2] {
            assert_eq!(ground_energy(&p.with_hopping(j), 0.0, 10).unwrap(), 0.0);
        }
    }

    #[test]
    fn gauge_symmetry_of_psi() {
        // H(-psi) is H(psi) with the hopping entries negated, and equals
        // (-1)^N H(psi) (-1)^N.
        let p = params(0.5, 1.0, 0.08, -1.2);
        let plus = build_mf_matrix(&spec(&p, 0.4, 6)).unwrap();
        let is_hop = |i: usize, j: usize| i % 3 == j % 3 && i != j;
        let minus = SymmetricMatrix::from_upper_fn(plus.dim(), |i, j| {
            if is_hop(i, j) {
                -plus.get(i, j)
            } else {
                plus.get(i, j)
            }
        });
        let parity = |i: usize| if (i / 3 + i % 3) % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..plus.dim() {
            for j in 0..plus.dim() {
                assert_eq!(parity(i) * plus.get(i, j) * parity(j), minus.get(i, j));
            }
        }
        let a = eigh(&plus).unwrap().eigenvalues;
        let b = eigh(&minus).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hopping_minimum_is_origin() {
        let s = minimize_psi(&params(0.0, 1.0, 0.0, -0.7), 6, &SearchConfig::default()).unwrap();
        assert_eq!(s.psi_min, 0.0);
        assert!(s.converged);
    }

    #[test]
    fn deep_mott_and_superfluid() {
        let search = SearchConfig::default();
        let mott = minimize_psi(&params(0.0, 1.0, 1e-3, -1.5), 8, &search).unwrap();
        assert_eq!(mott.psi_min, 0.0);
        let sf = minimize_psi(&params(0.0, 1.0, 0.3, -1.5), 16, &search).unwrap();
        assert!(sf.psi_min > 0.1, "{}", sf.psi_min);
        let sf_big = minimize_psi(&params(0.0, 1.0, 0.3, -1.5), 32, &search).unwrap();
        assert!((sf.psi_min - sf_big.psi_min).abs() < 1e-6);
    }

    #[test]
    fn unbounded_region_fails_fast() {
        let search = SearchConfig::default();
        let margin = params(0.0, 1.0, 0.5, -1.5);
        assert!(grand_potential_unbounded(&margin));
        assert!(!grand_potential_unbounded(&margin.with_hopping(0.49)));
        match converge_truncation(&margin, 4, &search) {
            Err(MeanFieldError::BracketAtBoundary { partial, .. }) => {
                assert_eq!(partial.n_max_used, 4);
                assert!(!partial.converged);
            }
            other => panic!("{other:?}"),
        }
        match converge_truncation(&params(0.0, 1.0, 0.0, 0.2), 4, &search) {
            Err(MeanFieldError::TruncationNotConverged { n_max: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interior_minimum_is_self_consistent() {
        let search = SearchConfig::default();
        let p = params(0.0, 1.0, 0.12, -0.9);
        let s = minimize_psi(&p, 16, &search).unwrap();
        assert!(s.psi_min > 1e-6);
        assert!((field_expectation(&s.ground_vector) - s.psi_min).abs() <= 1e-6);
        let step = search.psi_max_for(16) / 63.0;
        for k in 0..64 {
            assert!(s.energy <= ground_energy(&p, k as f64 * step, 16).unwrap() + 1e-12);
        }
    }

    #[test]
    fn density_of_vacuum_and_lobe() {
        let search = SearchConfig::default();
        let p = params(0.0, 0.0, 1e-3, -2.0);
        let s = minimize_psi(&p, 8, &search).unwrap();
        assert_eq!(s.psi_min, 0.0);
        assert!(s.rho.abs() < 1e-12);
        let d = density(&p, &s, &search).unwrap();
        assert!(d.warning.is_none());
        assert!(d.rho_fd.abs() < 1e-9);

        // second plateau at zero anharmonicity, between -1 and -(sqrt7 - 2)
        let p = params(0.0, 0.0, 1e-3, -0.8);
        let s = minimize_psi(&p, 8, &search).unwrap();
        assert!((s.rho - 2.0).abs() < 1e-9);
        let d = density(&p, &s, &search).unwrap();
        assert!((d.rho - d.rho_fd).abs() < 1e-5);
    }

    #[test]
    fn sector_two_lower_branch_has_density_two() {
        let p = params(0.0, 0.7, 0.0, 0.0);
        let spectrum = crate::spectrum::sector_spectrum(&p, 2).unwrap();
        let mut v = vec![0.0; TruncatedBasis::new(3).dim()];
        let lower = &spectrum.eigenvectors[0];
        v[6] = lower[0];
        v[4] = lower[1];
        v[2] = lower[2];
        assert!((number_expectation(&v) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_converges_for_zero_hopping() {
        let s =
            converge_truncation(&params(0.0, 1.0, 0.0, -1.5), 4, &SearchConfig::default()).unwrap();
        assert_eq!(s.psi_min, 0.0);
        assert_eq!(s.n_max_used, 8);
    }

    #[test]
    fn explicit_small_psi_max_propagates_bracket_error() {
        let search = SearchConfig {
            psi_max: Some(0.2),
            ..SearchConfig::default()
        };
        let err = converge_truncation(&params(0.0, 1.0, 2.0, -1.5), 4, &search).unwrap_err();
        assert!(
            matches!(err, MeanFieldError::BracketAtBoundary { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn larger_cutoff_never_raises_energy() {
        let p = params(0.0, 1.0, 0.1, -1.0);
        for psi in [0.0, 0.3, 0.9] {
            for n in 2..12 {
                let small = ground_energy(&p, psi, n).unwrap();
                let big = ground_energy(&p, psi, n + 1).unwrap();
                assert!(big <= small + 1e-12);
            }
        }
    }
}
