//! Exact on-site spectrum at zero hopping.
//!
//! The polariton number commutes with the on-site Hamiltonian, so the
//! problem splits into blocks: `|g,0>` alone, the Jaynes-Cummings doublet
//! `{|g,1>, |e,0>}`, and for `N >= 2` the triplet
//! `{|g,N>, |e,N-1>, |f,N-2>}`. Energies here exclude the `-mu N` term.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::{eigh, EigenError, SymmetricMatrix};
use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("the three-level sector matrix needs N >= 2, got N = {0}")]
    SectorTooSmall(usize),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Eigenvalues and eigenvectors of one fixed-`N` block.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    pub n_excitations: usize,
    /// Ascending; the first entry is the lower branch `E(-, N)`.
    pub eigenvalues: Vec<f64>,
    /// Unit vectors over `{|g,N>, |e,N-1>, |f,N-2>}`, truncated to the states
    /// that exist for this `N`. First nonzero component is positive.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SectorSpectrum {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// The 3x3 block of the on-site Hamiltonian with `N = n` polaritons.
pub fn sector_matrix(params: &ModelParams, n: usize) -> Result<SymmetricMatrix, SpectrumError> {
    if n < 2 {
        return Err(SpectrumError::SectorTooSmall(n));
    }
    let nf = n as f64;
    let base = nf * params.omega_c;
    let mut m = SymmetricMatrix::zeros(3);
    m.set(0, 0, base);
    m.set(1, 1, base + params.delta);
    m.set(2, 2, base + 2.0 * params.delta + params.anh);
    m.set(0, 1, nf.sqrt() * params.lambda1);
    m.set(1, 2, (nf - 1.0).sqrt() * params.lambda2);
    Ok(m)
}

fn first_nonzero_positive(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| **x != 0.0) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Closed-form Jaynes-Cummings doublet, ascending.
fn doublet(params: &ModelParams) -> SectorSpectrum {
    let lambda = params.lambda1;
    let half = 0.5 * params.delta;
    let root = lambda.hypot(half);
    let centre = params.omega_c + half;
    let eigenvalues = vec![centre - root, centre + root];
    let eigenvectors = [-root, root]
        .iter()
        .map(|&r| {
            let mut v = vec![half + r, lambda];
            let norm = v[0].hypot(v[1]);
            v.iter_mut().for_each(|x| *x /= norm);
            first_nonzero_positive(&mut v);
            v
        })
        .collect();
    SectorSpectrum {
        n_excitations: 1,
        eigenvalues,
        eigenvectors,
    }
}

/// Spectrum of the `N = n` block.
pub fn sector_spectrum(params: &ModelParams, n: usize) -> Result<SectorSpectrum, SpectrumError> {
    match n {
        0 => Ok(SectorSpectrum {
            n_excitations: 0,
            eigenvalues: vec![0.0],
            eigenvectors: vec![vec![1.0]],
        }),
        1 => Ok(doublet(params)),
        _ => {
            let d = eigh(&sector_matrix(params, n)?)?;
            let eigenvectors = d
                .eigenvectors
                .into_iter()
                .map(|mut v| {
                    first_nonzero_positive(&mut v);
                    v
                })
                .collect();
            Ok(SectorSpectrum {
                n_excitations: n,
                eigenvalues: d.eigenvalues,
                eigenvectors,
            })
        }
    }
}

/// Lower-branch energy `E(-, N)`, with `E(-, 0) = 0`.
pub fn lower_branch(params: &ModelParams, n: usize) -> Result<f64, SpectrumError> {
    Ok(sector_spectrum(params, n)?.lowest())
}

/// Shift `eta = E(-,1) - omega_c` of the lowest one-polariton level from the
/// bare cavity ladder. Independent of the anharmonicity.
pub fn single_excitation_nonlinearity(params: &ModelParams) -> f64 {
    doublet(params).eigenvalues[0] - params.omega_c
}

/// Energy-ordered branch label within a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "-")]
    Lower,
    #[serde(rename = "0")]
    Middle,
    #[serde(rename = "+")]
    Upper,
}

impl Branch {
    /// Labels for a sector holding `count` eigenvalues.
    pub fn labels(count: usize) -> &'static [Branch] {
        match count {
            1 => &[Branch::Lower],
            2 => &[Branch::Lower, Branch::Upper],
            _ => &[Branch::Lower, Branch::Middle, Branch::Upper],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Lower => "-",
            Branch::Middle => "0",
            Branch::Upper => "+",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "-" => Some(Branch::Lower),
            "0" => Some(Branch::Middle),
            "+" => Some(Branch::Upper),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub delta: f64,
    pub anh: f64,
    pub n_excitations: usize,
    pub branch: Branch,
    pub eigenvalue: f64,
}

/// Every sector eigenvalue for `N = 0..=n_max_sector` at each anharmonicity
/// on the axis, ordered by axis position, then `N`, then branch.
pub fn spectrum_vs_anharmonicity(
    params: &ModelParams,
    anh_axis: &[f64],
    n_max_sector: usize,
) -> Result<Vec<SpectrumRow>, SpectrumError> {
    let mut rows = Vec::new();
    for &anh in anh_axis {
        let p = params.with_anh(anh);
        for n in 0..=n_max_sector {
            let s = sector_spectrum(&p, n)?;
            for (&eigenvalue, &branch) in s
                .eigenvalues
                .iter()
                .zip(Branch::labels(s.eigenvalues.len()))
            {
                rows.push(SpectrumRow {
                    delta: p.delta,
                    anh,
                    n_excitations: n,
                    branch,
                    eigenvalue,
                });
            }
        }
    }
    Ok(rows)
}
