//! Mott-lobe boundaries in the zero-hopping limit.
//!
//! At `J = 0` every site sits in a lower-branch polariton state, and the
//! occupation steps from `N` to `N + 1` where
//! `E(-, N+1) - mu (N+1) = E(-, N) - mu N`, i.e. at
//! `mu = E(-, N+1) - E(-, N)`. Lobe `N` spans the interval between the
//! `N-1 -> N` and `N -> N+1` boundaries; when that interval is empty the lobe
//! is covered by its neighbours.

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::spectrum::{lower_branch, SpectrumError};

/// Chemical potential at which the zero-hopping occupation steps from
/// `n` to `n + 1`.
pub fn lobe_boundary(params: &ModelParams, n: usize) -> Result<f64, SpectrumError> {
    Ok(lower_branch(params, n + 1)? - lower_branch(params, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeBoundary {
    pub n_from: usize,
    pub n_to: usize,
    /// `(mu - omega_c) / lambda1` at the step.
    pub mu_boundary: f64,
    pub anh: f64,
}

/// Width of lobe `n` on the `(mu - omega_c)/lambda1` axis. Lobe 0 is
/// unbounded below and never appears here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeWidth {
    pub n: usize,
    pub width: f64,
    /// Nominal width is zero or negative.
    pub covered: bool,
}

/// Point where lobe `n` closes: boundaries `n-1 -> n` and `n -> n+1` meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeCrossing {
    pub n: usize,
    pub anh: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeDiagram {
    pub anh_axis: Vec<f64>,
    /// `boundaries[i][n]` is the `n -> n+1` boundary at `anh_axis[i]`.
    pub boundaries: Vec<Vec<LobeBoundary>>,
    /// `widths[i][n - 1]` is the width of lobe `n` at `anh_axis[i]`.
    pub widths: Vec<Vec<LobeWidth>>,
    pub crossings: Vec<LobeCrossing>,
}

/// Resolution of crossing locations along the anharmonicity axis.
pub const CROSSING_TOL: f64 = 1e-12;

fn reduced(params: &ModelParams, mu: f64) -> f64 {
    (mu - params.omega_c) / params.lambda1
}

fn lobe_width(params: &ModelParams, n: usize) -> Result<f64, SpectrumError> {
    Ok(lobe_boundary(params, n)? - lobe_boundary(params, n - 1)?)
}

fn refine_crossing(
    params: &ModelParams,
    n: usize,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64, SpectrumError> {
    let w_lo = lobe_width(&params.with_anh(lo), n)?;
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let w = lobe_width(&params.with_anh(mid), n)?;
        if w == 0.0 {
            return Ok(mid);
        }
        if (w > 0.0) == (w_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundaries `0 -> 1` through `n_max_lobe -> n_max_lobe + 1` at every
/// anharmonicity on the axis, lobe widths, and the points where a lobe
/// width changes sign between axis samples.
pub fn lobe_diagram(
    params: &ModelParams,
    anh_axis: &[f64],
    n_max_lobe: usize,
) -> Result<LobeDiagram, SpectrumError> {
    let mut boundaries = Vec::with_capacity(anh_axis.len());
    let mut widths = Vec::with_capacity(anh_axis.len());
    for &anh in anh_axis {
        let p = params.with_anh(anh);
        let row: Vec<LobeBoundary> = (0..=n_max_lobe)
            .map(|n| {
                lobe_boundary(&p, n).map(|mu| LobeBoundary {
                    n_from: n,
                    n_to: n + 1,
                    mu_boundary: reduced(&p, mu),
                    anh,
                })
            })
            .collect::<Result<_, _>>()?;
        let w: Vec<LobeWidth> = (1..=n_max_lobe)
            .map(|n| {
                let width = row[n].mu_boundary - row[n - 1].mu_boundary;
                LobeWidth {
                    n,
                    width,
                    covered: width <= 0.0,
                }
            })
            .collect();
        boundaries.push(row);
        widths.push(w);
    }

    let mut crossings = Vec::new();
    for n in 1..=n_max_lobe {
        let width_at = |i: usize| -> f64 { widths[i][n - 1].width };
        for i in 0..anh_axis.len() {
            let (anh, w) = (anh_axis[i], width_at(i));
            let anh_star = if w == 0.0 {
                Some(anh)
            } else if i + 1 < anh_axis.len() && w * width_at(i + 1) < 0.0 {
                Some(refine_crossing(params, n, anh, anh_axis[i + 1])?)
            } else {
                None
            };
            if let Some(anh_star) = anh_star {
                let p = params.with_anh(anh_star);
                crossings.push(LobeCrossing {
                    n,
                    anh: anh_star,
                    mu: reduced(&p, lobe_boundary(&p, n)?),
                });
            }
        }
    }
    crossings.sort_by(|a, b| a.n.cmp(&b.n).then(a.anh.total_cmp(&b.anh)));
    crossings.dedup_by(|a, b| a.n == b.n && (a.anh - b.anh).abs() <= 1e-9);

    Ok(LobeDiagram {
        anh_axis: anh_axis.to_vec(),
        boundaries,
        widths,
        crossings,
    })
}
