mod common;

use jch_phase::meanfield::{converge_truncation, density, field_expectation, minimize_psi};
use jch_phase::{lobe_boundary, ModelParams, SearchConfig};

fn point(anh: f64, j: f64, mu: f64) -> ModelParams {
    ModelParams {
        anh,
        j_hop: j,
        mu,
        ..ModelParams::default()
    }
}

fn rho_at(anh: f64, j: f64, mu: f64) -> f64 {
    let search = SearchConfig::default();
    converge_truncation(&point(anh, j, mu), search.n_max_start, &search)
        .unwrap()
        .rho
}

/// Chemical potential where the density crosses `level`, by bisection.
fn density_step(anh: f64, j: f64, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(rho_at(anh, j, lo) < level && rho_at(anh, j, hi) > level);
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if rho_at(anh, j, mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn weak_hopping_density_steps_sit_on_lobe_boundaries() {
    let j = 1e-4;
    let p = point(1.0, 0.0, 0.0);
    let b: Vec<f64> = (0..4).map(|n| lobe_boundary(&p, n).unwrap()).collect();
    let mut lo = -2.0;
    for n in 0..3 {
        let hi = 0.5 * (b[n] + b[n + 1]);
        let mu = density_step(1.0, j, n as f64 + 0.5, lo, hi);
        assert!((mu - b[n]).abs() <= 5e-3, "step {n}: {mu} vs {}", b[n]);
        lo = hi;
    }
    // Harmonic qubit: the density jumps from 0 straight to 2.
    let p0 = point(0.0, 0.0, 0.0);
    let (b0, b2) = (
        lobe_boundary(&p0, 0).unwrap(),
        lobe_boundary(&p0, 2).unwrap(),
    );
    let mu = density_step(0.0, j, 1.0, -2.0, 0.5 * (b0 + b2));
    assert!((mu - b0).abs() <= 5e-3);
    assert!(rho_at(0.0, j, b0 + 0.02) > 1.9);
}

#[test]
fn self_consistent_on_a_coarse_grid() {
    let search = SearchConfig::default();
    for ji in 0..5 {
        for mi in 0..6 {
            let (j, mu) = (0.02 + 0.03 * ji as f64, -2.2 + 0.3 * mi as f64);
            if 3.0 * j >= -mu {
                continue;
            }
            let Ok(s) = converge_truncation(&point(1.0, j, mu), 4, &search) else {
                continue;
            };
            if s.psi_min > 1e-6 {
                let a = field_expectation(&s.ground_vector);
                assert!(
                    (a - s.psi_min).abs() <= 1e-6,
                    "J={j} mu={mu}: {a} vs {}",
                    s.psi_min
                );
            }
        }
    }
}

#[test]
fn doubling_converged_cutoff_changes_nothing() {
    let search = SearchConfig::default();
    for &(anh, j, mu) in &[
        (1.0, 0.05, -1.5),
        (0.0, 0.1, -0.9),
        (-1.0, 0.15, -1.2),
        (1.0, 0.001, -0.7),
    ] {
        let p = point(anh, j, mu);
        let s = converge_truncation(&p, 4, &search).unwrap();
        let t = minimize_psi(&p, 2 * s.n_max_used, &search).unwrap();
        assert!((s.psi_min - t.psi_min).abs() <= 1e-8);
        assert!((s.rho - t.rho).abs() <= 1e-8);
    }
}

#[test]
fn mott_densities_are_integers_and_match_finite_difference() {
    let search = SearchConfig::default();
    for (mu, n) in [(-1.8, 0.0), (-0.9, 1.0), (-0.7, 2.0)] {
        let p = point(1.0, 1e-3, mu);
        let s = converge_truncation(&p, 4, &search).unwrap();
        assert_eq!(s.psi_min, 0.0);
        assert!((s.rho - n).abs() <= 1e-9, "{mu}: {}", s.rho);
        let d = density(&p, &s, &search).unwrap();
        assert!(d.warning.is_none());
        assert!((d.rho_fd - n).abs() <= 1e-5);
    }
}
