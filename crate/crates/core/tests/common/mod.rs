//! Reference computations that share no code with the library.

#![allow(dead_code)]

use jch_phase::ModelParams;

/// Entries of the `N`-excitation block in the basis `|g,N>, |e,N-1>, |f,N-2>`,
/// written out directly from the Hamiltonian.
pub fn sector_entries(p: &ModelParams, n: usize) -> ([f64; 3], f64, f64) {
    let nf = n as f64;
    let diag = [
        nf * p.omega_c,
        nf * p.omega_c + p.delta,
        nf * p.omega_c + 2.0 * p.delta + p.anh,
    ];
    (diag, nf.sqrt() * p.lambda1, (nf - 1.0).sqrt() * p.lambda2)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All three roots of `det(M - E) = 0` for a symmetric tridiagonal 3x3 block,
/// ascending. The cubic's critical points split the real line into three
/// monotone pieces, each holding one root; each root is bisected.
pub fn cubic_roots(diag: [f64; 3], s: f64, t: f64) -> [f64; 3] {
    let [a, b, c] = diag;
    let det = |e: f64| (a - e) * ((b - e) * (c - e) - t * t) - s * s * (c - e);
    let tr = a + b + c;
    let m2 = a * b + b * c + a * c - s * s - t * t;
    let disc = (tr * tr - 3.0 * m2).max(0.0).sqrt();
    let (c1, c2) = ((tr - disc) / 3.0, (tr + disc) / 3.0);
    let radius = a.abs().max(b.abs()).max(c.abs()) + s.abs() + t.abs() + 1.0;
    [
        bisect(det, -radius, c1),
        bisect(det, c1, c2),
        bisect(det, c2, radius),
    ]
}

/// Lowest root of the characteristic polynomial of the `N >= 2` block.
pub fn lower_branch_oracle(p: &ModelParams, n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => {
            // 2x2 block by the quadratic formula.
            let (a, b) = (p.omega_c, p.omega_c + p.delta);
            0.5 * (a + b) - (0.25 * (a - b).powi(2) + p.lambda1 * p.lambda1).sqrt()
        }
        _ => {
            let (d, s, t) = sector_entries(p, n);
            cubic_roots(d, s, t)[0]
        }
    }
}

/// Dense symmetric matrix with unit-stride rows.
pub type Dense = Vec<Vec<f64>>;

/// Mean-field single-site Hamiltonian assembled from ladder-operator
/// matrices: `H = w a'a + (w + delta) |e><e| + (2w + 2 delta + anh) |f><f|`
/// `+ lambda1 (a' |g><e| + h.c.) + lambda2 (a' |e><f| + h.c.)`
/// `- mu N - zJ psi (a + a') + zJ psi^2`, basis index `3 n + level`.
pub fn mean_field_dense(p: &ModelParams, psi: f64, n_max: usize) -> Dense {
    let dim = 3 * (n_max + 1);
    let mut h = vec![vec![0.0; dim]; dim];
    let idx = |level: usize, n: usize| 3 * n + level;
    let zj = p.z as f64 * p.j_hop;
    let qubit = [
        0.0,
        p.omega_c + p.delta,
        2.0 * (p.omega_c + p.delta) + p.anh,
    ];
    for n in 0..=n_max {
        for level in 0..3 {
            let i = idx(level, n);
            h[i][i] =
                n as f64 * p.omega_c + qubit[level] - p.mu * (n + level) as f64 + zj * psi * psi;
            if n < n_max {
                // a' raises the photon number: <n+1| a' |n> = sqrt(n+1).
                let amp = ((n + 1) as f64).sqrt();
                let j = idx(level, n + 1);
                h[i][j] -= zj * psi * amp;
                h[j][i] -= zj * psi * amp;
                if level >= 1 {
                    let lam = if level == 1 { p.lambda1 } else { p.lambda2 };
                    // a' sigma_-: |level, n> -> |level - 1, n + 1>.
                    let k = idx(level - 1, n + 1);
                    h[i][k] += lam * amp;
                    h[k][i] += lam * amp;
                }
            }
        }
    }
    h
}

/// Smallest eigenvalue and vector by power iteration on `c I - H`.
pub fn power_ground(h: &Dense) -> (f64, Vec<f64>) {
    let n = h.len();
    let radius: f64 = h
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let shift = radius + 1.0;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    let mut rq = 0.0;
    for it in 0..500_000 {
        let hv: Vec<f64> = (0..n)
            .map(|i| h[i].iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let mut w: Vec<f64> = v.iter().zip(&hv).map(|(x, y)| shift * x - y).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        let next: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        v = w;
        if it > 10 && (next - rq).abs() < 1e-15 * shift {
            break;
        }
        rq = next;
    }
    let hv: Vec<f64> = (0..n)
        .map(|i| h[i].iter().zip(&v).map(|(a, b)| a * b).sum())
        .collect();
    (v.iter().zip(&hv).map(|(a, b)| a * b).sum(), v)
}
