//! Dense real-symmetric eigensolvers.
//!
//! [`eigh`] is a cyclic Jacobi solver returning the full spectrum. The
//! mean-field minimiser only ever needs the lowest eigenpair of a narrow
//! band matrix, so [`ground_pair`] takes a separate route: the smallest
//! eigenvalue is the supremum of shifts `s` for which `A - s I` admits an
//! `L D L^T` factorisation with positive pivots, found by bisection, and the
//! vector follows from inverse iteration with the same banded factor. The
//! two routes share no code, which lets each check the other.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("Jacobi iteration did not converge within {rotations} rotations")]
    NoConvergence { rotations: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("matrix must have dimension at least 1")]
    Empty,
}

/// Square matrix that is exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Rejects input that is not bitwise symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, EigenError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(EigenError::Ragged);
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                if rows[i][j].to_bits() != rows[j][i].to_bits() {
                    return Err(EigenError::NotSymmetric { row: i, col: j });
                }
                m.data[i * dim + j] = rows[i][j];
            }
        }
        Ok(m)
    }

    /// Builds the symmetric matrix whose upper triangle is `f(i, j)`, `i <= j`.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Writes `value` at `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn add_to_diagonal(&mut self, c: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += c;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn half_bandwidth(&self) -> usize {
        let n = self.dim;
        let mut m = 0;
        for i in 0..n {
            for j in (i + m + 1)..n {
                if self.data[i * n + j] != 0.0 {
                    m = j - i;
                }
            }
        }
        m
    }

    /// `P^T A P` for the permutation sending basis vector `perm[k]` to `k`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_upper_fn(self.dim, |i, j| self.get(perm[i], perm[j]))
    }

    fn check_finite(&self) -> Result<(), EigenError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(EigenError::NonFiniteEntry {
                row: k / self.dim,
                col: k % self.dim,
            }),
            None => Ok(()),
        }
    }
}

/// Ascending eigenvalues with column-matched orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Flips `v` so its largest-magnitude component (first one on ties) is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition, EigenError> {
    let n = a.dim;
    if n == 0 {
        return Err(EigenError::Empty);
    }
    a.check_finite()?;

    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let cap = 100 * n * n;
    let mut rotations = 0usize;

    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let g = 100.0 * apq.abs();
                if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                if rotations == cap {
                    return Err(EigenError::NoConvergence { rotations });
                }
                rotations += 1;
                rotated = true;

                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|k| v[k * n + col]).collect();
            fix_sign(&mut vec);
            vec
        })
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Lower band of a symmetric matrix, `rows[i * (band + 1) + t] = A[i][i - band + t]`.
struct LowerBand {
    n: usize,
    band: usize,
    rows: Vec<f64>,
    gershgorin_low: f64,
    min_diagonal: f64,
    scale: f64,
}

impl LowerBand {
    fn new(a: &SymmetricMatrix) -> Self {
        let n = a.dim;
        let band = a.half_bandwidth();
        let w = band + 1;
        let mut rows = vec![0.0; n * w];
        let mut gershgorin_low = f64::INFINITY;
        let mut min_diagonal = f64::INFINITY;
        let mut scale = 0.0f64;
        for i in 0..n {
            for t in 0..w {
                if let Some(j) = (i + t).checked_sub(band) {
                    rows[i * w + t] = a.get(i, j);
                }
            }
            let lo = i.saturating_sub(band);
            let hi = (i + band).min(n - 1);
            let radius: f64 = (lo..=hi)
                .filter(|&j| j != i)
                .map(|j| a.get(i, j).abs())
                .sum();
            let d = a.get(i, i);
            gershgorin_low = gershgorin_low.min(d - radius);
            min_diagonal = min_diagonal.min(d);
            scale = scale.max(d.abs() + radius);
        }
        Self {
            n,
            band,
            rows,
            gershgorin_low,
            min_diagonal,
            scale: scale.max(f64::MIN_POSITIVE),
        }
    }

    /// `L D L^T` factorisation of `A - shift I` without pivoting, stopping at
    /// the first nonpositive pivot. Returns whether the shifted matrix is
    /// positive definite; on success `l` and `d` hold the factors.
    fn factor_positive(&self, shift: f64, l: &mut [f64], d: &mut [f64]) -> bool {
        let (b, w) = (self.band, self.band + 1);
        for i in 0..self.n {
            let first = i.saturating_sub(b);
            let mut diag = self.rows[i * w + b] - shift;
            for j in first..i {
                let mut s = self.rows[i * w + (j + b - i)];
                let jfirst = first.max(j.saturating_sub(b));
                for k in jfirst..j {
                    s -= l[i * b + (k + b - i)] * l[j * b + (k + b - j)] * d[k];
                }
                let lij = s / d[j];
                l[i * b + (j + b - i)] = lij;
                diag -= lij * s;
            }
            if diag.is_nan() || diag <= 0.0 {
                return false;
            }
            d[i] = diag;
        }
        true
    }

    /// Solves `L D L^T x = y` in place.
    fn solve(&self, l: &[f64], d: &[f64], y: &mut [f64]) {
        let b = self.band;
        for i in 0..self.n {
            let first = i.saturating_sub(b);
            let mut s = y[i];
            for k in first..i {
                s -= l[i * b + (k + b - i)] * y[k];
            }
            y[i] = s;
        }
        for (yi, di) in y.iter_mut().zip(d) {
            *yi /= di;
        }
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + b + 1).min(self.n) {
                s -= l[k * b + (i + b - k)] * y[k];
            }
            y[i] = s;
        }
    }

    fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let (b, w) = (self.band, self.band + 1);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.rows[i * w..(i + 1) * w];
            let mut s = row[b] * x[i];
            for j in i.saturating_sub(b)..i {
                let aij = row[j + b - i];
                s += aij * x[j];
                y[j] += aij * x[i];
            }
            y[i] += s;
        }
    }

    /// Smallest eigenvalue and its unit eigenvector.
    ///
    /// A few bisection steps on positive definiteness give a lower bound
    /// `lo`; inverse iteration then runs with shifts `rho - |r|` that are
    /// certified to stay below the eigenvalue before each factorisation.
    /// When that certification fails (near-degenerate pair) plain bisection
    /// finishes the job.
    fn min_pair(&self) -> (f64, Vec<f64>) {
        let n = self.n;
        let mut l = vec![0.0; n * self.band];
        let mut d = vec![0.0; n];
        let tol = f64::EPSILON * self.scale;
        let mut lo = self.gershgorin_low - tol;
        let mut hi = self.min_diagonal;

        let bisect = |lo: &mut f64, hi: &mut f64, width: f64, l: &mut [f64], d: &mut [f64]| {
            while *hi - *lo > width {
                let mid = 0.5 * (*lo + *hi);
                if mid <= *lo || mid >= *hi {
                    break;
                }
                if self.factor_positive(mid, l, d) {
                    *lo = mid;
                } else {
                    *hi = mid;
                }
            }
        };
        bisect(&mut lo, &mut hi, 1e-3 * self.scale, &mut l, &mut d);

        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract())
            .collect();
        normalize(&mut v);
        let mut av = vec![0.0; n];
        let mut shift = lo;
        let factored = self.factor_positive(shift, &mut l, &mut d);
        for _ in 0..12 {
            if !factored {
                break;
            }
            self.solve(&l, &d, &mut v);
            normalize(&mut v);
            self.mul_vec(&v, &mut av);
            let rho: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
            let resid = v
                .iter()
                .zip(&av)
                .map(|(x, y)| (y - rho * x).powi(2))
                .sum::<f64>()
                .sqrt();
            hi = hi.min(rho);
            if resid <= 16.0 * tol {
                return (hi.max(lo), v);
            }
            let next = rho - resid;
            if next <= shift {
                // No progress in the certified bound: another plain inverse
                // iteration step with the current factor.
                continue;
            }
            if self.factor_positive(next, &mut l, &mut d) {
                lo = lo.max(next);
                shift = next;
            } else {
                break;
            }
        }

        bisect(&mut lo, &mut hi, tol, &mut l, &mut d);
        let mut gap = 1e-12 * self.scale;
        while !self.factor_positive(hi - gap, &mut l, &mut d) {
            gap *= 2.0;
        }
        for _ in 0..3 {
            self.solve(&l, &d, &mut v);
            normalize(&mut v);
        }
        (hi, v)
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Smallest eigenvalue; the same number [`ground_pair`] returns.
pub fn lowest_eigenvalue(a: &SymmetricMatrix) -> Result<f64, EigenError> {
    ground_pair(a).map(|(e, _)| e)
}

/// Smallest eigenvalue and a matching unit eigenvector.
///
/// Every shift that gets factorised is first shown to lie below the
/// eigenvalue, so the banded `L D L^T` factorisation never needs pivoting.
pub fn ground_pair(a: &SymmetricMatrix) -> Result<(f64, Vec<f64>), EigenError> {
    let n = a.dim;
    if n == 0 {
        return Err(EigenError::Empty);
    }
    a.check_finite()?;
    if n == 1 {
        return Ok((a.data[0], vec![1.0]));
    }
    let (energy, mut v) = LowerBand::new(a).min_pair();
    fix_sign(&mut v);
    Ok((energy, v))
}
