//! Cholesky routines: log-determinants of principal minors via
//! symmetric-pivoting factorization, plain factorization, and an
//! incrementally grown factor for greedy selection.

use crate::error::{DppError, Result};

/// Pivots below this are treated as a numerically zero determinant.
pub const PIVOT_TOL: f64 = 1e-12;

/// log det of the principal minor `a[indices, indices]` of a PSD matrix.
///
/// Symmetric-pivoting Cholesky; a pivot below `PIVOT_TOL` means the minor is
/// numerically singular (or indefinite) and the determinant is reported as
/// zero, i.e. `f64::NEG_INFINITY` in the log domain. The empty minor has
/// determinant one.
pub fn log_det_principal_minor(n: usize, a: &[f64], indices: &[usize]) -> f64 {
    let k = indices.len();
    if k == 0 {
        return 0.0;
    }
    debug_assert!(indices.iter().all(|&i| i < n));
    let mut m = vec![0.0; k * k];
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            m[r * k + c] = a[i * n + j];
        }
    }
    log_det_psd(k, &mut m)
}

/// log det of a PSD matrix, destroying the buffer. `NEG_INFINITY` if singular.
pub fn log_det_psd(k: usize, m: &mut [f64]) -> f64 {
    let mut log_det = 0.0;
    for s in 0..k {
        // Largest remaining diagonal entry as the next pivot.
        let mut p = s;
        for r in (s + 1)..k {
            if m[r * k + r] > m[p * k + p] {
                p = r;
            }
        }
        if p != s {
            swap_symmetric(k, m, s, p);
        }
        let d = m[s * k + s];
        if d < PIVOT_TOL {
            return f64::NEG_INFINITY;
        }
        log_det += d.ln();
        for i in (s + 1)..k {
            let mis = m[i * k + s];
            for j in (s + 1)..=i {
                let upd = mis * m[j * k + s] / d;
                m[i * k + j] -= upd;
                if i != j {
                    m[j * k + i] = m[i * k + j];
                }
            }
        }
    }
    log_det
}

fn swap_symmetric(k: usize, m: &mut [f64], a: usize, b: usize) {
    for j in 0..k {
        m.swap(a * k + j, b * k + j);
    }
    for i in 0..k {
        m.swap(i * k + a, i * k + b);
    }
}

/// Lower-triangular Cholesky factor C with `a = C C^T`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    lower: Vec<f64>,
}

/// Plain (unpivoted) Cholesky; fails if a pivot drops below `PIVOT_TOL`.
pub fn cholesky(n: usize, a: &[f64]) -> Result<CholeskyFactor> {
    let mut lower = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for t in 0..j {
                sum -= lower[i * n + t] * lower[j * n + t];
            }
            if i == j {
                if sum < PIVOT_TOL {
                    return Err(DppError::CholeskyFailed {
                        step: i,
                        pivot: sum,
                    });
                }
                lower[i * n + i] = sum.sqrt();
            } else {
                lower[i * n + j] = sum / lower[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { n, lower })
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row i of the factor (columns 0..=i are meaningful).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.lower[i * self.n..i * self.n + self.n]
    }

    /// Solves `C C^T x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            for t in 0..i {
                x[i] -= self.lower[i * n + t] * x[t];
            }
            x[i] /= self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            for t in (i + 1)..n {
                x[i] -= self.lower[t * n + i] * x[t];
            }
            x[i] /= self.lower[i * n + i];
        }
        x
    }
}

/// Cholesky factor of a principal submatrix, grown one index at a time.
///
/// Supports O(k^2) Schur-complement queries for candidate items, which is
/// the incremental gain computation behind greedy MAP selection.
#[derive(Debug, Clone, Default)]
pub struct GrowingCholesky {
    // Row i has i+1 entries (lower triangle, packed).
    rows: Vec<Vec<f64>>,
    /// Set once a selected item made the underlying minor numerically
    /// singular; every later determinant is zero.
    singular: bool,
}

impl GrowingCholesky {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// log det of the current minor.
    pub fn log_det(&self) -> f64 {
        if self.singular {
            return f64::NEG_INFINITY;
        }
        2.0 * self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r[i].ln())
            .sum::<f64>()
    }

    /// Schur complement of a candidate: `diag - c^T c` where `C c = cross`.
    ///
    /// `cross` holds the kernel entries between the already-selected items
    /// (in selection order) and the candidate; `diag` is the candidate's
    /// diagonal entry. Returns the solved column and the complement, which
    /// is the factor by which the determinant grows if the candidate is
    /// appended. Meaningless once the factor is singular.
    pub fn schur(&self, cross: &[f64], diag: f64) -> (Vec<f64>, f64) {
        debug_assert_eq!(cross.len(), self.rows.len());
        let mut c = cross.to_vec();
        for i in 0..c.len() {
            for t in 0..i {
                c[i] -= self.rows[i][t] * c[t];
            }
            c[i] /= self.rows[i][i];
        }
        let s = diag - c.iter().map(|x| x * x).sum::<f64>();
        (c, s)
    }

    /// Appends a candidate previously evaluated by [`Self::schur`].
    pub fn push(&mut self, mut column: Vec<f64>, schur_complement: f64) {
        if self.singular || schur_complement < PIVOT_TOL {
            self.singular = true;
            column.push(0.0);
        } else {
            column.push(schur_complement.sqrt());
        }
        self.rows.push(column);
    }
}
