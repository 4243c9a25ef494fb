//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{DppError, Result};

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted in descending order; `vectors` holds the
/// orthonormal eigenvectors as columns of a row-major n x n matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl Eigen {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Component i of eigenvector k.
    #[inline]
    pub fn vector_component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.n + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vector_component(i, k)).collect()
    }

    /// Sum_k f(lambda_k) v_k v_k^T as a row-major dense matrix.
    pub fn assemble(&self, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vector_component(i, k);
                if vi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += w * vi * self.vector_component(j, k);
                }
            }
        }
        out
    }

    /// Reconstruction Sum_k lambda_k v_k v_k^T; used to validate the cache.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.assemble(|x| x)
    }
}

fn off_diagonal_frobenius(n: usize, a: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigendecomposition of the symmetric matrix `a` (row-major, length n*n).
///
/// Cyclic sweeps of Jacobi rotations until the off-diagonal Frobenius mass
/// drops below 1e-12 (scaled by the matrix norm when that norm exceeds one,
/// so the threshold stays attainable in f64 for large-entry kernels).
pub fn jacobi_eigen(n: usize, a: &[f64]) -> Result<Eigen> {
    assert_eq!(a.len(), n * n, "matrix buffer size mismatch");
    if n == 0 {
        return Ok(Eigen {
            n,
            values: vec![],
            vectors: vec![],
        });
    }

    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = frobenius(&m).max(1.0);
    let tol = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_frobenius(n, &m) < tol {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                // Rotations below the resolution of the diagonal do nothing.
                if apq.abs() <= f64::EPSILON * 1e-3 * (m[p * n + p].abs() + m[q * n + q].abs()) {
                    continue;
                }
                rotated = true;

                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = m[p * n + p];
                let aqq = m[q * n + q];
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[i * n + p];
                        let aiq = m[i * n + q];
                        let new_ip = aip - s * (aiq + tau * aip);
                        let new_iq = aiq + s * (aip - tau * aiq);
                        m[i * n + p] = new_ip;
                        m[p * n + i] = new_ip;
                        m[i * n + q] = new_iq;
                        m[q * n + i] = new_iq;
                    }
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip - s * (viq + tau * vip);
                    v[i * n + q] = viq + s * (vip - tau * viq);
                }
            }
        }
        if !rotated {
            // Every remaining off-diagonal is below f64 resolution.
            converged = true;
            break;
        }
    }
    if !converged && off_diagonal_frobenius(n, &m) >= tol {
        return Err(DppError::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j * n + j]
            .partial_cmp(&m[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + col] = v[i * n + k];
        }
    }

    Ok(Eigen { n, values, vectors })
}
