//! Naive dense reference routines used by brute-force checks.
//!
//! These deliberately avoid the Cholesky and eigendecomposition paths used
//! by the main operations so that cross-checks between the two routes are
//! meaningful.

/// Determinant of the principal minor `a[indices, indices]` by Gaussian
/// elimination with partial pivoting.
pub fn det_principal_minor(n: usize, a: &[f64], indices: &[usize]) -> f64 {
    let k = indices.len();
    if k == 0 {
        return 1.0;
    }
    let mut m = vec![0.0; k * k];
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            m[r * k + c] = a[i * n + j];
        }
    }
    det_in_place(k, &mut m)
}

/// Determinant of a dense row-major matrix, destroying the buffer.
pub fn det_in_place(k: usize, m: &mut [f64]) -> f64 {
    let mut det = 1.0;
    for s in 0..k {
        let mut p = s;
        for r in (s + 1)..k {
            if m[r * k + s].abs() > m[p * k + s].abs() {
                p = r;
            }
        }
        if m[p * k + s] == 0.0 {
            return 0.0;
        }
        if p != s {
            for j in 0..k {
                m.swap(s * k + j, p * k + j);
            }
            det = -det;
        }
        let pivot = m[s * k + s];
        det *= pivot;
        for r in (s + 1)..k {
            let factor = m[r * k + s] / pivot;
            for j in s..k {
                m[r * k + j] -= factor * m[s * k + j];
            }
        }
    }
    det
}

/// All 2^n subsets of `{0, .., n-1}` as bitmasks. Caller guards n.
pub fn all_masks(n: usize) -> impl Iterator<Item = u64> {
    assert!(n < 63, "subset enumeration limited to n < 63");
    0..(1u64 << n)
}

/// Item indices encoded by `mask`.
pub fn mask_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}
