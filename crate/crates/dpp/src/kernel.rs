//! Symmetric kernel matrices and exact DPP probability computations:
//! normalization, subset log-probabilities, marginals, conditionals, and the
//! L <-> K correspondence.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::chol::{self, cholesky, log_det_principal_minor, log_det_psd};
use crate::eigen::{jacobi_eigen, Eigen};
use crate::error::{DppError, Result};
use crate::subset::Subset;

/// Absolute tolerance for symmetry of kernel entries.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues in [-PSD_TOL, 0) are clamped to zero; below is a hard error.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance on |phi| = 1 for similarity feature vectors.
pub const UNIT_TOL: f64 = 1e-9;

/// A real symmetric positive-semidefinite matrix with a cached
/// eigendecomposition. Serves as an L-ensemble kernel, a marginal kernel,
/// or a similarity matrix.
#[derive(Debug, Clone)]
pub struct SymmetricKernel {
    n: usize,
    data: Vec<f64>,
    eig: OnceLock<Eigen>,
}

impl SymmetricKernel {
    /// Builds a kernel from a row-major buffer, checking symmetry within
    /// `SYMMETRY_TOL` and then symmetrizing exactly.
    pub fn new(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(DppError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dev = (data[i * n + j] - data[j * n + i]).abs();
                if !(dev <= SYMMETRY_TOL) {
                    return Err(DppError::NotSymmetric { i, j, dev });
                }
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(SymmetricKernel {
            n,
            data,
            eig: OnceLock::new(),
        })
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricKernel {
            n,
            data: vec![0.0; n * n],
            eig: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut k = Self::zeros(n);
        for i in 0..n {
            k.data[i * n + i] = 1.0;
        }
        k
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut k = Self::zeros(n);
        for i in 0..n {
            k.data[i * n + i] = values[i];
        }
        k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The cached eigendecomposition, computed on first use. Compute-once
    /// and race-benign: concurrent callers may both run Jacobi but the
    /// published result is written exactly once.
    pub fn eigen(&self) -> Result<&Eigen> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = jacobi_eigen(self.n, &self.data)?;
        Ok(self.eig.get_or_init(|| e))
    }

    /// Eigenvalues validated against the PSD tolerance: values in
    /// [-PSD_TOL, 0) are clamped to zero (with a warning), more negative
    /// values are a hard error.
    pub fn psd_eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = self.eigen()?;
        let mut values = eig.values().to_vec();
        for v in &mut values {
            if *v < 0.0 {
                if *v < -PSD_TOL {
                    return Err(DppError::NotPsd { min: *v });
                }
                log::warn!("clamping eigenvalue {:e} to 0 within PSD tolerance", *v);
                *v = 0.0;
            }
        }
        Ok(values)
    }

    /// Eigenvalues validated for the marginal-kernel role: within
    /// [-PSD_TOL, 1 + PSD_TOL], clamped into [0, 1].
    pub fn marginal_eigenvalues(&self) -> Result<Vec<f64>> {
        let mut values = self.psd_eigenvalues()?;
        for v in &mut values {
            if *v > 1.0 {
                if *v > 1.0 + PSD_TOL {
                    return Err(DppError::NotMarginal { max: *v });
                }
                *v = 1.0;
            }
        }
        Ok(values)
    }

    /// log det(L + I) = Sum_k log(1 + lambda_k), the L-ensemble normalizer.
    pub fn log_normalizer(&self) -> Result<f64> {
        Ok(self.psd_eigenvalues()?.iter().map(|l| l.ln_1p()).sum())
    }

    /// log P_L(Y) = log det(L_Y) - log det(L + I), with det(L_emptyset) = 1.
    ///
    /// A numerically singular minor yields `NEG_INFINITY`: the subset has
    /// zero probability.
    pub fn log_prob(&self, subset: &Subset) -> Result<f64> {
        self.check_subset(subset)?;
        let num = log_det_principal_minor(self.n, &self.data, subset.indices());
        Ok(num - self.log_normalizer()?)
    }

    /// Marginal kernel K = Sum_k lambda_k/(1+lambda_k) v_k v_k^T.
    pub fn marginal_kernel(&self) -> Result<SymmetricKernel> {
        let values = self.psd_eigenvalues()?;
        let eig = self.eigen()?;
        let mut idx = 0;
        let data = eig.assemble(|_| {
            let l = values[idx];
            idx += 1;
            l / (1.0 + l)
        });
        SymmetricKernel::new(self.n, data)
    }

    /// Marginal kernel by solving (L + I) K = L column-wise with a Cholesky
    /// factorization; an algebraic alternative to the eigenvalue rescaling.
    pub fn marginal_kernel_via_solve(&self) -> Result<SymmetricKernel> {
        let n = self.n;
        let mut shifted = self.data.clone();
        for i in 0..n {
            shifted[i * n + i] += 1.0;
        }
        let factor = cholesky(n, &shifted)?;
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| self.get(i, j)).collect();
            let x = factor.solve(&col);
            for i in 0..n {
                data[i * n + j] = x[i];
            }
        }
        SymmetricKernel::new(n, data)
    }

    /// L = K (I - K)^{-1} via eigenvalue rescaling; errors when an
    /// eigenvalue reaches 1 - PSD_TOL and the inverse does not exist.
    pub fn l_from_k(&self) -> Result<SymmetricKernel> {
        let values = self.marginal_eigenvalues()?;
        if let Some(&bad) = values.iter().find(|&&v| v >= 1.0 - PSD_TOL) {
            return Err(DppError::InverseDoesNotExist { value: bad });
        }
        let eig = self.eigen()?;
        let mut idx = 0;
        let data = eig.assemble(|_| {
            let l = values[idx];
            idx += 1;
            l / (1.0 - l)
        });
        SymmetricKernel::new(self.n, data)
    }

    /// P(A subseteq Y) = det(K_A) for a marginal kernel.
    pub fn marginal_prob(&self, a: &Subset) -> Result<f64> {
        self.check_subset(a)?;
        self.marginal_eigenvalues()?;
        let log_det = log_det_principal_minor(self.n, &self.data, a.indices());
        Ok(log_det.exp())
    }

    /// P(Y = A u B | A subseteq Y) = det(L_{A u B}) / det(L + I_{Y \ A}).
    pub fn conditional_prob(&self, a: &Subset, b: &Subset) -> Result<f64> {
        self.check_subset(a)?;
        self.check_subset(b)?;
        let union = a.union_disjoint(b)?;
        let num = log_det_principal_minor(self.n, &self.data, union.indices());

        let n = self.n;
        let mut shifted = self.data.clone();
        for i in 0..n {
            if !a.contains(i) {
                shifted[i * n + i] += 1.0;
            }
        }
        let den = log_det_psd(n, &mut shifted);
        if den == f64::NEG_INFINITY {
            return Err(DppError::ZeroProbabilityCondition);
        }
        Ok((num - den).exp())
    }

    /// Similarity matrix S_ij = L_ij / sqrt(L_ii L_jj); unit diagonal.
    pub fn similarity_of(&self) -> Result<SymmetricKernel> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) <= 0.0 {
                return Err(DppError::ZeroDiagonal { index: i });
            }
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            let di = self.get(i, i).sqrt();
            for j in 0..n {
                let dj = self.get(j, j).sqrt();
                data[i * n + j] = self.get(i, j) / (di * dj);
            }
        }
        SymmetricKernel::new(n, data)
    }

    fn check_subset(&self, s: &Subset) -> Result<()> {
        if let Some(&last) = s.indices().last() {
            if last >= self.n {
                return Err(DppError::IndexOutOfBounds {
                    index: last,
                    n: self.n,
                });
            }
        }
        Ok(())
    }

    /// Plain-text serialization: first line n, then n whitespace-separated
    /// rows. Values are written in shortest round-trip scientific notation,
    /// so parsing recovers every bit.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", self.n)?;
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(w, " ")?;
                }
                write!(w, "{:e}", self.get(i, j))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| DppError::MatrixFormat("empty file".into()))??;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| DppError::MatrixFormat(format!("bad size line `{header}`")))?;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| DppError::MatrixFormat(format!("missing row {i}")))??;
            let row: std::result::Result<Vec<f64>, _> = line
                .split_whitespace()
                .map(|tok| tok.parse::<f64>())
                .collect();
            let row = row.map_err(|e| DppError::MatrixFormat(format!("row {i}: {e}")))?;
            if row.len() != n {
                return Err(DppError::MatrixFormat(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        SymmetricKernel::new(n, data)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_text(&mut f)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_text(&mut f)
    }
}

/// Quality/similarity decomposition: positive per-item qualities and unit
/// similarity vectors of a shared dimension.
#[derive(Debug, Clone)]
pub struct QPhiDecomposition {
    q: Vec<f64>,
    phi: Vec<Vec<f64>>,
}

impl QPhiDecomposition {
    pub fn new(q: Vec<f64>, phi: Vec<Vec<f64>>) -> Result<Self> {
        if q.len() != phi.len() {
            return Err(DppError::DimensionMismatch {
                expected: q.len(),
                got: phi.len(),
            });
        }
        for (i, &qi) in q.iter().enumerate() {
            if !(qi > 0.0) || !qi.is_finite() {
                return Err(DppError::NonPositiveQuality {
                    index: i,
                    value: qi,
                });
            }
        }
        let dim = phi.first().map_or(0, Vec::len);
        for (i, p) in phi.iter().enumerate() {
            if p.len() != dim {
                return Err(DppError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(DppError::NonUnitPhi { index: i, norm });
            }
        }
        Ok(QPhiDecomposition { q, phi })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn quality(&self) -> &[f64] {
        &self.q
    }

    pub fn phi(&self, i: usize) -> &[f64] {
        &self.phi[i]
    }

    /// Gram construction L_ij = q_i phi_i . phi_j q_j; PSD by construction
    /// with diagonal q_i^2.
    pub fn build_l(&self) -> SymmetricKernel {
        let n = self.q.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let dot: f64 = self.phi[i]
                    .iter()
                    .zip(&self.phi[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let v = self.q[i] * dot * self.q[j];
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        SymmetricKernel {
            n,
            data,
            eig: OnceLock::new(),
        }
    }
}

/// Unit similarity vectors recovered from the rows of the Cholesky factor
/// of a full-rank similarity matrix.
pub fn phi_from_similarity(s: &SymmetricKernel) -> Result<Vec<Vec<f64>>> {
    let n = s.n();
    let factor = chol::cholesky(n, s.data())?;
    Ok((0..n).map(|i| factor.row(i)[..n].to_vec()).collect())
}
