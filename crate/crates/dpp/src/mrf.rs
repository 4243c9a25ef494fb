//! Numerical comparison of 3-item DPPs and pairwise repulsive MRFs:
//! ternary factor tables, the similarity transitivity constraint, and
//! manifold slices of realizable factor values.

use std::collections::HashSet;

use crate::eigen::jacobi_eigen;
use crate::error::{DppError, Result};
use crate::naive;

/// Ternary factor values psi(y1 y2 y3) indexed by the binary configuration
/// read as a 3-bit number (y1 the high bit). The first four entries
/// (000, 001, 010, 100) are identically one.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryFactorTable {
    values: [f64; 8],
}

impl TernaryFactorTable {
    fn from_interactions(v110: f64, v101: f64, v011: f64, v111: f64) -> Self {
        let mut values = [1.0; 8];
        values[0b110] = v110;
        values[0b101] = v101;
        values[0b011] = v011;
        values[0b111] = v111;
        TernaryFactorTable { values }
    }

    pub fn get(&self, y1: bool, y2: bool, y3: bool) -> f64 {
        self.values[((y1 as usize) << 2) | ((y2 as usize) << 1) | y3 as usize]
    }

    /// All eight values in configuration order 000..111.
    pub fn values(&self) -> &[f64; 8] {
        &self.values
    }
}

/// Pairwise log-linear model parameters with repulsive (non-positive)
/// interactions.
#[derive(Debug, Clone)]
pub struct MrfParams {
    pub node: [f64; 3],
    /// Interaction weights (w12, w13, w23), each <= 0.
    pub pairwise: [f64; 3],
}

impl MrfParams {
    pub fn new(node: [f64; 3], pairwise: [f64; 3]) -> Result<Self> {
        for &w in &pairwise {
            if w > 0.0 {
                return Err(DppError::InvalidParameter {
                    name: "pairwise weight",
                    value: w,
                });
            }
        }
        Ok(MrfParams { node, pairwise })
    }
}

/// Three-item DPP parameters: positive qualities and the off-diagonal
/// similarities (S12, S13, S23) of a PSD unit-diagonal matrix.
#[derive(Debug, Clone)]
pub struct DppParams3 {
    pub q: [f64; 3],
    pub s: [f64; 3],
}

impl DppParams3 {
    pub fn new(q: [f64; 3], s: [f64; 3]) -> Result<Self> {
        for (i, &qi) in q.iter().enumerate() {
            if !(qi > 0.0) {
                return Err(DppError::NonPositiveQuality {
                    index: i,
                    value: qi,
                });
            }
        }
        for &sij in &s {
            if sij.abs() > 1.0 {
                return Err(DppError::InvalidParameter {
                    name: "similarity",
                    value: sij,
                });
            }
        }
        let matrix = similarity_matrix(s);
        let eig = jacobi_eigen(3, &matrix)?;
        let min = eig.values()[2];
        if min < -1e-9 {
            return Err(DppError::NotPsd { min });
        }
        Ok(DppParams3 { q, s })
    }
}

fn similarity_matrix(s: [f64; 3]) -> [f64; 9] {
    let [s12, s13, s23] = s;
    [1.0, s12, s13, s12, 1.0, s23, s13, s23, 1.0]
}

/// MRF ternary factor: psi(y) = exp(Sum_{i<j} w_ij y_i y_j).
pub fn mrf_factor_table(p: &MrfParams) -> TernaryFactorTable {
    let [w12, w13, w23] = p.pairwise;
    TernaryFactorTable::from_interactions(w12.exp(), w13.exp(), w23.exp(), (w12 + w13 + w23).exp())
}

/// DPP ternary factor: psi(y) = det(S_Y) in closed form; the pair entries
/// are 1 - S_ij^2 and the triple entry is
/// 1 + 2 S12 S13 S23 - S12^2 - S13^2 - S23^2.
pub fn dpp_factor_table(p: &DppParams3) -> TernaryFactorTable {
    let [s12, s13, s23] = p.s;
    TernaryFactorTable::from_interactions(
        1.0 - s12 * s12,
        1.0 - s13 * s13,
        1.0 - s23 * s23,
        1.0 + 2.0 * s12 * s13 * s23 - s12 * s12 - s13 * s13 - s23 * s23,
    )
}

/// Transitivity constraint on similarities: for every rotation,
/// sqrt(1 - S_ij^2) + sqrt(1 - S_jk^2) >= sqrt(1 - S_ik^2).
pub fn triangle_feasible(s12: f64, s13: f64, s23: f64) -> bool {
    let a = (1.0 - s12 * s12).max(0.0).sqrt();
    let b = (1.0 - s13 * s13).max(0.0).sqrt();
    let c = (1.0 - s23 * s23).max(0.0).sqrt();
    a + c >= b && c + b >= a && b + a >= c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    Mrf,
    Dpp,
}

/// Default tolerance on the 111 entry when scanning manifold slices.
pub const SLICE_TOL: f64 = 1e-3;

/// Realizable (psi110, psi101, psi011) triples with psi(111) near `v111`.
///
/// The MRF slice scans (w12, w13) over [ln v111, 0]^2 and solves
/// w23 = ln v111 - w12 - w13, keeping it when non-positive, so the 111
/// entry is met exactly. The DPP slice scans (S12, S13, S23) over
/// [-1, 1]^3, keeping PSD points whose determinant is within `tol` of
/// `v111`. Points are emitted in row-major grid order with exact
/// duplicates removed.
pub fn manifold_slice(
    kind: SliceKind,
    v111: f64,
    resolution: usize,
    tol: f64,
) -> Result<Vec<[f64; 3]>> {
    if !(v111 > 0.0 && v111 <= 1.0) {
        return Err(DppError::InvalidParameter {
            name: "v111",
            value: v111,
        });
    }
    if resolution < 2 {
        return Err(DppError::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
        });
    }

    let mut seen: HashSet<[u64; 3]> = HashSet::new();
    let mut points = Vec::new();
    let mut emit = |p: [f64; 3]| {
        if seen.insert([p[0].to_bits(), p[1].to_bits(), p[2].to_bits()]) {
            points.push(p);
        }
    };

    match kind {
        SliceKind::Mrf => {
            let lo = v111.ln();
            let grid = |t: usize| lo + (0.0 - lo) * t as f64 / (resolution - 1) as f64;
            for a in 0..resolution {
                let w12 = grid(a);
                for b in 0..resolution {
                    let w13 = grid(b);
                    let w23 = lo - w12 - w13;
                    if w23 <= 1e-12 {
                        emit([w12.exp(), w13.exp(), w23.min(0.0).exp()]);
                    }
                }
            }
        }
        SliceKind::Dpp => {
            let grid = |t: usize| -1.0 + 2.0 * t as f64 / (resolution - 1) as f64;
            for a in 0..resolution {
                let s12 = grid(a);
                for b in 0..resolution {
                    let s13 = grid(b);
                    for c in 0..resolution {
                        let s23 = grid(c);
                        let det = 1.0 + 2.0 * s12 * s13 * s23 - s12 * s12 - s13 * s13 - s23 * s23;
                        // PSD of a unit-diagonal 3x3 with |S_ij| <= 1 is
                        // exactly det >= 0.
                        if det >= -1e-12 && (det - v111).abs() <= tol {
                            emit([1.0 - s12 * s12, 1.0 - s13 * s13, 1.0 - s23 * s23]);
                        }
                    }
                }
            }
        }
    }
    Ok(points)
}

/// A two-item distribution (p00, p10, p01, p11) with positive entries and
/// non-positive correlation admits both a repulsive MRF and an L-ensemble.
/// These constructions back the two-item equivalence check.
pub mod two_item {
    use super::*;

    /// (w1, w2, w12) with P(y) proportional to exp(w1 y1 + w2 y2 + w12 y1 y2).
    pub fn mrf_from_distribution(p: [f64; 4]) -> Result<[f64; 3]> {
        let [p00, p10, p01, p11] = validate(p)?;
        let w12 = (p11 * p00 / (p10 * p01)).ln();
        if w12 > 1e-12 {
            return Err(DppError::InvalidParameter {
                name: "positive correlation",
                value: w12,
            });
        }
        Ok([(p10 / p00).ln(), (p01 / p00).ln(), w12.min(0.0)])
    }

    /// 2x2 L-ensemble kernel reproducing the distribution.
    pub fn l_from_distribution(p: [f64; 4]) -> Result<[f64; 4]> {
        let [p00, p10, p01, p11] = validate(p)?;
        let a = p10 / p00;
        let c = p01 / p00;
        let b2 = a * c - p11 / p00;
        if b2 < -1e-12 {
            return Err(DppError::InvalidParameter {
                name: "positive correlation",
                value: b2,
            });
        }
        let b = b2.max(0.0).sqrt();
        Ok([a, b, b, c])
    }

    fn validate(p: [f64; 4]) -> Result<[f64; 4]> {
        for &x in &p {
            if !(x > 0.0) {
                return Err(DppError::InvalidParameter {
                    name: "probability",
                    value: x,
                });
            }
        }
        let total: f64 = p.iter().sum();
        Ok([p[0] / total, p[1] / total, p[2] / total, p[3] / total])
    }
}

/// det(S_Y) for the similarity matrix of `s` restricted to the items set in
/// the configuration, via the naive reference determinant.
pub fn similarity_subdeterminant(s: [f64; 3], y1: bool, y2: bool, y3: bool) -> f64 {
    let matrix = similarity_matrix(s);
    let indices: Vec<usize> = [y1, y2, y3]
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect();
    naive::det_principal_minor(3, &matrix, &indices)
}
