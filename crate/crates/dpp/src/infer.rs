//! Budget-constrained MAP approximation: greedy cost-scaled selection,
//! exact enumeration (test oracle), sampled brute force, and the maximum
//! marginal relevance baseline.

use std::collections::HashMap;

use crate::chol::{log_det_principal_minor, GrowingCholesky, PIVOT_TOL};
use crate::error::{DppError, Result};
use crate::kernel::SymmetricKernel;
use crate::naive;
use crate::sampler::SamplerState;
use crate::subset::Subset;

/// Per-item costs and a total budget in the same units.
#[derive(Debug, Clone)]
pub struct BudgetSpec {
    costs: Vec<f64>,
    budget: f64,
}

impl BudgetSpec {
    pub fn new(costs: Vec<f64>, budget: f64) -> Result<Self> {
        if !(budget >= 0.0) {
            return Err(DppError::InvalidParameter {
                name: "budget",
                value: budget,
            });
        }
        if let Some(&bad) = costs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(DppError::InvalidParameter {
                name: "cost",
                value: bad,
            });
        }
        Ok(BudgetSpec { costs, budget })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn cost_of(&self, subset: &Subset) -> f64 {
        subset.iter().map(|i| self.costs[i]).sum()
    }
}

/// How a selection run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStatus {
    /// Search completed over its full space.
    Converged,
    /// No affordable item remained.
    BudgetExhausted,
    /// Best remaining gain was non-positive (non-negative-gain mode).
    GainStopped,
    /// No sample fell inside the cost window; caller may widen it.
    WindowEmpty,
}

/// A chosen subset with its selection order, cost, and unnormalized
/// log-probability log det(L_chosen).
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub chosen: Subset,
    pub order: Vec<usize>,
    pub total_cost: f64,
    pub unnorm_log_det: f64,
    pub status: SelectionStatus,
}

/// Stopping rule for [`greedy_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyMode {
    /// Keep selecting until no affordable item remains, even at a loss.
    #[default]
    Literal,
    /// Additionally stop once the best gain is non-positive.
    NonNegGain,
}

/// Greedy budgeted MAP: repeatedly add the item maximizing
/// (P(Y u {i}) - P(Y)) / cost(i) among affordable candidates, then drop
/// candidates that no longer fit.
///
/// Gains are compared through the Schur complement s_i of the incrementally
/// maintained Cholesky factor of L_Y: the true gain is
/// det(L_Y) (s_i - 1) / det(L+I), and the positive common factor leaves the
/// argmax of (s_i - 1)/cost(i) unchanged. Ties break to the lowest index.
pub fn greedy_map(
    l: &SymmetricKernel,
    budget: &BudgetSpec,
    mode: GreedyMode,
) -> Result<SelectionResult> {
    let n = l.n();
    if budget.costs().len() != n {
        return Err(DppError::DimensionMismatch {
            expected: n,
            got: budget.costs().len(),
        });
    }

    let mut total_cost = 0.0;
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| budget.costs()[i] <= budget.budget())
        .collect();
    let mut order: Vec<usize> = Vec::new();
    let mut factor = GrowingCholesky::new();
    let mut status = SelectionStatus::BudgetExhausted;

    while !candidates.is_empty() {
        let mut best: Option<(usize, f64, Vec<f64>, f64)> = None; // (item, ratio, column, schur)
        for &i in &candidates {
            let cost = budget.costs()[i];
            let (column, schur, gain_factor) = if factor.is_singular() {
                // det(L_Y) = 0: every gain is exactly zero.
                (Vec::new(), 0.0, 0.0)
            } else {
                let cross: Vec<f64> = order.iter().map(|&j| l.get(j, i)).collect();
                let (col, s) = factor.schur(&cross, l.get(i, i));
                (col, s, s - 1.0)
            };
            let ratio = if cost > 0.0 {
                gain_factor / cost
            } else if gain_factor > 0.0 {
                return Err(DppError::ZeroCostPositiveGain { index: i });
            } else {
                // Zero cost, non-positive gain: never preferred.
                f64::NEG_INFINITY
            };
            let better = match &best {
                None => true,
                Some((_, best_ratio, _, _)) => ratio > *best_ratio,
            };
            if better {
                best = Some((i, ratio, column, schur));
            }
        }
        let (item, _, column, schur) = best.expect("candidate list is nonempty");

        if mode == GreedyMode::NonNegGain {
            let gain_positive = !factor.is_singular() && schur - 1.0 > 0.0;
            if !gain_positive {
                status = SelectionStatus::GainStopped;
                break;
            }
        }

        factor.push(column, schur);
        order.push(item);
        total_cost += budget.costs()[item];
        candidates.retain(|&i| i != item && total_cost + budget.costs()[i] <= budget.budget());
    }

    let chosen = Subset::new(order.clone(), n)?;
    Ok(SelectionResult {
        chosen,
        order,
        total_cost,
        unnorm_log_det: factor.log_det(),
        status,
    })
}

/// Maximum number of items accepted by the enumeration oracle.
pub const BRUTE_FORCE_MAX: usize = 20;

/// Exact budgeted MAP by enumerating every feasible subset.
///
/// Determinants come from Gaussian elimination, independently of the
/// Cholesky path used by [`greedy_map`]. Ties break to the smaller
/// cardinality, then lexicographically smaller index list.
pub fn exact_map_bruteforce(l: &SymmetricKernel, budget: &BudgetSpec) -> Result<SelectionResult> {
    let n = l.n();
    if n > BRUTE_FORCE_MAX {
        return Err(DppError::BruteForceGuard {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    if budget.costs().len() != n {
        return Err(DppError::DimensionMismatch {
            expected: n,
            got: budget.costs().len(),
        });
    }

    let mut best_indices: Vec<usize> = Vec::new();
    let mut best_det = 1.0; // det of the empty set, always feasible
    let mut best_cost = 0.0;
    for mask in naive::all_masks(n).skip(1) {
        let indices = naive::mask_indices(mask, n);
        let cost: f64 = indices.iter().map(|&i| budget.costs()[i]).sum();
        if cost > budget.budget() {
            continue;
        }
        let det = naive::det_principal_minor(n, l.data(), &indices);
        let replace = det > best_det
            || (det == best_det && (indices.len(), &indices) < (best_indices.len(), &best_indices));
        if replace {
            best_det = det;
            best_indices = indices;
            best_cost = cost;
        }
    }

    Ok(SelectionResult {
        chosen: Subset::new(best_indices.clone(), n)?,
        order: best_indices,
        total_cost: best_cost,
        unnorm_log_det: if best_det > 0.0 {
            best_det.ln()
        } else {
            f64::NEG_INFINITY
        },
        status: SelectionStatus::Converged,
    })
}

/// Sampled brute-force MAP: draws `count` subsets, keeps those whose total
/// cost lies in `[lo, hi]`, and returns the highest-probability survivor.
/// No survivor is reported as `WindowEmpty` rather than an error.
pub fn sampled_map(
    l: &SymmetricKernel,
    state: &mut SamplerState,
    costs: &[f64],
    lo: f64,
    hi: f64,
    count: usize,
) -> Result<SelectionResult> {
    if lo > hi {
        return Err(DppError::InvalidParameter {
            name: "cost window",
            value: lo,
        });
    }
    if costs.len() != l.n() {
        return Err(DppError::DimensionMismatch {
            expected: l.n(),
            got: costs.len(),
        });
    }

    let mut log_dets: HashMap<Subset, f64> = HashMap::new();
    let mut best: Option<(Subset, f64, f64)> = None;
    for _ in 0..count {
        let y = state.sample()?;
        let cost: f64 = y.iter().map(|i| costs[i]).sum();
        if cost < lo || cost > hi {
            continue;
        }
        let log_det = *log_dets
            .entry(y.clone())
            .or_insert_with(|| log_det_principal_minor(l.n(), l.data(), y.indices()));
        let replace = match &best {
            None => true,
            Some((by, bld, _)) => {
                log_det > *bld
                    || (log_det == *bld && (y.len(), y.indices()) < (by.len(), by.indices()))
            }
        };
        if replace {
            best = Some((y, log_det, cost));
        }
    }

    Ok(match best {
        Some((chosen, unnorm_log_det, total_cost)) => SelectionResult {
            order: chosen.indices().to_vec(),
            chosen,
            total_cost,
            unnorm_log_det,
            status: SelectionStatus::Converged,
        },
        None => SelectionResult {
            chosen: Subset::empty(),
            order: Vec::new(),
            total_cost: 0.0,
            unnorm_log_det: f64::NEG_INFINITY,
            status: SelectionStatus::WindowEmpty,
        },
    })
}

/// Maximum marginal relevance: iteratively add the affordable item
/// maximizing `lambda q_i - (1 - lambda) max_{j in Y} S_ij` until nothing
/// fits. The max over an empty selection is zero; ties break to the lowest
/// index. The reported log-determinant is that of the implied kernel
/// L = diag(q) S diag(q).
pub fn mmr_select(
    q: &[f64],
    s: &SymmetricKernel,
    lambda: f64,
    budget: &BudgetSpec,
) -> Result<SelectionResult> {
    let n = s.n();
    if q.len() != n || budget.costs().len() != n {
        return Err(DppError::DimensionMismatch {
            expected: n,
            got: q.len(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(DppError::InvalidParameter {
            name: "lambda",
            value: lambda,
        });
    }
    for i in 0..n {
        if (s.get(i, i) - 1.0).abs() > 1e-9 {
            return Err(DppError::InvalidParameter {
                name: "similarity diagonal",
                value: s.get(i, i),
            });
        }
        if !(q[i] > 0.0) {
            return Err(DppError::NonPositiveQuality {
                index: i,
                value: q[i],
            });
        }
    }

    let mut order: Vec<usize> = Vec::new();
    let mut total_cost = 0.0;
    let mut candidates: Vec<usize> = (0..n).collect();
    loop {
        candidates.retain(|&i| total_cost + budget.costs()[i] <= budget.budget());
        let Some(&first) = candidates.first() else {
            break;
        };
        let mut best = first;
        let mut best_score = f64::NEG_INFINITY;
        for &i in &candidates {
            let max_sim = if order.is_empty() {
                0.0
            } else {
                order
                    .iter()
                    .map(|&j| s.get(i, j))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let score = lambda * q[i] - (1.0 - lambda) * max_sim;
            if score > best_score {
                best_score = score;
                best = i;
            }
        }
        order.push(best);
        total_cost += budget.costs()[best];
        candidates.retain(|&i| i != best);
    }

    // log det of the implied kernel restricted to the selection.
    let mut implied = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            implied[i * n + j] = q[i] * s.get(i, j) * q[j];
        }
    }
    let chosen = Subset::new(order.clone(), n)?;
    let unnorm_log_det = log_det_principal_minor(n, &implied, chosen.indices());

    Ok(SelectionResult {
        chosen,
        order,
        total_cost,
        unnorm_log_det,
        status: SelectionStatus::BudgetExhausted,
    })
}

/// Recomputed-from-scratch gain of adding `item` to `base`, used to
/// cross-check the incremental Schur path: det(L_{Y u i}) - det(L_Y).
pub fn recomputed_gain(l: &SymmetricKernel, base: &Subset, item: usize) -> f64 {
    let mut with = base.indices().to_vec();
    with.push(item);
    let det_with = naive::det_principal_minor(l.n(), l.data(), &with);
    let det_base = naive::det_principal_minor(l.n(), l.data(), base.indices());
    det_with - det_base
}

/// Largest Schur pivot that still counts as singular, re-exported so tests
/// can reason about degenerate selections.
pub const SINGULAR_TOL: f64 = PIVOT_TOL;
