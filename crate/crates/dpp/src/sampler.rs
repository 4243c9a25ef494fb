//! Exact sampling from an L-ensemble DPP.
//!
//! Spectral two-phase sampler: phase 1 keeps eigenvector k independently
//! with probability lambda_k / (1 + lambda_k); phase 2 repeatedly draws an
//! item with probability proportional to the squared component mass of the
//! retained basis, then projects the basis onto the complement of the
//! drawn coordinate axis and re-orthonormalizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::Eigen;
use crate::error::{DppError, Result};
use crate::kernel::SymmetricKernel;
use crate::subset::Subset;

const DEGENERATE_NORM: f64 = 1e-12;

/// Sampler over a fixed kernel with a deterministic seeded random stream.
/// Identical seeds yield identical sample sequences.
#[derive(Debug, Clone)]
pub struct SamplerState {
    n: usize,
    keep_prob: Vec<f64>,
    eigen: Eigen,
    rng: ChaCha8Rng,
}

impl SamplerState {
    pub fn new(l: &SymmetricKernel, seed: u64) -> Result<Self> {
        let keep_prob = l
            .psd_eigenvalues()?
            .iter()
            .map(|&lambda| lambda / (1.0 + lambda))
            .collect();
        Ok(SamplerState {
            n: l.n(),
            keep_prob,
            eigen: l.eigen()?.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Expected sample cardinality, trace(K) = Sum_k lambda_k/(1+lambda_k).
    pub fn expected_size(&self) -> f64 {
        self.keep_prob.iter().sum()
    }

    /// Draws one subset distributed as det(L_Y) / det(L + I).
    pub fn sample(&mut self) -> Result<Subset> {
        let n = self.n;

        // Phase 1: elementary DPP selection.
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for (k, &p) in self.keep_prob.iter().enumerate() {
            if self.rng.gen::<f64>() < p {
                basis.push(self.eigen.vector(k));
            }
        }

        // Phase 2: one item per retained dimension.
        let mut chosen = Vec::with_capacity(basis.len());
        while !basis.is_empty() {
            let mut weights = vec![0.0; n];
            for v in &basis {
                for (i, &vi) in v.iter().enumerate() {
                    weights[i] += vi * vi;
                }
            }
            let total: f64 = weights.iter().sum();
            let mut draw = self.rng.gen::<f64>() * total;
            let mut item = n - 1;
            for (i, &w) in weights.iter().enumerate() {
                draw -= w;
                if draw <= 0.0 {
                    item = i;
                    break;
                }
            }
            chosen.push(item);

            // Remove the component along e_item using the retained vector
            // with the largest such component, then re-orthonormalize.
            let pivot_idx = (0..basis.len())
                .max_by(|&a, &b| {
                    basis[a][item]
                        .abs()
                        .partial_cmp(&basis[b][item].abs())
                        .unwrap()
                })
                .expect("basis is nonempty");
            let pivot = basis.swap_remove(pivot_idx);
            if pivot[item].abs() < DEGENERATE_NORM {
                return Err(DppError::DegenerateDirection {
                    norm: pivot[item].abs(),
                });
            }
            for v in &mut basis {
                let scale = v[item] / pivot[item];
                for (x, &p) in v.iter_mut().zip(&pivot) {
                    *x -= scale * p;
                }
                v[item] = 0.0;
            }
            gram_schmidt(&mut basis)?;
        }

        Ok(Subset::new(chosen, n).expect("sampled items are valid and distinct"))
    }
}

/// In-place Gram-Schmidt with a re-orthogonalization pass. A vector whose
/// norm collapses below 1e-12 gets one extra pass, then is a hard error.
fn gram_schmidt(basis: &mut [Vec<f64>]) -> Result<()> {
    for k in 0..basis.len() {
        for _ in 0..2 {
            project_out(basis, k);
        }
        let mut norm = l2_norm(&basis[k]);
        if norm < DEGENERATE_NORM {
            project_out(basis, k);
            norm = l2_norm(&basis[k]);
            if norm < DEGENERATE_NORM {
                return Err(DppError::DegenerateDirection { norm });
            }
        }
        for x in &mut basis[k] {
            *x /= norm;
        }
    }
    Ok(())
}

fn project_out(basis: &mut [Vec<f64>], k: usize) {
    let (done, rest) = basis.split_at_mut(k);
    let v = &mut rest[0];
    for u in done.iter() {
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        for (x, &ui) in v.iter_mut().zip(u) {
            *x -= dot * ui;
        }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Per-item inclusion frequencies over a sample sequence.
pub fn empirical_marginals(samples: &[Subset], n: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(DppError::EmptySamples);
    }
    let mut counts = vec![0usize; n];
    for s in samples {
        for i in s.iter() {
            counts[i] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / samples.len() as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_always_samples_empty() {
        let l = SymmetricKernel::zeros(4);
        let mut s = SamplerState::new(&l, 1).unwrap();
        for _ in 0..100 {
            assert!(s.sample().unwrap().is_empty());
        }
    }

    #[test]
    fn diagonal_kernel_gives_independent_inclusion() {
        let l = SymmetricKernel::diagonal(&[1.0, 3.0]);
        let mut s = SamplerState::new(&l, 42).unwrap();
        let samples: Vec<Subset> = (0..20_000).map(|_| s.sample().unwrap()).collect();
        let freq = empirical_marginals(&samples, 2).unwrap();
        // Inclusion probabilities 1/2 and 3/4; 20k draws keep se < 0.004.
        assert!((freq[0] - 0.5).abs() < 0.02);
        assert!((freq[1] - 0.75).abs() < 0.02);
    }

    #[test]
    fn same_seed_same_sequence() {
        let l = SymmetricKernel::new(3, vec![2.0, 1.0, 0.3, 1.0, 2.0, 0.5, 0.3, 0.5, 1.5]).unwrap();
        let mut a = SamplerState::new(&l, 7).unwrap();
        let mut b = SamplerState::new(&l, 7).unwrap();
        for _ in 0..200 {
            assert_eq!(a.sample().unwrap(), b.sample().unwrap());
        }
        let mut c = SamplerState::new(&l, 8).unwrap();
        let differs = (0..200).any(|_| a.sample().unwrap() != c.sample().unwrap());
        assert!(differs);
    }

    #[test]
    fn empirical_marginal_edge_cases() {
        let empty = vec![Subset::empty(), Subset::empty()];
        assert_eq!(empirical_marginals(&empty, 3).unwrap(), vec![0.0, 0.0, 0.0]);

        let ones = vec![
            Subset::new(vec![0], 2).unwrap(),
            Subset::new(vec![0], 2).unwrap(),
        ];
        assert_eq!(empirical_marginals(&ones, 2).unwrap(), vec![1.0, 0.0]);

        assert!(matches!(
            empirical_marginals(&[], 2),
            Err(DppError::EmptySamples)
        ));
    }
}
