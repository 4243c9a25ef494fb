//! Shared generators for oracle-driven tests. Expected values are produced
//! by subset enumeration over the naive Gaussian-elimination determinant,
//! which shares no code with the Cholesky/eigendecomposition paths under
//! test.
#![allow(dead_code)] // each test binary uses a different subset of helpers

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use dpp::kernel::SymmetricKernel;
use dpp::learn::{Instance, Item};
use dpp::naive;
use dpp::subset::Subset;

/// Random PSD kernel as a Gram matrix of n vectors in R^{n+2}, with entry
/// scale roughly `scale`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymmetricKernel {
    let dim = n + 2;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            data[i * n + j] = scale * dot / dim as f64 * 3.0;
        }
    }
    SymmetricKernel::new(n, data).unwrap()
}

/// Random marginal kernel with eigenvalues safely inside [0, 1).
pub fn random_marginal(rng: &mut ChaCha8Rng, n: usize) -> SymmetricKernel {
    random_psd(rng, n, 1.0).marginal_kernel().unwrap()
}

/// Sum of det(L_Y) over all subsets; the normalization oracle.
pub fn enumerate_normalizer(l: &SymmetricKernel) -> f64 {
    let n = l.n();
    naive::all_masks(n)
        .map(|mask| naive::det_principal_minor(n, l.data(), &naive::mask_indices(mask, n)))
        .sum()
}

/// Enumerated inclusion probability of item i under the L-ensemble.
pub fn enumerate_inclusion(l: &SymmetricKernel, item: usize) -> f64 {
    let n = l.n();
    let z = enumerate_normalizer(l);
    naive::all_masks(n)
        .filter(|mask| mask >> item & 1 == 1)
        .map(|mask| naive::det_principal_minor(n, l.data(), &naive::mask_indices(mask, n)))
        .sum::<f64>()
        / z
}

/// Enumerated probability of each subset, indexed by bitmask.
pub fn enumerate_probs(l: &SymmetricKernel) -> Vec<f64> {
    let n = l.n();
    let dets: Vec<f64> = naive::all_masks(n)
        .map(|mask| naive::det_principal_minor(n, l.data(), &naive::mask_indices(mask, n)).max(0.0))
        .collect();
    let z: f64 = dets.iter().sum();
    dets.into_iter().map(|d| d / z).collect()
}

/// Random instance with unit similarity vectors, random features, and an
/// optional random gold subset.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    id: &str,
    n: usize,
    m: usize,
    with_gold: bool,
) -> Instance {
    let items: Vec<Item> = (0..n)
        .map(|i| {
            let features = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut phi: Vec<f64> = (0..n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
            phi.iter_mut().for_each(|x| *x /= norm);
            Item {
                features,
                phi,
                cost: rng.gen_range(0.5..2.0),
                doc: 0,
                position: i,
            }
        })
        .collect();
    let gold = with_gold.then(|| {
        let mask = rng.gen_range(0..(1u64 << n));
        Subset::from_bitmask(mask, n)
    });
    Instance::new(id, items, gold).unwrap()
}

/// Random parameter vector with entries in (-b, b).
pub fn random_theta(rng: &mut ChaCha8Rng, m: usize, b: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-b..b)).collect()
}
