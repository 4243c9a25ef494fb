//! Conditional DPP learning: log-linear quality over per-item features with
//! a fixed per-instance similarity kernel, concave log-likelihood, its exact
//! gradient via marginal-kernel diagonals, and a quasi-Newton trainer with a
//! zero-mean Gaussian prior.

use rayon::prelude::*;

use crate::chol::log_det_principal_minor;
use crate::error::{DppError, Result};
use crate::kernel::{SymmetricKernel, UNIT_TOL};
use crate::optim::{maximize, KahanSum, OptimOutcome, OptimizerConfig};
use crate::subset::Subset;

/// Dot products are clipped here before exponentiation so aggressive line
/// search steps stay finite.
pub const QUALITY_CLIP: f64 = 500.0;

/// One selectable item: quality features, a unit similarity vector, a
/// selection cost, and its provenance in the source collection.
#[derive(Debug, Clone)]
pub struct Item {
    pub features: Vec<f64>,
    pub phi: Vec<f64>,
    pub cost: f64,
    pub doc: usize,
    pub position: usize,
}

/// A training or inference input: items plus an optional gold subset.
#[derive(Debug, Clone)]
pub struct Instance {
    id: String,
    items: Vec<Item>,
    gold: Option<Subset>,
}

impl Instance {
    pub fn new(id: impl Into<String>, items: Vec<Item>, gold: Option<Subset>) -> Result<Self> {
        let id = id.into();
        let m = items.first().map_or(0, |it| it.features.len());
        for it in &items {
            if it.features.len() != m {
                return Err(DppError::DimensionMismatch {
                    expected: m,
                    got: it.features.len(),
                });
            }
            let norm = it.phi.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(DppError::NonUnitPhi { index: 0, norm });
            }
        }
        if let Some(g) = &gold {
            if let Some(&last) = g.indices().last() {
                if last >= items.len() {
                    return Err(DppError::IndexOutOfBounds {
                        index: last,
                        n: items.len(),
                    });
                }
            }
        }
        Ok(Instance { id, items, gold })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.items.first().map_or(0, |it| it.features.len())
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn gold(&self) -> Option<&Subset> {
        self.gold.as_ref()
    }

    pub fn set_gold(&mut self, gold: Option<Subset>) {
        self.gold = gold;
    }

    pub fn costs(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.cost).collect()
    }

    fn require_gold(&self) -> Result<&Subset> {
        self.gold.as_ref().ok_or_else(|| DppError::MissingGold {
            id: self.id.clone(),
        })
    }
}

/// Trained (or in-training) parameters of the conditional model.
#[derive(Debug, Clone)]
pub struct ConditionalModel {
    pub theta: Vec<f64>,
    pub sigma2: f64,
    pub feature_names: Vec<String>,
}

impl ConditionalModel {
    pub fn new(theta: Vec<f64>, sigma2: f64, feature_names: Vec<String>) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(DppError::InvalidParameter {
                name: "sigma2",
                value: sigma2,
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(DppError::InvalidParameter {
                name: "theta",
                value: f64::NAN,
            });
        }
        Ok(ConditionalModel {
            theta,
            sigma2,
            feature_names,
        })
    }

    pub fn zeros(m: usize, sigma2: f64) -> Result<Self> {
        Self::new(vec![0.0; m], sigma2, Vec::new())
    }

    /// Kernel L(X) for one instance under the current parameters.
    pub fn conditional_kernel(&self, inst: &Instance) -> Result<SymmetricKernel> {
        build_conditional_l(&self.theta, inst)
    }
}

/// Log-linear quality q = exp(theta . f / 2) > 0.
///
/// The dot product is clipped to +-QUALITY_CLIP (warning, not an error); a
/// non-finite dot product is rejected with its value.
pub fn quality(theta: &[f64], features: &[f64]) -> Result<f64> {
    debug_assert_eq!(theta.len(), features.len());
    let dot: f64 = theta.iter().zip(features).map(|(t, f)| t * f).sum();
    if !dot.is_finite() {
        return Err(DppError::NonFiniteQuality { dot });
    }
    let clipped = if dot.abs() > QUALITY_CLIP {
        log::warn!("clipping quality dot product {dot} to +-{QUALITY_CLIP}");
        dot.clamp(-QUALITY_CLIP, QUALITY_CLIP)
    } else {
        dot
    };
    Ok((0.5 * clipped).exp())
}

/// L_ij(X) = q_i q_j phi_i . phi_j with log-linear q; PSD by construction.
pub fn build_conditional_l(theta: &[f64], inst: &Instance) -> Result<SymmetricKernel> {
    let n = inst.n();
    let mut q = Vec::with_capacity(n);
    for it in inst.items() {
        if it.features.len() != theta.len() {
            return Err(DppError::DimensionMismatch {
                expected: theta.len(),
                got: it.features.len(),
            });
        }
        q.push(quality(theta, &it.features)?);
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = inst.items[i]
                .phi
                .iter()
                .zip(&inst.items[j].phi)
                .map(|(a, b)| a * b)
                .sum();
            let v = q[i] * dot * q[j];
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SymmetricKernel::new(n, data)
}

fn prior_value(theta: &[f64], sigma2: f64) -> f64 {
    if sigma2.is_infinite() {
        0.0
    } else {
        -theta.iter().map(|t| t * t).sum::<f64>() / (2.0 * sigma2)
    }
}

/// Penalized training log-likelihood:
/// Sum_t [log det(L_{Y^t}) - log det(L + I)] - |theta|^2 / (2 sigma^2).
///
/// A rank-deficient gold minor yields `NEG_INFINITY`.
pub fn log_likelihood(model: &ConditionalModel, insts: &[Instance]) -> Result<f64> {
    let terms: Vec<f64> = insts
        .par_iter()
        .map(|inst| -> Result<f64> {
            let gold = inst.require_gold()?;
            let l = build_conditional_l(&model.theta, inst)?;
            let num = log_det_principal_minor(l.n(), l.data(), gold.indices());
            Ok(num - l.log_normalizer()?)
        })
        .collect::<Result<_>>()?;
    let mut acc = KahanSum::default();
    for t in terms {
        if t == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        acc.add(t);
    }
    Ok(acc.value() + prior_value(&model.theta, model.sigma2))
}

/// Exact gradient: empirical minus expected feature counts, per instance
/// K_ii = Sum_k lambda_k/(1+lambda_k) v_ki^2, minus the prior term
/// theta / sigma^2. Per-instance terms are reduced with compensated
/// summation in instance order, so the result is deterministic.
pub fn gradient(model: &ConditionalModel, insts: &[Instance]) -> Result<Vec<f64>> {
    let m = model.theta.len();
    let terms: Vec<Vec<f64>> = insts
        .par_iter()
        .map(|inst| -> Result<Vec<f64>> {
            let gold = inst.require_gold()?;
            let l = build_conditional_l(&model.theta, inst)?;
            let values = l.psd_eigenvalues()?;
            let eig = l.eigen()?;
            let n = inst.n();
            let mut term = vec![0.0; m];
            for i in gold.iter() {
                for (t, f) in term.iter_mut().zip(&inst.items[i].features) {
                    *t += f;
                }
            }
            for i in 0..n {
                let mut kii = 0.0;
                for (k, &lambda) in values.iter().enumerate() {
                    let v = eig.vector_component(i, k);
                    kii += lambda / (1.0 + lambda) * v * v;
                }
                for (t, f) in term.iter_mut().zip(&inst.items[i].features) {
                    *t -= kii * f;
                }
            }
            Ok(term)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(m);
    for d in 0..m {
        let mut acc = KahanSum::default();
        for term in &terms {
            acc.add(term[d]);
        }
        let prior = if model.sigma2.is_infinite() {
            0.0
        } else {
            model.theta[d] / model.sigma2
        };
        out.push(acc.value() - prior);
    }
    Ok(out)
}

/// Trainer settings; `sigma2` may be infinite to disable the prior.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub sigma2: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub plain_gd: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sigma2: 1.0,
            tol: 1e-6,
            max_iter: 500,
            plain_gd: false,
        }
    }
}

/// Result of a training run, keeping the trainer diagnostics that the model
/// file records.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ConditionalModel,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes the penalized log-likelihood from theta = 0.
///
/// The objective is concave (strictly, with a finite prior), so reaching
/// the gradient tolerance certifies the unique global maximizer.
pub fn train(insts: &[Instance], config: &TrainConfig) -> Result<TrainOutcome> {
    if insts.is_empty() {
        return Err(DppError::EmptyTrainingSet);
    }
    if !(config.sigma2 > 0.0) {
        return Err(DppError::InvalidParameter {
            name: "sigma2",
            value: config.sigma2,
        });
    }
    for inst in insts {
        inst.require_gold()?;
    }
    let m = insts[0].feature_dim();

    let objective = |theta: &[f64]| -> Result<(f64, Vec<f64>)> {
        let model = ConditionalModel {
            theta: theta.to_vec(),
            sigma2: config.sigma2,
            feature_names: Vec::new(),
        };
        Ok((log_likelihood(&model, insts)?, gradient(&model, insts)?))
    };

    let OptimOutcome {
        x,
        value,
        grad_inf_norm,
        iterations,
        converged,
    } = maximize(
        objective,
        vec![0.0; m],
        &OptimizerConfig {
            tol: config.tol,
            max_iter: config.max_iter,
            plain_gd: config.plain_gd,
            history: 10,
        },
    )?;

    Ok(TrainOutcome {
        model: ConditionalModel::new(x, config.sigma2, Vec::new())?,
        value,
        grad_inf_norm,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::QPhiDecomposition;

    fn single_item_instance(gold: bool) -> Instance {
        let item = Item {
            features: vec![1.0],
            phi: vec![1.0],
            cost: 1.0,
            doc: 0,
            position: 0,
        };
        let gold = gold.then(|| Subset::new(vec![0], 1).unwrap());
        Instance::new("single", vec![item], gold).unwrap()
    }

    #[test]
    fn quality_examples() {
        assert_eq!(quality(&[0.0, 0.0], &[3.0, -1.0]).unwrap(), 1.0);
        // theta . f = 2 gives q = e.
        let q = quality(&[2.0], &[1.0]).unwrap();
        assert!((q - std::f64::consts::E).abs() < 1e-12);
        // Doubling theta squares q.
        let q1 = quality(&[0.7], &[1.3]).unwrap();
        let q2 = quality(&[1.4], &[1.3]).unwrap();
        assert!((q2 - q1 * q1).abs() < 1e-12);
        assert!(matches!(
            quality(&[f64::NAN], &[1.0]),
            Err(DppError::NonFiniteQuality { .. })
        ));
    }

    #[test]
    fn quality_clips_instead_of_overflowing() {
        let q = quality(&[2000.0], &[1.0]).unwrap();
        assert!(q.is_finite());
        assert_eq!(q, (0.5 * QUALITY_CLIP).exp());
    }

    #[test]
    fn conditional_kernel_examples() {
        // theta = 0 with orthonormal phi gives the identity.
        let items = vec![
            Item {
                features: vec![2.0, 0.5],
                phi: vec![1.0, 0.0],
                cost: 1.0,
                doc: 0,
                position: 0,
            },
            Item {
                features: vec![-1.0, 0.25],
                phi: vec![0.0, 1.0],
                cost: 1.0,
                doc: 0,
                position: 1,
            },
        ];
        let inst = Instance::new("orth", items, None).unwrap();
        let l = build_conditional_l(&[0.0, 0.0], &inst).unwrap();
        assert_eq!(l.data(), &[1.0, 0.0, 0.0, 1.0]);

        // Single item: L = [e^2] at theta f = 2.
        let inst = single_item_instance(false);
        let l = build_conditional_l(&[2.0], &inst).unwrap();
        assert!((l.get(0, 0) - (2.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn conditional_kernel_matches_decomposition_route() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let m = 3;
        let theta: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut items = Vec::new();
        for i in 0..n {
            let features: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut phi: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
            phi.iter_mut().for_each(|x| *x /= norm);
            items.push(Item {
                features,
                phi,
                cost: 1.0,
                doc: 0,
                position: i,
            });
        }
        let inst = Instance::new("rand", items, None).unwrap();
        let l = build_conditional_l(&theta, &inst).unwrap();

        let q: Vec<f64> = inst
            .items()
            .iter()
            .map(|it| quality(&theta, &it.features).unwrap())
            .collect();
        let phi: Vec<Vec<f64>> = inst.items().iter().map(|it| it.phi.clone()).collect();
        let via_decomp = QPhiDecomposition::new(q, phi).unwrap().build_l();
        for (a, b) in l.data().iter().zip(via_decomp.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn log_likelihood_single_item() {
        // L = [1], P({0}) = 1 / (1 + 1).
        let inst = single_item_instance(true);
        let model = ConditionalModel::new(vec![0.0], f64::INFINITY, vec![]).unwrap();
        let ll = log_likelihood(&model, &[inst]).unwrap();
        assert!((ll - 0.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_likelihood_empty_gold_is_negative_normalizer() {
        let mut inst = single_item_instance(false);
        inst.set_gold(Some(Subset::empty()));
        let model = ConditionalModel::new(vec![0.3], f64::INFINITY, vec![]).unwrap();
        let l = model.conditional_kernel(&inst).unwrap();
        let ll = log_likelihood(&model, &[inst]).unwrap();
        assert!((ll + l.log_normalizer().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn missing_gold_is_an_error() {
        let inst = single_item_instance(false);
        let model = ConditionalModel::new(vec![0.0], 1.0, vec![]).unwrap();
        assert!(matches!(
            log_likelihood(&model, &[inst]),
            Err(DppError::MissingGold { .. })
        ));
    }

    #[test]
    fn gradient_single_item() {
        // K_11 = 1/2 at theta = 0, so the gradient is 1 - 1/2.
        let inst = single_item_instance(true);
        let model = ConditionalModel::new(vec![0.0], f64::INFINITY, vec![]).unwrap();
        let g = gradient(&model, &[inst]).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gradient_empty_gold_is_negative_expected_counts() {
        let mut inst = single_item_instance(false);
        inst.set_gold(Some(Subset::empty()));
        let model = ConditionalModel::new(vec![0.0], f64::INFINITY, vec![]).unwrap();
        let g = gradient(&model, &[inst]).unwrap();
        assert!((g[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn trainer_hits_iteration_cap_on_separable_data() {
        // Without a prior the objective rises toward zero as theta grows;
        // plain gradient ascent advances only logarithmically, so an
        // unreachable tolerance must end at the cap, not in an error.
        let inst = single_item_instance(true);
        let out = train(
            &[inst],
            &TrainConfig {
                sigma2: f64::INFINITY,
                tol: 0.0,
                max_iter: 200,
                plain_gd: true,
            },
        )
        .unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 200);
        assert!(out.grad_inf_norm > 0.0);
    }

    #[test]
    fn trainer_finds_prior_regularized_root() {
        // With sigma2 = 1 the stationarity condition is
        // 1 - e^t/(1+e^t) - t = 0; bisection is the oracle.
        let inst = single_item_instance(true);
        let out = train(
            &[inst],
            &TrainConfig {
                sigma2: 1.0,
                tol: 1e-10,
                max_iter: 500,
                plain_gd: false,
            },
        )
        .unwrap();
        assert!(out.converged);

        let f = |t: f64| 1.0 - t.exp() / (1.0 + t.exp()) - t;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!(
            (out.model.theta[0] - root).abs() < 1e-8,
            "trained {} vs bisection root {}",
            out.model.theta[0],
            root
        );
    }
}
