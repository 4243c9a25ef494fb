//! Limited-memory quasi-Newton ascent for smooth concave objectives, with
//! an Armijo backtracking line search and a plain gradient-ascent fallback.

use crate::error::{DppError, Result};

const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;
const CURVATURE_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Convergence threshold on the gradient infinity norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Use plain gradient ascent instead of the quasi-Newton direction.
    pub plain_gd: bool,
    /// Number of retained curvature pairs.
    pub history: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tol: 1e-6,
            max_iter: 500,
            plain_gd: false,
            history: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes a concave objective `f` returning `(value, gradient)`.
///
/// Terminates when the gradient infinity norm falls to `tol` or after
/// `max_iter` iterations (reported as non-converged). A non-finite
/// objective during the line search rejects the step and halves it;
/// `MAX_HALVINGS` consecutive rejections are an error.
pub fn maximize<F>(mut f: F, x0: Vec<f64>, cfg: &OptimizerConfig) -> Result<OptimOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = x0;
    let (mut value, mut grad) = f(&x)?;
    if !value.is_finite() {
        return Err(DppError::InvalidParameter {
            name: "initial objective",
            value,
        });
    }

    // History of (s, y) pairs with s = x_+ - x, y = g - g_+ (the gradient
    // change of the negated objective, so s . y > 0 under concavity).
    let mut history: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();

    for iter in 0..cfg.max_iter {
        let g_norm = inf_norm(&grad);
        if g_norm <= cfg.tol {
            return Ok(OptimOutcome {
                x,
                value,
                grad_inf_norm: g_norm,
                iterations: iter,
                converged: true,
            });
        }

        let mut direction = if cfg.plain_gd || history.is_empty() {
            grad.clone()
        } else {
            two_loop(&grad, &history)
        };
        if dot(&direction, &grad) <= 0.0 {
            // Stale curvature produced a non-ascent direction; restart.
            history.clear();
            direction = grad.clone();
        }

        let mut step = if history.is_empty() && !cfg.plain_gd {
            (1.0 / l2_norm(&direction)).min(1.0)
        } else {
            1.0
        };

        let slope = dot(&grad, &direction);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + step * di)
                .collect();
            match f(&candidate) {
                Ok((v, g)) if v.is_finite() && v >= value + ARMIJO_C1 * step * slope => {
                    accepted = Some((candidate, v, g));
                    break;
                }
                Ok(_) | Err(_) => step *= 0.5,
            }
        }
        let (x_new, v_new, g_new) = accepted.ok_or(DppError::LineSearchFailed {
            halvings: MAX_HALVINGS,
        })?;

        if !cfg.plain_gd {
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(&g_new).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > CURVATURE_EPS * l2_norm(&s) * l2_norm(&y) {
                history.push((s, y));
                if history.len() > cfg.history {
                    history.remove(0);
                }
            }
        }

        x = x_new;
        value = v_new;
        grad = g_new;
    }

    let grad_inf_norm = inf_norm(&grad);
    Ok(OptimOutcome {
        x,
        value,
        grad_inf_norm,
        iterations: cfg.max_iter,
        converged: grad_inf_norm <= cfg.tol,
    })
}

/// Two-loop recursion: approximates (inverse Hessian of -f) * grad, an
/// ascent direction for the concave objective.
fn two_loop(grad: &[f64], history: &[(Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y) in history.iter().rev() {
        let rho = 1.0 / dot(s, y);
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    let (s_last, y_last) = history.last().expect("two_loop requires history");
    let gamma = dot(s_last, y_last) / dot(y_last, y_last);
    for qi in q.iter_mut() {
        *qi *= gamma;
    }
    for ((s, y), &alpha) in history.iter().zip(alphas.iter().rev()) {
        let rho = 1.0 / dot(s, y);
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    q
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Compensated (Kahan) accumulator; keeps reductions order-stable well
/// below 1e-12.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
