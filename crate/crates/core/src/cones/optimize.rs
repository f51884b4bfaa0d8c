//! Projected-gradient descent with backtracking line search and multistart.
//!
//! Gradients are central finite differences through the parametrization map;
//! retraction (renormalization, Gram–Schmidt, clamping) keeps the iterates on
//! the parameter manifold. One start is deterministic given its RNG stream.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;

use super::param::Parametrization;

pub struct StartOutcome {
    pub theta: DVector<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub divergence: f64,
    pub iters: usize,
}

pub struct OptimizerSettings {
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
        }
    }
}

fn fd_gradient<F>(f: &F, theta: &DVector<f64>, f0: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    let h = 1e-6 * (1.0 + theta.norm());
    let mut g = DVector::zeros(theta.len());
    let mut tp = theta.clone();
    for i in 0..theta.len() {
        let orig = theta[i];
        tp[i] = orig + h;
        let fp = f(&tp);
        tp[i] = orig - h;
        let fm = f(&tp);
        tp[i] = orig;
        g[i] = match (fp, fm) {
            (Some(a), Some(b)) => (a - b) / (2.0 * h),
            (Some(a), None) => (a - f0) / h,
            (None, Some(b)) => (f0 - b) / h,
            (None, None) => 0.0,
        };
    }
    g
}

/// Minimize f over the parametrization domain from one start point.
/// `analytic_grad` overrides the finite-difference gradient when present.
pub fn minimize_start<F, G>(
    param: &Parametrization,
    f: &F,
    analytic_grad: Option<&G>,
    theta0: &DVector<f64>,
    rng: &mut ChaCha8Rng,
    settings: &OptimizerSettings,
) -> StartOutcome
where
    F: Fn(&DVector<f64>) -> Option<f64>,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut theta = param.retract(theta0);
    let mut fval = f(&theta);
    // re-draw a handful of times if the start is degenerate
    let mut tries = 0;
    while fval.is_none() && tries < 16 {
        theta = param.retract(&param.random_theta(rng));
        fval = f(&theta);
        tries += 1;
    }
    let Some(mut fval) = fval else {
        return StartOutcome {
            theta,
            value: f64::INFINITY,
            grad_norm: f64::INFINITY,
            converged: false,
            divergence: 0.0,
            iters: 0,
        };
    };

    let mut step = 0.5_f64;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut iters = 0;
    for it in 0..settings.max_iters {
        iters = it + 1;
        let g = match analytic_grad {
            Some(ag) => ag(&theta),
            None => fd_gradient(f, &theta, fval),
        };
        grad_norm = g.norm();
        if grad_norm < settings.grad_tol {
            converged = true;
            break;
        }
        // backtracking Armijo line search along −g with retraction
        let mut t = (step * 2.0).min(4.0);
        let mut accepted = false;
        for _ in 0..50 {
            let cand = param.retract(&(&theta - &g * t));
            if let Some(fc) = f(&cand) {
                if fc <= fval - 1e-4 * t * grad_norm * grad_norm {
                    theta = cand;
                    fval = fc;
                    step = t;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
            if t * grad_norm < 1e-17 * (1.0 + theta.norm()) {
                break;
            }
        }
        if std::env::var("CURVCONE_TRACE_OPT").is_ok() && it < 25 {
            eprintln!(
                "  it {it}: f {fval:.6e} gn {grad_norm:.3e} t {step:.3e} acc {accepted}"
            );
        }
        if !accepted {
            // flat to line-search precision; treat a small gradient as converged
            converged = grad_norm < settings.grad_tol * 1e3;
            break;
        }
    }
    StartOutcome {
        divergence: param.divergence_measure(&theta),
        theta,
        value: fval,
        grad_norm,
        converged,
        iters,
    }
}
