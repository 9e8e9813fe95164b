//! Levenberg-Marquardt for three-parameter curve models.
//!
//! Minimizes `Σ w_i (y_i - f(p, x_i))²`. Each iteration solves
//!
//! ```text
//! (JᵀWJ + λ·D) δ = JᵀW r
//! ```
//!
//! with `D = diag(JᵀWJ)` (Marquardt scaling) or `D = I`. A step is accepted
//! only when it lowers the objective; λ is then divided by `damping_down`,
//! otherwise multiplied by `damping_up`.

use nalgebra::{Matrix3, Vector3};

use super::{DampingMode, FitConfig, FitError, JacobianMode};
use crate::model::{MaParams, SmmaParams};

/// A model `f(p, x)` with three free parameters.
pub trait CurveModel {
    fn value(&self, p: &[f64; 3], x: f64) -> f64;
    fn gradient(&self, p: &[f64; 3], x: f64) -> [f64; 3];
}

/// `A · x^b · e^(-c·x)` over `p = [A, b, c]`.
#[derive(Clone, Copy, Debug)]
pub struct MaModel;

impl CurveModel for MaModel {
    fn value(&self, p: &[f64; 3], x: f64) -> f64 {
        MaParams::from_array(*p).value_at(x)
    }

    fn gradient(&self, p: &[f64; 3], x: f64) -> [f64; 3] {
        let shape = (p[1] * x.ln() - p[2] * x).exp();
        let y = p[0] * shape;
        [shape, y * x.ln(), -y * x]
    }
}

/// `ω^x · e^φ · x^α · e^(-θ·x)` over `p = [φ, α, θ]`, `ω` fixed.
#[derive(Clone, Copy, Debug)]
pub struct SmmaModel {
    pub omega: u32,
}

impl CurveModel for SmmaModel {
    fn value(&self, p: &[f64; 3], x: f64) -> f64 {
        SmmaParams::new(p[0], p[1], p[2], self.omega).value_at(x)
    }

    fn gradient(&self, p: &[f64; 3], x: f64) -> [f64; 3] {
        let y = self.value(p, x);
        [y, y * x.ln(), -y * x]
    }
}

/// Central differences with step `rel_step · max(|p_j|, 1e-3)`.
pub fn finite_difference_gradient<M: CurveModel + ?Sized>(model: &M, p: &[f64; 3], x: f64, rel_step: f64) -> [f64; 3] {
    let mut g = [0.0; 3];
    for j in 0..3 {
        let h = rel_step * p[j].abs().max(1e-3);
        let (mut up, mut dn) = (*p, *p);
        up[j] += h;
        dn[j] -= h;
        g[j] = (model.value(&up, x) - model.value(&dn, x)) / (up[j] - dn[j]);
    }
    g
}

pub(crate) const FD_REL_STEP: f64 = 1e-6;

pub(crate) fn gradient_with<M: CurveModel>(model: &M, mode: JacobianMode, p: &[f64; 3], x: f64) -> [f64; 3] {
    match mode {
        JacobianMode::Analytic => model.gradient(p, x),
        JacobianMode::FiniteDifference => finite_difference_gradient(model, p, x, FD_REL_STEP),
    }
}

/// Result of a minimization run.
#[derive(Clone, Debug)]
pub struct LmOutcome {
    pub params: [f64; 3],
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start and after every accepted step.
    pub sse_history: Vec<f64>,
}

pub(crate) fn objective<M: CurveModel>(model: &M, p: &[f64; 3], xs: &[f64], ys: &[f64], ws: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .zip(ws)
        .map(|((&x, &y), &w)| {
            let r = y - model.value(p, x);
            w * r * r
        })
        .sum()
}

/// Normal-equation pieces `JᵀWJ` and `JᵀW r`.
pub(crate) fn normal_equations<M: CurveModel>(
    model: &M,
    mode: JacobianMode,
    p: &[f64; 3],
    xs: &[f64],
    ys: &[f64],
    ws: &[f64],
) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        let g = Vector3::from(gradient_with(model, mode, p, x));
        let r = y - model.value(p, x);
        jtj += w * g * g.transpose();
        jtr += w * r * g;
    }
    (jtj, jtr)
}

fn solve(m: &Matrix3<f64>, rhs: &Vector3<f64>) -> Option<Vector3<f64>> {
    if let Some(ch) = m.cholesky() {
        return Some(ch.solve(rhs));
    }
    m.lu().solve(rhs)
}

pub fn levenberg_marquardt<M: CurveModel>(
    model: &M,
    xs: &[f64],
    ys: &[f64],
    ws: &[f64],
    init: [f64; 3],
    cfg: &FitConfig,
) -> Result<LmOutcome, FitError> {
    let mut p = init;
    let mut sse = objective(model, &p, xs, ys, ws);
    if !sse.is_finite() {
        return Err(FitError::NonFinite("objective at the initial guess"));
    }
    let mut lambda = cfg.initial_damping;
    let mut history = vec![sse];
    let mut converged = sse == 0.0;
    let mut iterations = 0;

    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let (jtj, jtr) = normal_equations(model, cfg.jacobian_mode, &p, xs, ys, ws);
        if !jtj.iter().chain(jtr.iter()).all(|v| v.is_finite()) {
            return Err(FitError::NonFinite("Jacobian"));
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[(i, i)] += match cfg.damping_mode {
                DampingMode::Marquardt => lambda * jtj[(i, i)],
                DampingMode::Identity => lambda,
            };
        }
        let Some(delta) = solve(&damped, &jtr) else {
            if jtj.diagonal().iter().any(|&d| d == 0.0) {
                return Err(FitError::Singular);
            }
            lambda *= cfg.damping_up;
            continue;
        };
        let trial = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
        let step_rel = (0..3)
            .map(|j| delta[j].abs() / p[j].abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let trial_sse = objective(model, &trial, xs, ys, ws);

        if trial_sse.is_finite() && trial_sse < sse {
            let rel_change = (sse - trial_sse) / sse;
            p = trial;
            sse = trial_sse;
            history.push(sse);
            lambda /= cfg.damping_down;
            converged = rel_change < cfg.tol_chisq_rel || step_rel < cfg.tol_param_rel || sse == 0.0;
        } else {
            lambda *= cfg.damping_up;
            // A rejected step this small means the objective is flat to rounding.
            converged = step_rel < cfg.tol_param_rel;
        }
        if !lambda.is_finite() || lambda > 1e300 {
            break;
        }
    }

    Ok(LmOutcome {
        params: p,
        sse,
        iterations,
        converged,
        sse_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn structural_zero_at_unit_length() {
        let g = MaModel.gradient(&[2.5, 8.2, 1.16], 1.0);
        assert_eq!(g[1], 0.0);
        let g = SmmaModel { omega: 26 }.gradient(&[0.93, 8.2, 4.42], 1.0);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn smma_phi_partial_is_the_value() {
        let m = SmmaModel { omega: 29 };
        let p = [-0.29, 8.93, 4.397];
        for x in [1.0, 5.0, 17.0] {
            assert_eq!(m.gradient(&p, x)[0], m.value(&p, x));
        }
    }

    #[test]
    fn analytic_matches_central_differences_at_brown_parameters() {
        let cases: [(&dyn CurveModel, [f64; 3]); 2] = [
            (&MaModel, [2.5236, 8.2039, 1.1595]),
            (&SmmaModel { omega: 26 }, [0.9281, 8.2014, 4.4173]),
        ];
        for (m, p) in cases {
            for l in 1..=22 {
                let x = l as f64;
                let a = m.gradient(&p, x);
                let fd = finite_difference_gradient(m, &p, x, 1e-6);
                for j in 0..3 {
                    if a[j] == 0.0 {
                        assert!(fd[j].abs() < 1e-6);
                    } else {
                        assert!(rel(fd[j], a[j]) < 1e-5, "l={l} j={j} {} vs {}", fd[j], a[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn recovers_noiseless_parameters_from_a_rough_start() {
        let truth = [3.0, 2.0, 0.4];
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| MaModel.value(&truth, x)).collect();
        let ws = vec![1.0; xs.len()];
        let out = levenberg_marquardt(&MaModel, &xs, &ys, &ws, [1.0, 1.0, 0.2], &FitConfig::default()).unwrap();
        assert!(out.converged);
        for (got, want) in out.params.iter().zip(truth) {
            assert!(rel(*got, want) < 1e-8, "{:?}", out.params);
        }
        assert!(out.sse_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn identity_damping_also_converges() {
        let truth = [3.0, 2.0, 0.4];
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| MaModel.value(&truth, x)).collect();
        let ws = vec![1.0; xs.len()];
        let cfg = FitConfig {
            damping_mode: DampingMode::Identity,
            ..FitConfig::default()
        };
        let out = levenberg_marquardt(&MaModel, &xs, &ys, &ws, [2.5, 1.8, 0.35], &cfg).unwrap();
        for (got, want) in out.params.iter().zip(truth) {
            assert!(rel(*got, want) < 1e-6, "{:?}", out.params);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| MaModel.value(&[3.0, 2.0, 0.4], x) + (x * 7.0).sin())
            .collect();
        let ws = vec![1.0; xs.len()];
        let cfg = FitConfig {
            max_iterations: 1,
            ..FitConfig::default()
        };
        let out = levenberg_marquardt(&MaModel, &xs, &ys, &ws, [1.0, 1.0, 0.2], &cfg).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(!out.converged);
    }
}
