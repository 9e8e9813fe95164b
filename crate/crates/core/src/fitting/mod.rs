//! Least-squares fitting of the two models to a [`LengthDistribution`].
//!
//! The objective is the plain sum of squared errors on raw counts over the
//! observed length states. Standard errors come from the Gauss-Newton
//! covariance `SSE/(m-3) · (JᵀJ)⁻¹` at the optimum. Parameters are not
//! constrained during the search; whether the result sums to a finite total
//! is reported afterwards in [`FitReport::normalizable`].

mod goodness;
mod lm;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LengthDistribution;
use crate::model::{ma_to_smma, MaParams, SmmaParams};

pub use goodness::{goodness, Goodness};
pub use lm::{finite_difference_gradient, levenberg_marquardt, CurveModel, LmOutcome, MaModel, SmmaModel};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {need} states, got {got}")]
    TooFewStates { got: usize, need: usize },
    #[error("degenerate design matrix for the log-linear initial guess")]
    DegenerateDesign,
    #[error("singular normal matrix JᵀJ")]
    Singular,
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),
    #[error("observed has {observed} values but predicted has {predicted}")]
    LengthMismatch { observed: usize, predicted: usize },
    #[error("structural degeneracy omega is required for the SMMA model")]
    MissingOmega,
    #[error("omega mismatch: distribution has {distribution}, initial guess has {init}")]
    OmegaMismatch { distribution: u32, init: u32 },
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingMode {
    /// `λ · diag(JᵀJ)`
    #[default]
    Marquardt,
    /// `λ · I`
    Identity,
}

/// Residual weighting. Only `Unweighted` reproduces the reference tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Unweighted,
    /// `1 / max(n_i, 1)`
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    pub initial_damping: f64,
    pub damping_up: f64,
    pub damping_down: f64,
    pub tol_chisq_rel: f64,
    pub tol_param_rel: f64,
    pub jacobian_mode: JacobianMode,
    pub damping_mode: DampingMode,
    pub weighting: Weighting,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            initial_damping: 1e-3,
            damping_up: 10.0,
            damping_down: 10.0,
            tol_chisq_rel: 1e-10,
            tol_param_rel: 1e-8,
            jacobian_mode: JacobianMode::Analytic,
            damping_mode: DampingMode::Marquardt,
            weighting: Weighting::Unweighted,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        let positive = [
            ("initial_damping", self.initial_damping),
            ("damping_up", self.damping_up),
            ("damping_down", self.damping_down),
            ("tol_chisq_rel", self.tol_chisq_rel),
            ("tol_param_rel", self.tol_param_rel),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FitError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("damping_up", self.damping_up), ("damping_down", self.damping_down)] {
            if v <= 1.0 {
                return Err(FitError::InvalidConfig(format!("{name} must exceed 1, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(FitError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "MA")]
    Ma,
    #[serde(rename = "SMMA")]
    Smma,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ma => "MA",
            ModelKind::Smma => "SMMA",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FittedParams {
    Ma(MaParams),
    Smma(SmmaParams),
}

impl FittedParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedParams::Ma(_) => ModelKind::Ma,
            FittedParams::Smma(_) => ModelKind::Smma,
        }
    }

    pub fn free(&self) -> [f64; 3] {
        match self {
            FittedParams::Ma(p) => p.to_array(),
            FittedParams::Smma(p) => p.free(),
        }
    }

    pub fn is_normalizable(&self) -> bool {
        match self {
            FittedParams::Ma(p) => p.is_normalizable(),
            FittedParams::Smma(p) => p.is_normalizable(),
        }
    }

    /// Model value at a real-valued length.
    pub fn value_at(&self, x: f64) -> f64 {
        match self {
            FittedParams::Ma(p) => p.value_at(x),
            FittedParams::Smma(p) => p.value_at(x),
        }
    }

    pub fn as_ma(&self) -> Option<&MaParams> {
        match self {
            FittedParams::Ma(p) => Some(p),
            FittedParams::Smma(_) => None,
        }
    }

    pub fn as_smma(&self) -> Option<&SmmaParams> {
        match self {
            FittedParams::Smma(p) => Some(p),
            FittedParams::Ma(_) => None,
        }
    }
}

/// Outcome of one fit. Serializes with exactly the documented field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    pub model_kind: ModelKind,
    pub params: FittedParams,
    pub std_errors: Vec<f64>,
    /// `(l_i, predicted n_i)`, aligned with the fitted distribution's states.
    pub predicted: Vec<(u32, f64)>,
    pub sse: f64,
    pub r: f64,
    pub r_squared: f64,
    pub iterations: usize,
    pub converged: bool,
    pub normalizable: bool,
}

impl FitReport {
    pub fn predicted_values(&self) -> Vec<f64> {
        self.predicted.iter().map(|p| p.1).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Log-linear least squares on `ln n_i = ln A + b ln l_i - c l_i` over
/// states with `n_i ≥ 1`.
pub fn initial_guess_ma(d: &LengthDistribution) -> Result<MaParams, FitError> {
    let usable: Vec<_> = d.states().iter().filter(|s| s.count >= 1).collect();
    if usable.len() < 3 {
        return Err(FitError::TooFewStates {
            got: usable.len(),
            need: 3,
        });
    }
    let m = usable.len();
    let design = DMatrix::from_fn(m, 3, |i, j| {
        let l = usable[i].length as f64;
        match j {
            0 => 1.0,
            1 => l.ln(),
            _ => -l,
        }
    });
    let rhs = DVector::from_iterator(m, usable.iter().map(|s| (s.count as f64).ln()));
    let svd = design.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > smax * 1e-12) {
        return Err(FitError::DegenerateDesign);
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|_| FitError::DegenerateDesign)?;
    Ok(MaParams::new(coef[0].exp(), coef[1], coef[2]))
}

struct Data {
    lengths: Vec<u32>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    ws: Vec<f64>,
}

fn prepare(d: &LengthDistribution, cfg: &FitConfig) -> Result<Data, FitError> {
    cfg.validate()?;
    if d.len() < 4 {
        return Err(FitError::TooFewStates { got: d.len(), need: 4 });
    }
    let lengths = d.lengths();
    let xs = lengths.iter().map(|&l| l as f64).collect();
    let ys = d.counts();
    let ws = ys
        .iter()
        .map(|&y: &f64| match cfg.weighting {
            Weighting::Unweighted => 1.0,
            Weighting::Poisson => 1.0 / y.max(1.0),
        })
        .collect();
    Ok(Data { lengths, xs, ys, ws })
}

/// Symmetric inverse with a scale-free singularity check.
fn covariance_inverse(jtj: &Matrix3<f64>) -> Result<Matrix3<f64>, FitError> {
    let diag = jtj.diagonal();
    if diag.iter().any(|&v| !(v > 0.0)) {
        return Err(FitError::Singular);
    }
    let s = diag.map(|v| 1.0 / v.sqrt());
    let scaled = Matrix3::from_fn(|i, j| jtj[(i, j)] * s[i] * s[j]);
    let eig = scaled.symmetric_eigenvalues();
    if !(eig.min() > 1e-14 * eig.max()) {
        return Err(FitError::Singular);
    }
    let inv = scaled.try_inverse().ok_or(FitError::Singular)?;
    Ok(Matrix3::from_fn(|i, j| inv[(i, j)] * s[i] * s[j]))
}

fn finish<M: CurveModel>(model: &M, data: &Data, out: &LmOutcome, params: FittedParams) -> Result<FitReport, FitError> {
    let (jtj, _) = lm::normal_equations(model, JacobianMode::Analytic, &out.params, &data.xs, &data.ys, &data.ws);
    let cov = covariance_inverse(&jtj)? * (out.sse / (data.xs.len() - 3) as f64);
    let std_errors = (0..3).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();

    let predicted: Vec<(u32, f64)> = data
        .lengths
        .iter()
        .zip(&data.xs)
        .map(|(&l, &x)| (l, model.value(&out.params, x)))
        .collect();
    let pred_values: Vec<f64> = predicted.iter().map(|p| p.1).collect();
    let g = goodness(&data.ys, &pred_values)?;
    Ok(FitReport {
        model_kind: params.kind(),
        params,
        std_errors,
        predicted,
        sse: g.sse,
        r: g.r,
        r_squared: g.r_squared,
        iterations: out.iterations,
        converged: out.converged,
        normalizable: params.is_normalizable(),
    })
}

/// Runs the MA minimization and returns the raw optimizer outcome as well.
pub fn fit_ma_traced(
    d: &LengthDistribution,
    cfg: &FitConfig,
    init: Option<MaParams>,
) -> Result<(FitReport, LmOutcome), FitError> {
    let data = prepare(d, cfg)?;
    let init = match init {
        Some(p) => p,
        None => initial_guess_ma(d)?,
    };
    let out = levenberg_marquardt(&MaModel, &data.xs, &data.ys, &data.ws, init.to_array(), cfg)?;
    let params = FittedParams::Ma(MaParams::from_array(out.params));
    let report = finish(&MaModel, &data, &out, params)?;
    Ok((report, out))
}

/// Fits `A · l^b · e^(-c·l)`; `init` defaults to [`initial_guess_ma`].
pub fn fit_ma(d: &LengthDistribution, cfg: &FitConfig, init: Option<MaParams>) -> Result<FitReport, FitError> {
    fit_ma_traced(d, cfg, init).map(|r| r.0)
}

/// Like [`fit_smma`] but with `ω` given explicitly.
pub fn fit_smma_traced(
    d: &LengthDistribution,
    omega: u32,
    cfg: &FitConfig,
    init: Option<SmmaParams>,
) -> Result<(FitReport, LmOutcome), FitError> {
    if omega == 0 {
        return Err(FitError::MissingOmega);
    }
    if let Some(p) = init.filter(|p| p.omega != omega) {
        return Err(FitError::OmegaMismatch {
            distribution: omega,
            init: p.omega,
        });
    }
    let data = prepare(d, cfg)?;
    let init = match init {
        Some(p) => p,
        None => ma_to_smma(&initial_guess_ma(d)?, omega),
    };
    let model = SmmaModel { omega };
    let out = levenberg_marquardt(&model, &data.xs, &data.ys, &data.ws, init.free(), cfg)?;
    let params = FittedParams::Smma(init.with_free(out.params));
    let report = finish(&model, &data, &out, params)?;
    Ok((report, out))
}

pub fn fit_smma_with_omega(
    d: &LengthDistribution,
    omega: u32,
    cfg: &FitConfig,
    init: Option<SmmaParams>,
) -> Result<FitReport, FitError> {
    fit_smma_traced(d, omega, cfg, init).map(|r| r.0)
}

/// Fits `ω^l · e^φ · l^α · e^(-θ·l)` with `ω` held fixed.
///
/// `ω` comes from the distribution's alphabet, or from `init` when the
/// distribution has none. The default start is the log-linear MA guess
/// mapped through [`ma_to_smma`].
pub fn fit_smma(d: &LengthDistribution, cfg: &FitConfig, init: Option<SmmaParams>) -> Result<FitReport, FitError> {
    let omega = match (d.omega(), init) {
        (Some(o), _) => o,
        (None, Some(p)) => p.omega,
        (None, None) => return Err(FitError::MissingOmega),
    };
    fit_smma_with_omega(d, omega, cfg, init)
}

/// Builds a report for given parameters without optimizing.
///
/// `std_errors` is empty, `iterations` is 0 and `converged` is false.
pub fn evaluate(d: &LengthDistribution, params: FittedParams) -> Result<FitReport, FitError> {
    let predicted: Vec<(u32, f64)> = d
        .lengths()
        .into_iter()
        .map(|l| (l, params.value_at(l as f64)))
        .collect();
    let pred_values: Vec<f64> = predicted.iter().map(|p| p.1).collect();
    let g = goodness(&d.counts(), &pred_values)?;
    Ok(FitReport {
        model_kind: params.kind(),
        params,
        std_errors: Vec::new(),
        predicted,
        sse: g.sse,
        r: g.r,
        r_squared: g.r_squared,
        iterations: 0,
        converged: false,
        normalizable: params.is_normalizable(),
    })
}

/// Per-length partial derivatives of the model at `params`.
///
/// Rows follow `lengths`; columns are `[A, b, c]` or `[φ, α, θ]`.
pub fn jacobian(params: &FittedParams, lengths: &[u32]) -> Vec<[f64; 3]> {
    let p = params.free();
    lengths
        .iter()
        .map(|&l| match params {
            FittedParams::Ma(_) => MaModel.gradient(&p, l as f64),
            FittedParams::Smma(s) => SmmaModel { omega: s.omega }.gradient(&p, l as f64),
        })
        .collect()
}
