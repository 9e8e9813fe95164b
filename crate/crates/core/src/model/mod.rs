//! The two distribution models and the map between their parameters.
//!
//! Menzerath-Altmann (power law with exponential cutoff):
//!
//! ```text
//! n(l) = A · l^b · e^(-c·l)
//! ```
//!
//! Statistical-mechanical form, with structural degeneracy ω (alphabet size)
//! held fixed:
//!
//! ```text
//! n(l) = ω^l · e^φ · l^α · e^(-θ·l)
//! ```
//!
//! The two coincide under `α = b`, `e^φ = A`, `θ = c + ln ω`. Evaluation is
//! done in log space because `ω^l` alone overflows `f64` near `l ≈ 200`.

mod disorder;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use disorder::{boltzmann_occupations, log_disorder, maximize_disorder_bruteforce, OccupationVector};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("no feasible occupation for N={n_total}, L={l_total}")]
    NoFeasibleOccupation { n_total: u64, l_total: u64 },
    #[error("invalid length states: {0}")]
    InvalidLengths(String),
    #[error("constraints pin every word to one length (mean {mean})")]
    DegenerateConstraints { mean: f64 },
}

/// `(A, b, c)` of the Menzerath-Altmann law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaParams {
    #[serde(rename = "A")]
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl MaParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `c > 0`: the law sums to a finite total over unbounded lengths.
    pub fn is_normalizable(&self) -> bool {
        self.c > 0.0
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    /// Value at a real-valued length; used for Jacobians and smooth curves.
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        self.a * (self.b * x.ln() - self.c * x).exp()
    }
}

/// `(φ, α, θ)` plus the fixed structural degeneracy `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmmaParams {
    pub phi: f64,
    pub alpha: f64,
    pub theta: f64,
    pub omega: u32,
}

impl SmmaParams {
    pub fn new(phi: f64, alpha: f64, theta: f64, omega: u32) -> Self {
        assert!(omega >= 1, "omega must be at least 1");
        Self {
            phi,
            alpha,
            theta,
            omega,
        }
    }

    pub fn ln_omega(&self) -> f64 {
        (self.omega as f64).ln()
    }

    /// `θ > ln ω`: the series `Σ_l n(l)` converges.
    pub fn is_normalizable(&self) -> bool {
        self.theta > self.ln_omega()
    }

    /// Free parameters `[φ, α, θ]`.
    pub fn free(&self) -> [f64; 3] {
        [self.phi, self.alpha, self.theta]
    }

    pub fn with_free(&self, p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2], self.omega)
    }

    pub(crate) fn ln_value_at(&self, x: f64) -> f64 {
        self.phi + self.alpha * x.ln() + x * (self.ln_omega() - self.theta)
    }

    pub(crate) fn value_at(&self, x: f64) -> f64 {
        self.ln_value_at(x).exp()
    }
}

/// `A · l^b · e^(-c·l)`.
pub fn ma_eval(p: &MaParams, l: u32) -> f64 {
    debug_assert!(l >= 1);
    p.value_at(l as f64)
}

/// `ω^l · e^φ · l^α · e^(-θ·l)`, exponentiated from its logarithm.
///
/// Returns `+inf` only when the logarithm itself exceeds the `f64` range.
pub fn smma_eval(p: &SmmaParams, l: u32) -> f64 {
    debug_assert!(l >= 1);
    p.value_at(l as f64)
}

/// Natural log of [`smma_eval`].
pub fn ln_smma_eval(p: &SmmaParams, l: u32) -> f64 {
    p.ln_value_at(l as f64)
}

pub fn ma_to_smma(p: &MaParams, omega: u32) -> SmmaParams {
    let ln_omega = (omega as f64).ln();
    SmmaParams::new(p.a.ln(), p.b, p.c + ln_omega, omega)
}

pub fn smma_to_ma(p: &SmmaParams) -> MaParams {
    MaParams::new(p.phi.exp(), p.alpha, p.theta - p.ln_omega())
}

/// `ln(ω^l · l^α)`.
pub fn ln_degeneracy(l: u32, omega: u32, alpha: f64) -> f64 {
    l as f64 * (omega as f64).ln() + alpha * (l as f64).ln()
}

/// Weighted degeneracy `ω^l · l^α` of a length state.
///
/// `ω^l` is formed by repeated multiplication while it is exactly
/// representable, so integer cases like `26^3` come out exact.
pub fn degeneracy(l: u32, omega: u32, alpha: f64) -> f64 {
    let base = (omega as f64).powi(l as i32);
    if base < 9_007_199_254_740_992.0 {
        base * (l as f64).powf(alpha)
    } else {
        ln_degeneracy(l, omega, alpha).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BROWN_MA: MaParams = MaParams {
        a: 2.5236,
        b: 8.2039,
        c: 1.1595,
    };

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn ma_eval_at_reference_brown_parameters() {
        assert!(close(ma_eval(&BROWN_MA, 8), 6059.0, 0.01));
        let l1 = ma_eval(&BROWN_MA, 1);
        assert!((l1 - 0.79).abs() < 0.01 && l1.round() == 1.0, "{l1}");
        assert_eq!(ma_eval(&MaParams::new(5.0, 0.0, 0.0), 7), 5.0);
    }

    #[test]
    fn smma_eval_at_reference_parameters() {
        let brown = SmmaParams::new(0.9281, 8.2014, 4.4173, 26);
        assert!(close(smma_eval(&brown, 8), 6056.0, 0.01));
        let metu = SmmaParams::new(-0.2871, 8.9299, 4.3970, 29);
        assert!(close(smma_eval(&metu, 9), 23542.0, 0.01));
        assert_eq!(smma_eval(&SmmaParams::new(0.0, 0.0, 0.0, 1), 5), 1.0);
    }

    #[test]
    fn smma_eval_survives_large_lengths() {
        let p = ma_to_smma(&MaParams::new(1.0, 2.0, 0.5), 40);
        let v = smma_eval(&p, 400);
        assert!(v.is_finite() && v > 0.0);
        let direct = ma_eval(&MaParams::new(1.0, 2.0, 0.5), 400);
        assert!(close(v, direct, 1e-10));
    }

    #[test]
    fn transforms() {
        let s = ma_to_smma(&BROWN_MA, 26);
        assert!((s.theta - 4.4173).abs() < 5e-4);
        assert_eq!(s.alpha, BROWN_MA.b);

        let id = ma_to_smma(&MaParams::new(1.0, 0.0, 0.0), 1);
        assert_eq!((id.phi, id.alpha, id.theta), (0.0, 0.0, 0.0));

        let metu = ma_to_smma(&MaParams::new(0.7454, 8.9357, 1.0303), 29);
        assert!((metu.phi - -0.2938).abs() < 1e-4);
        assert!((metu.theta - 4.3976).abs() < 1e-4);
        assert!((metu.phi - -0.2871).abs() < 0.01 && (metu.theta - 4.3970).abs() < 0.01);

        let back = smma_to_ma(&SmmaParams::new(0.9281, 8.2014, 4.4173, 26));
        assert!((back.c - 1.1592).abs() < 5e-4);
        assert!((back.c - 1.1595).abs() < 0.0255);

        let flat = smma_to_ma(&SmmaParams::new(0.0, 0.0, 2f64.ln(), 2));
        assert_eq!((flat.a, flat.b, flat.c), (1.0, 0.0, 0.0));
    }

    #[test]
    fn round_trip_brown() {
        let r = smma_to_ma(&ma_to_smma(&BROWN_MA, 26));
        for (x, y) in r.to_array().iter().zip(BROWN_MA.to_array()) {
            assert!(close(*x, y, 1e-12));
        }
    }

    #[test]
    fn degeneracy_values() {
        assert_eq!(degeneracy(3, 26, 0.0), 17576.0);
        assert_eq!(degeneracy(1, 5, 3.7), 5.0);
        assert_eq!(degeneracy(4, 2, 1.0), 64.0);
        let big = degeneracy(300, 26, 0.5);
        assert!(big.is_infinite() || big > 1e300);
        assert!(ln_degeneracy(300, 26, 0.5).is_finite());
    }

    #[test]
    fn normalizability_flags() {
        assert!(MaParams::new(1.0, 2.0, 0.1).is_normalizable());
        assert!(!MaParams::new(1.0, 2.0, 0.0).is_normalizable());
        let s = SmmaParams::new(0.0, 1.0, 26f64.ln(), 26);
        assert!(!s.is_normalizable());
        assert!(SmmaParams::new(0.0, 1.0, 26f64.ln() + 1e-9, 26).is_normalizable());
    }

    #[test]
    fn params_json_field_names() {
        let j = serde_json::to_string(&BROWN_MA).unwrap();
        assert_eq!(j, r#"{"A":2.5236,"b":8.2039,"c":1.1595}"#);
        let s = serde_json::to_string(&SmmaParams::new(1.0, 2.0, 3.0, 26)).unwrap();
        assert_eq!(s, r#"{"phi":1.0,"alpha":2.0,"theta":3.0,"omega":26}"#);
    }
}
