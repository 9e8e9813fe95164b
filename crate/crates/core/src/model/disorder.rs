//! Microstate counting for small occupation vectors.
//!
//! The disorder number of an occupation `{n_i}` over length states with
//! weighted degeneracies `g_i = ω^l_i · l_i^α` is
//!
//! ```text
//! Ω = N! · Π_i g_i^n_i / n_i!
//! ```
//!
//! Maximizing it under fixed `N = Σ n_i` and `L = Σ l_i n_i` gives the
//! exponential-family shape `n_i ∝ g_i · e^(-θ l_i)`. The brute-force
//! maximizer below uses exact log-factorials, so it checks that shape at
//! finite `N` without relying on Stirling's approximation.

use super::{ln_degeneracy, smma_eval, ModelError, SmmaParams};
use crate::numeric::{ln_factorial, log_sum_exp};

#[derive(Clone, Debug, PartialEq)]
pub struct OccupationVector {
    /// `(l_i, n_i)` pairs.
    pub states: Vec<(u32, u64)>,
    pub omega: u32,
    pub alpha: f64,
}

impl OccupationVector {
    pub fn total(&self) -> u64 {
        self.states.iter().map(|s| s.1).sum()
    }

    pub fn total_length(&self) -> u64 {
        self.states.iter().map(|&(l, n)| l as u64 * n).sum()
    }

    pub fn occupations(&self) -> Vec<u64> {
        self.states.iter().map(|s| s.1).collect()
    }
}

/// `ln Ω` with exact log-factorials.
pub fn log_disorder(v: &OccupationVector) -> f64 {
    let mut acc = ln_factorial(v.total());
    for &(l, n) in &v.states {
        if n > 0 {
            acc += n as f64 * ln_degeneracy(l, v.omega, v.alpha) - ln_factorial(n);
        }
    }
    acc
}

fn check_lengths(lengths: &[u32]) -> Result<(), ModelError> {
    if lengths.is_empty() || lengths[0] == 0 {
        return Err(ModelError::InvalidLengths("lengths must be positive".into()));
    }
    if lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ModelError::InvalidLengths("lengths must be strictly increasing".into()));
    }
    Ok(())
}

/// Exhaustively finds the occupation of three length states that maximizes
/// `ln Ω` subject to `Σ n_i = n_total` and `Σ l_i n_i = l_total`.
///
/// The two constraints leave the first occupation as the only free integer,
/// so the search is linear in `n_total`. Ties go to the smaller first
/// occupation (the lexicographically smallest vector).
pub fn maximize_disorder_bruteforce(
    lengths: &[u32],
    n_total: u64,
    l_total: u64,
    omega: u32,
    alpha: f64,
) -> Result<OccupationVector, ModelError> {
    if lengths.len() != 3 {
        return Err(ModelError::InvalidLengths(format!(
            "expected exactly 3 length states, got {}",
            lengths.len()
        )));
    }
    check_lengths(lengths)?;
    let [l1, l2, l3] = [lengths[0] as i128, lengths[1] as i128, lengths[2] as i128];
    let (n, l) = (n_total as i128, l_total as i128);

    let mut best: Option<(f64, OccupationVector)> = None;
    for k in 0..=n {
        let rest = n - k;
        let numer = l - l1 * k - l2 * rest;
        if numer < 0 || numer % (l3 - l2) != 0 {
            continue;
        }
        let n3 = numer / (l3 - l2);
        if n3 > rest {
            continue;
        }
        let n2 = rest - n3;
        let v = OccupationVector {
            states: vec![(lengths[0], k as u64), (lengths[1], n2 as u64), (lengths[2], n3 as u64)],
            omega,
            alpha,
        };
        let score = log_disorder(&v);
        let better = match &best {
            None => true,
            Some((s, _)) => score > *s + 1e-12 * s.abs().max(1.0),
        };
        if better {
            best = Some((score, v));
        }
    }
    best.map(|(_, v)| v)
        .ok_or(ModelError::NoFeasibleOccupation { n_total, l_total })
}

/// Solves the two constraints for `(φ, θ)` of the exponential-family shape
/// and returns the parameters together with the real-valued occupations
/// `n_i = ω^l_i e^φ l_i^α e^(-θ l_i)` at each length.
///
/// Requires the mean `l_total / n_total` to lie strictly between the
/// smallest and largest length.
pub fn boltzmann_occupations(
    lengths: &[u32],
    n_total: u64,
    l_total: u64,
    omega: u32,
    alpha: f64,
) -> Result<(SmmaParams, Vec<f64>), ModelError> {
    check_lengths(lengths)?;
    if n_total == 0 {
        return Err(ModelError::NoFeasibleOccupation { n_total, l_total });
    }
    let target = l_total as f64 / n_total as f64;
    let lo_l = lengths[0] as f64;
    let hi_l = *lengths.last().unwrap() as f64;
    if target < lo_l || target > hi_l {
        return Err(ModelError::NoFeasibleOccupation { n_total, l_total });
    }
    if target == lo_l || target == hi_l {
        return Err(ModelError::DegenerateConstraints { mean: target });
    }

    let ln_g: Vec<f64> = lengths.iter().map(|&l| ln_degeneracy(l, omega, alpha)).collect();
    let log_terms =
        |theta: f64| -> Vec<f64> { lengths.iter().zip(&ln_g).map(|(&l, g)| g - theta * l as f64).collect() };
    // Mean length under weights g_i e^{-θ l_i}; strictly decreasing in θ.
    let mean = |theta: f64| -> f64 {
        let t = log_terms(theta);
        let lz = log_sum_exp(&t);
        lengths.iter().zip(&t).map(|(&l, x)| l as f64 * (x - lz).exp()).sum()
    };

    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while mean(lo) <= target {
        lo *= 2.0;
    }
    while mean(hi) >= target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mean(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let phi = (n_total as f64).ln() - log_sum_exp(&log_terms(theta));
    let p = SmmaParams::new(phi, alpha, theta, omega);
    let occ = lengths.iter().map(|&l| smma_eval(&p, l)).collect();
    Ok((p, occ))
}
