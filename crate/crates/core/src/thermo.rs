//! Thermodynamic reading of a fitted statistical-mechanical model.
//!
//! With Boltzmann's constant set to 1 and word length playing the role of
//! energy:
//!
//! ```text
//! T  = 1/θ
//! μ  = φ/θ
//! Z  = Σ_{l=1..l_max} ω^l l^α e^(-θ l)
//! F  = -ln Z / θ
//! S  = N (ln N - 1) + Σ_i n_i [ln(ω^l_i l_i^α / n_i) + 1]
//! ```
//!
//! `Z` is accumulated with log-sum-exp. The entropy uses either the observed
//! counts or the model counts at the observed lengths; the report records
//! which.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LengthDistribution;
use crate::model::{ln_degeneracy, smma_eval, SmmaParams};
use crate::numeric::{log_sum_exp, rel_diff};

#[derive(Debug, Error, PartialEq)]
pub enum ThermoError {
    #[error("theta must be positive for a physical temperature (got {0})")]
    NonPositiveTheta(f64),
    #[error("partition function diverges: theta {theta} <= ln(omega) {ln_omega}")]
    Divergent { theta: f64, ln_omega: f64 },
    #[error("l_max must be at least 1")]
    InvalidLMax,
    #[error("distribution has no words")]
    EmptyDistribution,
    #[error("need at least 2 reports to compare, got {0}")]
    TooFewReports(usize),
    #[error("auto l_max did not converge within {0} terms")]
    AutoLimit(u32),
}

/// Summation range for the partition function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LMax {
    Fixed(u32),
    /// Extend until the next term drops below `1e-15 · Z`. Needs `θ > ln ω`.
    Auto,
}

const AUTO_REL_CUTOFF: f64 = 1e-15;
const AUTO_MAX_TERMS: u32 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partition {
    pub z: f64,
    pub ln_z: f64,
    pub l_max_used: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyBasis {
    #[default]
    ObservedCounts,
    PredictedCounts,
}

pub fn temperature(p: &SmmaParams) -> Result<f64, ThermoError> {
    if !(p.theta > 0.0) {
        return Err(ThermoError::NonPositiveTheta(p.theta));
    }
    Ok(1.0 / p.theta)
}

pub fn chemical_potential(p: &SmmaParams) -> Result<f64, ThermoError> {
    if !(p.theta > 0.0) {
        return Err(ThermoError::NonPositiveTheta(p.theta));
    }
    Ok(p.phi / p.theta)
}

fn ln_term(p: &SmmaParams, l: u32) -> f64 {
    ln_degeneracy(l, p.omega, p.alpha) - p.theta * l as f64
}

pub fn partition_function(p: &SmmaParams, l_max: LMax) -> Result<Partition, ThermoError> {
    let terms: Vec<f64> = match l_max {
        LMax::Fixed(0) => return Err(ThermoError::InvalidLMax),
        LMax::Fixed(n) => (1..=n).map(|l| ln_term(p, l)).collect(),
        LMax::Auto => {
            if !p.is_normalizable() {
                return Err(ThermoError::Divergent {
                    theta: p.theta,
                    ln_omega: p.ln_omega(),
                });
            }
            let mut terms = vec![ln_term(p, 1)];
            let mut ln_z = terms[0];
            let mut l = 1;
            loop {
                l += 1;
                if l > AUTO_MAX_TERMS {
                    return Err(ThermoError::AutoLimit(AUTO_MAX_TERMS));
                }
                let t = ln_term(p, l);
                let falling = t < *terms.last().unwrap();
                if falling && t < ln_z + AUTO_REL_CUTOFF.ln() {
                    break;
                }
                terms.push(t);
                ln_z = log_sum_exp(&[ln_z, t]);
            }
            terms
        }
    };
    let ln_z = log_sum_exp(&terms);
    Ok(Partition {
        z: ln_z.exp(),
        ln_z,
        l_max_used: terms.len() as u32,
    })
}

pub fn free_energy(p: &SmmaParams, l_max: LMax) -> Result<f64, ThermoError> {
    let t = temperature(p)?;
    Ok(-partition_function(p, l_max)?.ln_z * t)
}

/// Entropy of the distinct-word arrangement. Zero-count states contribute 0.
pub fn entropy(d: &LengthDistribution, p: &SmmaParams, basis: EntropyBasis) -> Result<f64, ThermoError> {
    let occupied: Vec<(u32, f64)> = d
        .states()
        .iter()
        .map(|s| match basis {
            EntropyBasis::ObservedCounts => (s.length, s.count as f64),
            EntropyBasis::PredictedCounts => (s.length, smma_eval(p, s.length)),
        })
        .filter(|&(_, n)| n > 0.0)
        .collect();
    let n_total: f64 = occupied.iter().map(|s| s.1).sum();
    if !(n_total > 0.0) {
        return Err(ThermoError::EmptyDistribution);
    }
    let body: f64 = occupied
        .iter()
        .map(|&(l, n)| n * (ln_degeneracy(l, p.omega, p.alpha) - n.ln() + 1.0))
        .sum();
    Ok(n_total * (n_total.ln() - 1.0) + body)
}

/// `L / N`, the mean letter count of a distinct word.
pub fn mean_length(d: &LengthDistribution) -> Result<f64, ThermoError> {
    if d.total_distinct() == 0 {
        return Err(ThermoError::EmptyDistribution);
    }
    Ok(d.total_letters() as f64 / d.total_distinct() as f64)
}

/// Which summation range to use when building a [`ThermoReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LMaxChoice {
    /// The distribution's largest observed length.
    #[default]
    Observed,
    Fixed(u32),
    /// [`LMax::Auto`], falling back to `Observed` when the series diverges.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ThermoOptions {
    pub l_max: LMaxChoice,
    pub entropy_basis: EntropyBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoReport {
    pub temperature: f64,
    pub chemical_potential: f64,
    pub log_partition: f64,
    pub partition: f64,
    pub entropy: f64,
    pub free_energy: f64,
    pub mean_length: f64,
    pub l_max_used: u32,
    pub entropy_basis: EntropyBasis,
}

impl ThermoReport {
    /// Builds the full report. Non-fatal issues (auto range fallback) are
    /// returned as warnings.
    pub fn compute(
        d: &LengthDistribution,
        p: &SmmaParams,
        opts: ThermoOptions,
    ) -> Result<(Self, Vec<String>), ThermoError> {
        let mut warnings = Vec::new();
        let observed_max = d.max_length().ok_or(ThermoError::EmptyDistribution)?;
        let l_max = match opts.l_max {
            LMaxChoice::Observed => LMax::Fixed(observed_max),
            LMaxChoice::Fixed(n) => LMax::Fixed(n),
            LMaxChoice::Auto if p.is_normalizable() => LMax::Auto,
            LMaxChoice::Auto => {
                warnings.push(format!(
                    "partition function diverges (theta {:.4} <= ln omega {:.4}); using observed l_max = {observed_max}",
                    p.theta,
                    p.ln_omega()
                ));
                LMax::Fixed(observed_max)
            }
        };
        let temperature = temperature(p)?;
        let z = partition_function(p, l_max)?;
        let report = Self {
            temperature,
            chemical_potential: chemical_potential(p)?,
            log_partition: z.ln_z,
            partition: z.z,
            entropy: entropy(d, p, opts.entropy_basis)?,
            free_energy: -z.ln_z * temperature,
            mean_length: mean_length(d)?,
            l_max_used: z.l_max_used,
            entropy_basis: opts.entropy_basis,
        };
        Ok((report, warnings))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub temperature: f64,
    pub chemical_potential: f64,
    pub entropy: f64,
    pub free_energy: f64,
    pub mean_length: f64,
}

/// Differences between two rows. Relative differences are
/// `|x₁ - x₂| / max(|x₁|, |x₂|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDifference {
    pub first: String,
    pub second: String,
    pub temperature_difference: f64,
    pub chemical_potential_difference: f64,
    pub entropy_relative_difference: f64,
    pub free_energy_relative_difference: f64,
    pub mean_length_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// One entry per unordered pair, in input order.
    pub differences: Vec<PairDifference>,
}

impl ComparisonTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

pub fn compare(reports: &[(String, ThermoReport)]) -> Result<ComparisonTable, ThermoError> {
    if reports.len() < 2 {
        return Err(ThermoError::TooFewReports(reports.len()));
    }
    let rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|(label, r)| ComparisonRow {
            label: label.clone(),
            temperature: r.temperature,
            chemical_potential: r.chemical_potential,
            entropy: r.entropy,
            free_energy: r.free_energy,
            mean_length: r.mean_length,
        })
        .collect();
    let mut differences = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            differences.push(PairDifference {
                first: a.label.clone(),
                second: b.label.clone(),
                temperature_difference: b.temperature - a.temperature,
                chemical_potential_difference: b.chemical_potential - a.chemical_potential,
                entropy_relative_difference: rel_diff(a.entropy, b.entropy),
                free_energy_relative_difference: rel_diff(a.free_energy, b.free_energy),
                mean_length_difference: b.mean_length - a.mean_length,
            });
        }
    }
    Ok(ComparisonTable { rows, differences })
}
