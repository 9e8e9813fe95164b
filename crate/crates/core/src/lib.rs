//! Distinct-word length distributions and their statistical-mechanical reading.
//!
//! The pipeline is:
//!
//! 1. [`corpus`]: tokenize text and reduce it to counts of distinct words per
//!    length (or load a tabulated distribution).
//! 2. [`fitting`]: fit the Menzerath-Altmann law `A·l^b·e^(-c·l)` and its
//!    statistical-mechanical form `ω^l·e^φ·l^α·e^(-θ·l)` by Levenberg-Marquardt.
//! 3. [`thermo`]: read the fitted `(φ, α, θ)` as chemical potential and
//!    inverse temperature; derive partition function, entropy, free energy.
//! 4. [`report`]: tables, plot data and JSON.
//!
//! Two reference distributions (English Brown corpus, Turkish METU corpus)
//! ship in [`datasets`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too; doc examples
// show tab-separated files verbatim.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::tabs_in_doc_comments)]

pub mod cli;
pub mod corpus;
pub mod datasets;
pub mod fitting;
pub mod model;
pub mod numeric;
pub mod report;
pub mod thermo;

pub use corpus::{distill, tokenize, AlphabetSpec, LengthDistribution, LengthState, TokenPolicy};
pub use fitting::{fit_ma, fit_smma, FitConfig, FitReport};
pub use model::{ma_eval, ma_to_smma, smma_eval, smma_to_ma, MaParams, SmmaParams};
pub use thermo::ThermoReport;
