//! Plot data and tabular summaries of fitted distributions.

mod plot;
mod table;

use thiserror::Error;

pub use plot::{
    build_plot_data, emit_plot_data, parse_plot_data, render_plot_data, PlotData, PlotRow, PlotSeries, SeriesKind,
    DEFAULT_GRID_STEP,
};
pub use table::{render_table1, table1_rows, Table1Row};

use crate::corpus::LengthDistribution;
use crate::fitting::{FitReport, ModelKind};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("distribution has no states")]
    EmptyDistribution,
    #[error("report does not match the distribution: {0}")]
    Mismatch(String),
    #[error("grid step must be positive and finite (got {0})")]
    InvalidGridStep(f64),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Checks that `report` is a `kind` fit over exactly the states of `d`.
pub(crate) fn check_report(d: &LengthDistribution, report: &FitReport, kind: ModelKind) -> Result<(), ReportError> {
    if report.model_kind != kind || report.params.kind() != kind {
        return Err(ReportError::Mismatch(format!(
            "expected a {} report, got {}",
            kind.as_str(),
            report.model_kind.as_str()
        )));
    }
    let same =
        report.predicted.len() == d.len() && report.predicted.iter().zip(d.states()).all(|(p, s)| p.0 == s.length);
    if !same {
        return Err(ReportError::Mismatch(format!(
            "{} report lengths differ from the distribution's states",
            kind.as_str()
        )));
    }
    Ok(())
}

/// Rounds half up, clamping negative predictions to zero.
pub fn round_count(x: f64) -> u64 {
    (x + 0.5).floor().max(0.0) as u64
}
