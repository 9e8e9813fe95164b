use super::{check_report, round_count, ReportError};
use crate::corpus::LengthDistribution;
use crate::fitting::{FitReport, ModelKind};

/// One row of the observed / MA / SMMA comparison, predictions rounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub length: u32,
    pub observed: u64,
    pub ma: u64,
    pub smma: u64,
}

pub fn table1_rows(d: &LengthDistribution, ma: &FitReport, smma: &FitReport) -> Result<Vec<Table1Row>, ReportError> {
    check_report(d, ma, ModelKind::Ma)?;
    check_report(d, smma, ModelKind::Smma)?;
    Ok(d.states()
        .iter()
        .zip(&ma.predicted)
        .zip(&smma.predicted)
        .map(|((s, m), sm)| Table1Row {
            length: s.length,
            observed: s.count,
            ma: round_count(m.1),
            smma: round_count(sm.1),
        })
        .collect())
}

/// Fixed-width text table of observed and predicted counts per length.
pub fn render_table1(d: &LengthDistribution, ma: &FitReport, smma: &FitReport) -> Result<String, ReportError> {
    let rows = table1_rows(d, ma, smma)?;
    let mut out = String::new();
    if !d.source_label().is_empty() {
        out.push_str(&format!("{}\n", d.source_label()));
    }
    out.push_str(&format!(
        "{:>6}  {:>10}  {:>10}  {:>10}\n",
        "length", "observed", "MA", "SMMA"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:>6}  {:>10}  {:>10}  {:>10}\n",
            r.length, r.observed, r.ma, r.smma
        ));
    }
    Ok(out)
}
