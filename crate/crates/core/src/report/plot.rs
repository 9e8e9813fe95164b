//! Overlay data for observed vs. predicted curves.
//!
//! ```text
//! # source_label=brown
//! # grid_step=0.25
//! l	observed	ma	smma
//! 1	26	0.79…	0.79…
//! 1.25		1.9…	1.9…
//! ```
//!
//! Rows at observed lengths carry the observed count; dense-grid rows leave
//! the observed field empty. All numbers use Rust's shortest round-trip
//! formatting, so output is byte-stable and parses back exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_report, ReportError};
use crate::corpus::LengthDistribution;
use crate::fitting::{FitReport, ModelKind};

pub const DEFAULT_GRID_STEP: f64 = 0.25;
const HEADER: &str = "l\tobserved\tma\tsmma";

#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub l: f64,
    pub observed: Option<f64>,
    pub ma: f64,
    pub smma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub label: String,
    pub grid_step: f64,
    pub rows: Vec<PlotRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Observed,
    MaPredicted,
    SmmaPredicted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

impl PlotData {
    /// Splits the rows into one series per kind, each sorted by `l`.
    pub fn series(&self) -> Vec<PlotSeries> {
        let observed = self.rows.iter().filter_map(|r| r.observed.map(|o| (r.l, o))).collect();
        let ma = self.rows.iter().map(|r| (r.l, r.ma)).collect();
        let smma = self.rows.iter().map(|r| (r.l, r.smma)).collect();
        [
            (SeriesKind::Observed, observed),
            (SeriesKind::MaPredicted, ma),
            (SeriesKind::SmmaPredicted, smma),
        ]
        .into_iter()
        .map(|(kind, points)| PlotSeries {
            label: self.label.clone(),
            kind,
            points,
        })
        .collect()
    }
}

pub fn build_plot_data(
    d: &LengthDistribution,
    ma: &FitReport,
    smma: &FitReport,
    grid_step: f64,
) -> Result<PlotData, ReportError> {
    if d.is_empty() {
        return Err(ReportError::EmptyDistribution);
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(ReportError::InvalidGridStep(grid_step));
    }
    check_report(d, ma, ModelKind::Ma)?;
    check_report(d, smma, ModelKind::Smma)?;

    let mut rows: Vec<PlotRow> = d
        .states()
        .iter()
        .zip(&ma.predicted)
        .zip(&smma.predicted)
        .map(|((s, m), sm)| PlotRow {
            l: s.length as f64,
            observed: Some(s.count as f64),
            ma: m.1,
            smma: sm.1,
        })
        .collect();

    let lo = d.min_length().unwrap() as f64;
    let hi = d.max_length().unwrap() as f64;
    let steps = ((hi - lo) / grid_step + 1e-9).floor() as u64;
    for k in 0..=steps {
        let l = lo + k as f64 * grid_step;
        let on_observed = d.states().iter().any(|s| (s.length as f64 - l).abs() < 1e-9);
        if !on_observed {
            rows.push(PlotRow {
                l,
                observed: None,
                ma: ma.params.value_at(l),
                smma: smma.params.value_at(l),
            });
        }
    }
    rows.sort_by(|a, b| a.l.total_cmp(&b.l));
    Ok(PlotData {
        label: d.source_label().to_string(),
        grid_step,
        rows,
    })
}

/// Renders plot data. `timestamp` (seconds since the epoch) adds a metadata
/// line and is the only non-deterministic part of the output.
pub fn render_plot_data(data: &PlotData, timestamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated_unix={ts}\n"));
    }
    out.push_str(&format!("# source_label={}\n", data.label.replace(['\n', '\r'], " ")));
    out.push_str(&format!("# grid_step={}\n", data.grid_step));
    out.push_str(HEADER);
    out.push('\n');
    for r in &data.rows {
        let observed = r.observed.map(|o| o.to_string()).unwrap_or_default();
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.l, observed, r.ma, r.smma));
    }
    out
}

pub fn parse_plot_data(text: &str) -> Result<PlotData, ReportError> {
    let mut label = String::new();
    let mut grid_step = DEFAULT_GRID_STEP;
    let mut header = false;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |reason: &str| ReportError::Parse {
            line,
            reason: reason.to_string(),
        };
        if let Some(body) = raw.strip_prefix('#') {
            if let Some((k, v)) = body.trim().split_once('=') {
                match k.trim() {
                    "source_label" => label = v.trim().to_string(),
                    "grid_step" => grid_step = v.trim().parse().map_err(|_| err("bad grid_step"))?,
                    _ => {}
                }
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        if !header {
            if raw != HEADER {
                return Err(err("missing header"));
            }
            header = true;
            continue;
        }
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() != 4 {
            return Err(err("expected 4 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
        rows.push(PlotRow {
            l: num(f[0])?,
            observed: if f[1].is_empty() { None } else { Some(num(f[1])?) },
            ma: num(f[2])?,
            smma: num(f[3])?,
        });
    }
    if !header {
        return Err(ReportError::Parse {
            line: text.lines().count() + 1,
            reason: "missing header".into(),
        });
    }
    Ok(PlotData { label, grid_step, rows })
}

/// Builds and writes plot data to `dest`.
pub fn emit_plot_data(
    d: &LengthDistribution,
    ma: &FitReport,
    smma: &FitReport,
    dest: impl AsRef<Path>,
    grid_step: f64,
    timestamp: Option<u64>,
) -> Result<PlotData, ReportError> {
    let data = build_plot_data(d, ma, smma, grid_step)?;
    let dest = dest.as_ref();
    std::fs::write(dest, render_plot_data(&data, timestamp)).map_err(|source| ReportError::Io {
        path: dest.display().to_string(),
        source,
    })?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::fitting::{fit_ma, fit_smma, FitConfig};

    fn fits(d: &LengthDistribution) -> (FitReport, FitReport) {
        let cfg = FitConfig::default();
        (fit_ma(d, &cfg, None).unwrap(), fit_smma(d, &cfg, None).unwrap())
    }

    #[test]
    fn brown_curves_overlap() {
        let d = datasets::brown();
        let (ma, sm) = fits(&d);
        let data = build_plot_data(&d, &ma, &sm, DEFAULT_GRID_STEP).unwrap();
        // 22 observed + 21 gaps × 3 interior grid points
        assert_eq!(data.rows.len(), 22 + 21 * 3);
        for r in &data.rows {
            assert!((r.ma - r.smma).abs() <= 0.005 * r.ma.abs().max(r.smma.abs()), "{r:?}");
        }
        assert!(data.rows.windows(2).all(|w| w[0].l < w[1].l));
    }

    #[test]
    fn metu_peaks() {
        let d = datasets::metu();
        let (ma, sm) = fits(&d);
        let data = build_plot_data(&d, &ma, &sm, 0.01).unwrap();
        let obs_peak = data
            .rows
            .iter()
            .filter(|r| r.observed.is_some())
            .max_by(|a, b| a.observed.partial_cmp(&b.observed).unwrap())
            .unwrap();
        assert_eq!(obs_peak.l, 9.0);
        let pred_peak = data.rows.iter().max_by(|a, b| a.ma.total_cmp(&b.ma)).unwrap();
        assert!(pred_peak.l > 8.0 && pred_peak.l < 9.0, "{}", pred_peak.l);
    }

    #[test]
    fn empty_distribution_is_an_error() {
        let d = datasets::brown();
        let (ma, sm) = fits(&d);
        let empty = LengthDistribution::new(vec![]).unwrap();
        assert!(matches!(
            build_plot_data(&empty, &ma, &sm, 0.25),
            Err(ReportError::EmptyDistribution)
        ));
        assert!(matches!(
            build_plot_data(&d, &sm, &ma, 0.25),
            Err(ReportError::Mismatch(_))
        ));
        assert!(build_plot_data(&d, &ma, &sm, 0.0).is_err());
        let (metu_ma, _) = fits(&datasets::metu());
        assert!(build_plot_data(&d, &metu_ma, &sm, 0.25).is_err());
    }

    #[test]
    fn half_step_grid() {
        let d = datasets::brown();
        let (ma, sm) = fits(&d);
        let data = build_plot_data(&d, &ma, &sm, 0.5).unwrap();
        let dense: Vec<f64> = data.rows.iter().filter(|r| r.observed.is_none()).map(|r| r.l).collect();
        assert_eq!(dense.len(), 21);
        assert!(dense.iter().all(|l| l.fract() == 0.5));
    }

    #[test]
    fn render_parse_round_trip_and_determinism() {
        let d = datasets::metu();
        let (ma, sm) = fits(&d);
        let data = build_plot_data(&d, &ma, &sm, 0.25).unwrap();
        let text = render_plot_data(&data, None);
        assert_eq!(
            text,
            render_plot_data(&build_plot_data(&d, &ma, &sm, 0.25).unwrap(), None)
        );
        assert_eq!(parse_plot_data(&text).unwrap(), data);
        let stamped = render_plot_data(&data, Some(1_700_000_000));
        assert!(stamped.starts_with("# generated_unix=1700000000\n"));
        assert_eq!(parse_plot_data(&stamped).unwrap(), data);
        assert!(text.contains("\n1.25\t\t"));
        assert_eq!(data.series().len(), 3);
        assert_eq!(data.series()[0].points.len(), 25);
    }
}
