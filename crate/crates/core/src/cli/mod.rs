//! `smma` command-line interface.
//!
//! Exit codes: 0 when the computation completed (a fit that did not
//! converge still counts), 2 for usage and validation errors, 1 for runtime
//! failures.

mod args;

use std::io::Write;
use std::path::Path;

use clap::Parser;

use crate::corpus::{
    self, distill, tokenize, AlphabetSpec, CaseFold, LengthDistribution, NonLetterPolicy, TokenPolicy,
};
use crate::datasets;
use crate::fitting::{self, FitConfig, FitError, FitReport, FittedParams};
use crate::model::SmmaParams;
use crate::report::{self, DEFAULT_GRID_STEP};
use crate::thermo::{self, LMaxChoice, ThermoOptions, ThermoReport};

pub use args::{Cli, Command, FitArgs, ModelChoice, OutputFormat};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::MissingOmega
            | FitError::OmegaMismatch { .. }
            | FitError::InvalidConfig(_)
            | FitError::TooFewStates { .. } => usage(e.to_string()),
            _ => runtime(e.to_string()),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn say(&mut self, line: &str) {
        if !self.quiet {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn warn(&mut self, line: &str) {
        if !self.quiet {
            let _ = writeln!(self.err, "warning: {line}");
        }
    }
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        quiet: cli.quiet,
    };
    match dispatch(&cli, &mut io) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(cli, a, io),
        Command::Fit(a) => cmd_fit(cli, a, io),
        Command::Thermo(a) => cmd_thermo(cli, a, io),
        Command::Compare(a) => cmd_compare(cli, a, io),
        Command::PlotData(a) => cmd_plot_data(cli, a, io),
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

/// Reads a distribution file; bare `brown` / `metu` select the bundled data.
fn load_dist(path: &Path) -> Result<LengthDistribution, CliError> {
    if !path.exists() {
        if let Some(d) = path.to_str().and_then(datasets::by_name) {
            return Ok(d);
        }
    }
    let text = read_input(path)?;
    let d = corpus::parse_distribution(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(if d.source_label().is_empty() {
        d.with_label(stem(path))
    } else {
        d
    })
}

fn label_of(d: &LengthDistribution) -> &str {
    if d.source_label().is_empty() {
        "input"
    } else {
        d.source_label()
    }
}

fn resolve_omega(d: &LengthDistribution, flag: Option<u32>) -> Result<u32, CliError> {
    match (flag, d.omega()) {
        (Some(0), _) => Err(usage("--omega must be at least 1")),
        (Some(f), Some(o)) if f != o && d.alphabet().is_some_and(AlphabetSpec::is_preset) => Err(usage(format!(
            "--omega {f} conflicts with alphabet {} (omega {o})",
            d.alphabet().unwrap().name()
        ))),
        (Some(f), _) => Ok(f),
        (None, Some(o)) => Ok(o),
        (None, None) => Err(usage("distribution has no omega metadata; pass --omega")),
    }
}

fn cmd_ingest(cli: &Cli, a: &args::IngestArgs, io: &mut Io) -> Result<(), CliError> {
    let fold = if a.turkic_fold {
        CaseFold::Turkic
    } else {
        CaseFold::Unicode
    };
    let alphabet = match (&a.letters, &a.alphabet) {
        (Some(letters), name) => AlphabetSpec::from_letters(name.as_deref().unwrap_or("custom"), letters, fold)
            .map_err(|e| usage(e.to_string()))?,
        (None, Some(name)) => AlphabetSpec::preset(name).ok_or_else(|| {
            usage(format!(
                "unknown alphabet {name:?} (known: {})",
                AlphabetSpec::preset_names().join(", ")
            ))
        })?,
        (None, None) => match a.omega {
            Some(omega) => AlphabetSpec::from_omega("custom", omega).map_err(|e| usage(e.to_string()))?,
            None => AlphabetSpec::english(),
        },
    };
    if let Some(omega) = a.omega.filter(|&o| o != alphabet.omega()) {
        return Err(usage(format!(
            "--omega {omega} conflicts with alphabet {} ({} letters)",
            alphabet.name(),
            alphabet.omega()
        )));
    }
    let policy = TokenPolicy {
        fold_case: !a.no_fold,
        non_letter: match a.policy {
            args::PolicyChoice::Split => NonLetterPolicy::Split,
            args::PolicyChoice::Drop => NonLetterPolicy::DropWord,
        },
    };

    let mut words = Vec::new();
    for path in &a.files {
        let text = read_input(path)?;
        words.extend(tokenize(&text, &alphabet, policy));
    }
    let label = a
        .label
        .clone()
        .unwrap_or_else(|| a.files.first().map(|p| stem(p)).unwrap_or_default());
    let d = distill(&words).with_label(label).with_alphabet(alphabet);
    if d.is_empty() {
        io.warn("no words matched the alphabet; distribution has zero states");
    }
    let body = corpus::render_distribution(&d);
    let mean = if d.total_distinct() > 0 {
        d.total_letters() as f64 / d.total_distinct() as f64
    } else {
        0.0
    };
    let summary = format!(
        "N={} L={} mean_length={:.4}",
        d.total_distinct(),
        d.total_letters(),
        mean
    );
    match &cli.output {
        Some(path) => {
            write_output(path, &body)?;
            io.say(&summary);
        }
        None => {
            let _ = io.out.write_all(body.as_bytes());
            if !io.quiet {
                let _ = writeln!(io.err, "{summary}");
            }
        }
    }
    Ok(())
}

fn fit_config(f: &FitArgs) -> Result<FitConfig, CliError> {
    let cfg = FitConfig {
        max_iterations: f.max_iterations,
        initial_damping: f.initial_damping,
        damping_up: f.damping_up,
        damping_down: f.damping_down,
        tol_chisq_rel: f.tol_chisq,
        tol_param_rel: f.tol_param,
        jacobian_mode: f.jacobian.into(),
        damping_mode: f.damping.into(),
        weighting: f.weighting.into(),
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn summary_line(label: &str, r: &FitReport) -> String {
    let names = match r.params {
        FittedParams::Ma(_) => ["A", "b", "c"],
        FittedParams::Smma(_) => ["phi", "alpha", "theta"],
    };
    let mut s = format!("{:<5} {label}", r.model_kind.as_str());
    for ((name, v), se) in names.iter().zip(r.params.free()).zip(&r.std_errors) {
        s.push_str(&format!("  {name}={v:.4} ± {se:.4}"));
    }
    if let FittedParams::Smma(p) = r.params {
        s.push_str(&format!("  omega={}", p.omega));
    }
    s.push_str(&format!(
        "  R={:.4}  R²={:.4}  iterations={}  {}",
        r.r,
        r.r_squared,
        r.iterations,
        if r.converged { "converged" } else { "not converged" }
    ));
    s
}

fn fit_tsv(r: &FitReport) -> String {
    let mut out = format!("# model_kind={}\n", r.model_kind.as_str());
    out.push_str("l\tpredicted\n");
    for (l, y) in &r.predicted {
        out.push_str(&format!("{l}\t{y}\n"));
    }
    out
}

fn cmd_fit(cli: &Cli, a: &args::FitCmdArgs, io: &mut Io) -> Result<(), CliError> {
    let d = load_dist(&a.distribution)?;
    let cfg = fit_config(&a.fit)?;
    let want_ma = matches!(a.model, ModelChoice::Ma | ModelChoice::Both);
    let want_smma = matches!(a.model, ModelChoice::Smma | ModelChoice::Both);
    let omega = if want_smma {
        Some(resolve_omega(&d, a.fit.omega)?)
    } else {
        None
    };

    let (dist, cfg) = (&d, &cfg);
    let (ma, smma) = std::thread::scope(|s| {
        let ma = want_ma.then(|| s.spawn(move || fitting::fit_ma(dist, cfg, None)));
        let smma = omega.map(|o| s.spawn(move || fitting::fit_smma_with_omega(dist, o, cfg, None)));
        (
            ma.map(|h| h.join().expect("fit thread")),
            smma.map(|h| h.join().expect("fit thread")),
        )
    });

    let label = label_of(&d).to_string();
    let mut reports = Vec::new();
    for (suffix, r) in [("ma", ma), ("smma", smma)] {
        if let Some(r) = r {
            let r = r?;
            io.say(&summary_line(&label, &r));
            if !r.converged {
                io.warn(&format!("{} fit did not converge", r.model_kind.as_str()));
            }
            if !r.normalizable {
                io.warn(&format!(
                    "{} fit is not normalizable over unbounded lengths",
                    r.model_kind.as_str()
                ));
            }
            reports.push((suffix, r));
        }
    }

    if let Some(dir) = &cli.output {
        std::fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
        for (suffix, r) in &reports {
            let (ext, body) = match cli.format {
                OutputFormat::Json => ("json", r.to_json() + "\n"),
                OutputFormat::Tsv => ("tsv", fit_tsv(r)),
            };
            write_output(&dir.join(format!("{label}.{suffix}.{ext}")), &body)?;
        }
    }
    Ok(())
}

fn read_fit_report(path: &Path) -> Result<FitReport, CliError> {
    let text = read_input(path)?;
    FitReport::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn smma_params_for(d: &LengthDistribution, a: &args::ThermoArgs) -> Result<SmmaParams, CliError> {
    if let Some(p) = &a.params {
        if p.len() != 3 {
            return Err(usage(format!(
                "--params takes phi,alpha,theta (got {} values)",
                p.len()
            )));
        }
        let omega = resolve_omega(d, a.fit.omega)?;
        return Ok(SmmaParams::new(p[0], p[1], p[2], omega));
    }
    if let Some(path) = &a.smma_report {
        let r = read_fit_report(path)?;
        return r
            .params
            .as_smma()
            .copied()
            .ok_or_else(|| usage(format!("{} is not an SMMA report", path.display())));
    }
    let omega = resolve_omega(d, a.fit.omega)?;
    let r = fitting::fit_smma_with_omega(d, omega, &fit_config(&a.fit)?, None)?;
    Ok(*r.params.as_smma().expect("SMMA fit"))
}

fn thermo_tsv(r: &ThermoReport) -> String {
    let basis = match r.entropy_basis {
        thermo::EntropyBasis::ObservedCounts => "observed_counts",
        thermo::EntropyBasis::PredictedCounts => "predicted_counts",
    };
    format!(
        "key\tvalue\ntemperature\t{}\nchemical_potential\t{}\nlog_partition\t{}\npartition\t{}\nentropy\t{}\nfree_energy\t{}\nmean_length\t{}\nl_max_used\t{}\nentropy_basis\t{basis}\n",
        r.temperature, r.chemical_potential, r.log_partition, r.partition, r.entropy, r.free_energy, r.mean_length, r.l_max_used
    )
}

fn cmd_thermo(cli: &Cli, a: &args::ThermoArgs, io: &mut Io) -> Result<(), CliError> {
    let d = load_dist(&a.distribution)?;
    let p = smma_params_for(&d, a)?;
    let l_max = match a.lmax.as_str() {
        "observed" => LMaxChoice::Observed,
        "auto" => LMaxChoice::Auto,
        n => LMaxChoice::Fixed(n.parse().ok().filter(|&v: &u32| v >= 1).ok_or_else(|| {
            usage(format!(
                "--lmax must be observed, auto or a positive integer (got {n:?})"
            ))
        })?),
    };
    let opts = ThermoOptions {
        l_max,
        entropy_basis: a.entropy_basis.into(),
    };
    let (r, warnings) = ThermoReport::compute(&d, &p, opts).map_err(|e| match e {
        thermo::ThermoError::NonPositiveTheta(_)
        | thermo::ThermoError::EmptyDistribution
        | thermo::ThermoError::InvalidLMax => usage(e.to_string()),
        _ => runtime(e.to_string()),
    })?;
    for w in &warnings {
        io.warn(w);
    }
    io.say(&format!(
        "{}  T={:.4}  mu={:.4}  S={:.4}  F={:.4}  mean_length={:.4}  l_max={}",
        label_of(&d),
        r.temperature,
        r.chemical_potential,
        r.entropy,
        r.free_energy,
        r.mean_length,
        r.l_max_used
    ));
    if let Some(path) = &cli.output {
        let body = match cli.format {
            OutputFormat::Json => r.to_json() + "\n",
            OutputFormat::Tsv => thermo_tsv(&r),
        };
        write_output(path, &body)?;
    }
    Ok(())
}

fn comparison_tsv(t: &thermo::ComparisonTable) -> String {
    let mut out = String::from("label\ttemperature\tchemical_potential\tentropy\tfree_energy\tmean_length\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.label, r.temperature, r.chemical_potential, r.entropy, r.free_energy, r.mean_length
        ));
    }
    out.push_str("\nfirst\tsecond\ttemperature_difference\tchemical_potential_difference\tentropy_relative_difference\tfree_energy_relative_difference\tmean_length_difference\n");
    for d in &t.differences {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            d.first,
            d.second,
            d.temperature_difference,
            d.chemical_potential_difference,
            d.entropy_relative_difference,
            d.free_energy_relative_difference,
            d.mean_length_difference
        ));
    }
    out
}

fn cmd_compare(cli: &Cli, a: &args::CompareArgs, io: &mut Io) -> Result<(), CliError> {
    let mut reports = Vec::new();
    for path in &a.reports {
        let text = read_input(path)?;
        let r = ThermoReport::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        reports.push((stem(path), r));
    }
    let table = thermo::compare(&reports).map_err(|e| usage(e.to_string()))?;
    io.say(&format!(
        "{:<12} {:>10} {:>10} {:>16} {:>10} {:>12}",
        "label", "T", "mu", "S", "F", "mean_length"
    ));
    for r in &table.rows {
        io.say(&format!(
            "{:<12} {:>10.4} {:>10.4} {:>16.4} {:>10.4} {:>12.4}",
            r.label, r.temperature, r.chemical_potential, r.entropy, r.free_energy, r.mean_length
        ));
    }
    for d in &table.differences {
        io.say(&format!(
            "{} vs {}: free energy difference {:.1}%  entropy difference {:.1}%  dT={:.4}  dmu={:.4}  dmean_length={:.4}",
            d.first,
            d.second,
            100.0 * d.free_energy_relative_difference,
            100.0 * d.entropy_relative_difference,
            d.temperature_difference,
            d.chemical_potential_difference,
            d.mean_length_difference
        ));
    }
    if let Some(path) = &cli.output {
        let body = match cli.format {
            OutputFormat::Json => table.to_json() + "\n",
            OutputFormat::Tsv => comparison_tsv(&table),
        };
        write_output(path, &body)?;
    }
    Ok(())
}

fn cmd_plot_data(cli: &Cli, a: &args::PlotArgs, io: &mut Io) -> Result<(), CliError> {
    let d = load_dist(&a.distribution)?;
    let cfg = fit_config(&a.fit)?;
    let ma = match &a.ma_report {
        Some(p) => read_fit_report(p)?,
        None => fitting::fit_ma(&d, &cfg, None)?,
    };
    let smma = match &a.smma_report {
        Some(p) => read_fit_report(p)?,
        None => fitting::fit_smma_with_omega(&d, resolve_omega(&d, a.fit.omega)?, &cfg, None)?,
    };
    let timestamp = a.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|t| t.as_secs())
            .unwrap_or(0)
    });
    let step = a.grid_step.unwrap_or(DEFAULT_GRID_STEP);
    let data = report::build_plot_data(&d, &ma, &smma, step).map_err(|e| usage(e.to_string()))?;
    let body = report::render_plot_data(&data, timestamp);
    match &cli.output {
        Some(path) => {
            write_output(path, &body)?;
            io.say(&format!("wrote {} rows to {}", data.rows.len(), path.display()));
        }
        None => {
            let _ = io.out.write_all(body.as_bytes());
        }
    }
    if a.table {
        let table = report::render_table1(&d, &ma, &smma).map_err(|e| usage(e.to_string()))?;
        let _ = io.err.write_all(table.as_bytes());
    }
    Ok(())
}
