//! Single runs and CSV emission.
//!
//! Floats are written with 17 significant digits in scientific form
//! (`{:.16e}`); undefined outcomes leave their metric cells empty.

use std::path::Path;

use photodet_core::instrument::visit_instrument;
use photodet_core::instrument::TimeGrid;
use photodet_core::metrics::{outcome_metrics, von_neumann_entropy, OutcomeMetrics};
use photodet_core::oracle::{max_oracle_dt, secular_residual, SecularResidual};
use photodet_core::MetricsRecord;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::plot::{plot_csv, DEFAULT_COLUMNS};

pub const CSV_HEADER: [&str; 11] = [
    "t",
    "P_g",
    "P_e",
    "I_g",
    "I_e",
    "F_g",
    "F_e",
    "S_g",
    "S_e",
    "defined_g",
    "defined_e",
];

/// Integrates the instrument and evaluates both outcomes at every recorded
/// time.
pub fn run_metrics(cfg: &RunConfig) -> Result<Vec<MetricsRecord>> {
    let rho = cfg.initial_state.density(cfg.d)?;
    let before = von_neumann_entropy(&rho, cfg.log_base)?;
    let mut out = Vec::with_capacity(cfg.grid().steps() / cfg.stride + 2);
    visit_instrument(
        &cfg.model,
        cfg.d,
        cfg.prep,
        cfg.grid(),
        cfg.truncation,
        |s| {
            out.push(MetricsRecord {
                t: s.time(),
                g: outcome_metrics(&s.m_g(), &rho, before, cfg.log_base)?,
                e: outcome_metrics(&s.m_e(), &rho, before, cfg.log_base)?,
            });
            Ok(())
        },
    )?;
    Ok(out)
}

fn num(v: f64) -> String {
    // no "-0" in the output
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Serializes metric records with [`CSV_HEADER`].
pub fn metrics_csv(records: &[MetricsRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(CSV_HEADER).map_err(fmt)?;
    let cells = |o: &OutcomeMetrics, f: fn(&photodet_core::metrics::StateMetrics) -> f64| {
        o.state.as_ref().map(|s| num(f(s))).unwrap_or_default()
    };
    for r in records {
        w.write_record([
            num(r.t),
            num(r.g.p),
            num(r.e.p),
            cells(&r.g, |s| s.info_gain),
            cells(&r.e, |s| s.info_gain),
            cells(&r.g, |s| s.fidelity),
            cells(&r.e, |s| s.fidelity),
            cells(&r.g, |s| s.entropy),
            cells(&r.e, |s| s.entropy),
            r.g.defined().to_string(),
            r.e.defined().to_string(),
        ])
        .map_err(fmt)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Runs `cfg` and writes its CSV (and SVG when requested). Returns the CSV
/// text.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let csv = metrics_csv(&run_metrics(cfg)?)?;
    write_file(&cfg.csv_out, &csv)?;
    if let Some(svg_path) = &cfg.svg_out {
        write_file(svg_path, &plot_csv(&csv, &DEFAULT_COLUMNS)?)?;
    }
    Ok(csv)
}

/// Distance between the reduced instrument and the full joint model over
/// the run's time span, on a grid fine enough for the joint model.
pub fn oracle_report(cfg: &RunConfig) -> Result<(TimeGrid, SecularResidual)> {
    let dt = cfg.dt.min(max_oracle_dt(&cfg.model));
    let stride = ((cfg.dt * cfg.stride as f64 / dt).round() as usize).max(1);
    let grid = TimeGrid::new(cfg.t_max, dt, stride)?;
    let r = secular_residual(&cfg.model, cfg.d, cfg.prep, grid, cfg.truncation)?;
    Ok((grid, r))
}
