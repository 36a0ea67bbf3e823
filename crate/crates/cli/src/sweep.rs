//! Batches of runs that differ in a few keys.
//!
//! ```toml
//! out_dir = "fig1"
//!
//! [base]
//! preset = "strong"
//! prep = "ground"
//! t_max = 20.0
//!
//! [[variations]]
//! d = 2
//! initial_state = "mixed"
//!
//! [[variations]]
//! d = 6
//! initial_state = "fock"
//! n = 3
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use photodet_core::instrument::Preparation;
use photodet_core::{LogBase, Regime, TruncationMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{InitialState, RawConfig, RunConfig};
use crate::error::{CliError, Result};
use crate::plot::{plot_csv, DEFAULT_COLUMNS};
use crate::run::{metrics_csv, run_metrics, write_file};

/// Keys a variation may change.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variation {
    pub name: Option<String>,
    pub preset: Option<String>,
    pub d: Option<usize>,
    pub initial_state: Option<String>,
    pub n: Option<usize>,
    pub prep: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub out_dir: PathBuf,
    #[serde(default)]
    pub base: RawConfig,
    #[serde(default)]
    pub variations: Vec<Variation>,
}

/// Named, validated runs with their output paths filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub out_dir: PathBuf,
    pub runs: Vec<(String, RunConfig)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub csv: String,
    pub svg: String,
    pub rows: usize,
    pub preset: Option<String>,
    pub omega: f64,
    pub delta: f64,
    pub gamma_big: f64,
    pub gamma_ge: f64,
    pub gamma_eg: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub d: usize,
    pub initial_state: String,
    pub n: Option<usize>,
    pub prep: String,
    pub t_max: f64,
    pub dt: f64,
    pub stride: usize,
    pub truncation: String,
    pub log_base: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub runs: Vec<ManifestEntry>,
}

fn default_name(cfg: &RunConfig) -> String {
    let preset = cfg.preset.map_or("custom", Regime::name);
    let state = match cfg.initial_state {
        InitialState::Mixed => format!("mixed_d{}", cfg.d),
        InitialState::Fock(n) => format!("fock_n{n}_d{}", cfg.d),
    };
    let prep = match cfg.prep {
        Preparation::Ground => "",
        Preparation::Excited => "_excited",
    };
    format!("{preset}_{state}{prep}")
}

impl SweepDoc {
    pub fn plan(&self) -> Result<SweepPlan> {
        if self.variations.is_empty() {
            return Err(CliError::config(
                "variations: at least one variation is required",
            ));
        }
        let mut names = BTreeSet::new();
        let mut runs = Vec::with_capacity(self.variations.len());
        for (i, v) in self.variations.iter().enumerate() {
            let over = RawConfig {
                preset: v.preset.clone(),
                d: v.d,
                initial_state: v.initial_state.clone(),
                n: v.n,
                prep: v.prep.clone(),
                ..RawConfig::default()
            };
            let mut cfg = self
                .base
                .overlay(&over)
                .build(false)
                .map_err(|e| CliError::config(format!("variations[{i}]: {e}")))?;
            let name = v.name.clone().unwrap_or_else(|| default_name(&cfg));
            if !names.insert(name.clone()) {
                return Err(CliError::config(format!(
                    "variations[{i}]: duplicate run name `{name}`"
                )));
            }
            cfg.csv_out = self.out_dir.join(format!("{name}.csv"));
            cfg.svg_out = Some(self.out_dir.join(format!("{name}.svg")));
            runs.push((name, cfg));
        }
        Ok(SweepPlan {
            out_dir: self.out_dir.clone(),
            runs,
        })
    }
}

pub fn parse_sweep(document: &str) -> Result<SweepPlan> {
    let doc: SweepDoc = toml::from_str(document).map_err(|e| CliError::config(e.to_string()))?;
    doc.plan()
}

pub fn load_sweep(path: &Path) -> Result<SweepPlan> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_sweep(&text)
}

/// The two-regime figure grid: mixed states at `d = 2, 4, 6` and Fock
/// states `n = 1, 3, 5` at `d = 6`, ground-state pointer.
pub fn figure_grid(out_dir: &Path, t_max: f64) -> Result<SweepPlan> {
    let mut variations = Vec::new();
    for preset in [Regime::Strong, Regime::Weak] {
        for d in [2, 4, 6] {
            variations.push(Variation {
                preset: Some(preset.name().into()),
                d: Some(d),
                initial_state: Some("mixed".into()),
                ..Variation::default()
            });
        }
        for n in [1, 3, 5] {
            variations.push(Variation {
                preset: Some(preset.name().into()),
                d: Some(6),
                initial_state: Some("fock".into()),
                n: Some(n),
                ..Variation::default()
            });
        }
    }
    SweepDoc {
        out_dir: out_dir.to_path_buf(),
        base: RawConfig {
            prep: Some("ground".into()),
            t_max: Some(t_max),
            ..RawConfig::default()
        },
        variations,
    }
    .plan()
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn entry(name: &str, cfg: &RunConfig, rows: usize) -> ManifestEntry {
    let m = &cfg.model;
    ManifestEntry {
        name: name.into(),
        csv: file_name(&cfg.csv_out),
        svg: cfg.svg_out.as_deref().map(file_name).unwrap_or_default(),
        rows,
        preset: cfg.preset.map(|r| r.name().into()),
        omega: m.omega,
        delta: m.delta,
        gamma_big: m.gamma_big,
        gamma_ge: m.gamma_ge,
        gamma_eg: m.gamma_eg,
        kappa: m.kappa(),
        alpha: m.alpha(),
        d: cfg.d,
        initial_state: match cfg.initial_state {
            InitialState::Mixed => "mixed".into(),
            InitialState::Fock(_) => "fock".into(),
        },
        n: match cfg.initial_state {
            InitialState::Mixed => None,
            InitialState::Fock(n) => Some(n),
        },
        prep: cfg.prep.name().into(),
        t_max: cfg.t_max,
        dt: cfg.dt,
        stride: cfg.stride,
        truncation: match cfg.truncation {
            TruncationMode::AlgebraicClosure => "algebraic_closure".into(),
            TruncationMode::Strict => "strict".into(),
        },
        log_base: match cfg.log_base {
            LogBase::Two => "2".into(),
            LogBase::E => "e".into(),
        },
    }
}

fn run_one(name: &str, cfg: &RunConfig) -> Result<ManifestEntry> {
    let records = run_metrics(cfg)?;
    let csv = metrics_csv(&records)?;
    write_file(&cfg.csv_out, &csv)?;
    if let Some(svg) = &cfg.svg_out {
        write_file(svg, &plot_csv(&csv, &DEFAULT_COLUMNS)?)?;
    }
    Ok(entry(name, cfg, records.len()))
}

/// Executes every run in parallel and writes `manifest.json` next to the
/// outputs. Fails, after all runs have finished, if any run failed.
pub fn run_sweep(plan: &SweepPlan) -> Result<Manifest> {
    let results: Vec<Result<ManifestEntry>> = plan
        .runs
        .par_iter()
        .map(|(name, cfg)| run_one(name, cfg))
        .collect();
    let mut runs = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for ((name, _), r) in plan.runs.iter().zip(results) {
        match r {
            Ok(e) => runs.push(e),
            Err(e) => errors.push((name.clone(), e)),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Sweep(errors));
    }
    let manifest = Manifest { runs };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Format(e.to_string()))?
        + "\n";
    write_file(&plan.out_dir.join("manifest.json"), &json)?;
    Ok(manifest)
}
