//! Run configuration: a flat TOML document.
//!
//! ```toml
//! preset = "strong"        # optional; fills omega..gamma_eg
//! d = 4
//! initial_state = "fock"   # or "mixed"
//! n = 3
//! prep = "ground"          # or "excited"
//! t_max = 20.0
//! csv_out = "out/strong_fock3.csv"
//! ```

use std::path::{Path, PathBuf};

use photodet_core::instrument::{Preparation, TimeGrid};
use photodet_core::{LogBase, ModelParams, Operator, Regime, TruncationMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_STRIDE: usize = 10;
/// Below this `Γ/Ω` the reduced model is unreliable.
pub const SECULAR_WARN_RATIO: f64 = 5.0;

/// Document as written, every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub gamma_big: Option<f64>,
    pub gamma_ge: Option<f64>,
    pub gamma_eg: Option<f64>,
    pub d: Option<usize>,
    pub initial_state: Option<String>,
    pub n: Option<usize>,
    pub prep: Option<String>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub stride: Option<usize>,
    pub truncation: Option<String>,
    pub log_base: Option<LogBaseKey>,
    pub csv_out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
}

/// `log_base = 2` or `log_base = "e"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogBaseKey {
    Int(i64),
    Name(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Mixed,
    Fock(usize),
}

impl InitialState {
    pub fn density(self, d: usize) -> photodet_core::Result<Operator> {
        match self {
            InitialState::Mixed => photodet_core::fock::maximally_mixed(d),
            InitialState::Fock(n) => photodet_core::fock::fock_state(d, n),
        }
    }

    pub fn label(self) -> String {
        match self {
            InitialState::Mixed => "mixed".into(),
            InitialState::Fock(n) => format!("fock{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Regime>,
    pub model: ModelParams,
    pub d: usize,
    pub initial_state: InitialState,
    pub prep: Preparation,
    pub t_max: f64,
    pub dt: f64,
    pub stride: usize,
    pub truncation: TruncationMode,
    pub log_base: LogBase,
    pub csv_out: PathBuf,
    pub svg_out: Option<PathBuf>,
}

impl RawConfig {
    /// `other`'s keys win.
    pub fn overlay(&self, other: &RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: other.$f.clone().or_else(|| self.$f.clone())),* } };
        }
        pick!(
            preset,
            omega,
            delta,
            gamma_big,
            gamma_ge,
            gamma_eg,
            d,
            initial_state,
            n,
            prep,
            t_max,
            dt,
            stride,
            truncation,
            log_base,
            csv_out,
            svg_out
        )
    }

    pub fn validate(&self) -> Result<RunConfig> {
        self.build(true)
    }

    /// Like [`RawConfig::validate`] but `csv_out` may be absent (sweeps
    /// name their own outputs).
    pub(crate) fn build(&self, need_csv: bool) -> Result<RunConfig> {
        let preset = self
            .preset
            .as_deref()
            .map(|name| {
                Regime::from_name(name).ok_or_else(|| {
                    CliError::config(format!("preset: unknown preset `{name}` (strong | weak)"))
                })
            })
            .transpose()?;
        let base = preset.map(Regime::params);
        let model_key = |key: &str, v: Option<f64>, from: fn(&ModelParams) -> f64| {
            v.or_else(|| base.as_ref().map(from))
                .ok_or_else(|| CliError::config(format!("{key}: required when no preset is given")))
        };
        let model = ModelParams {
            omega: model_key("omega", self.omega, |p| p.omega)?,
            delta: model_key("delta", self.delta, |p| p.delta)?,
            gamma_big: model_key("gamma_big", self.gamma_big, |p| p.gamma_big)?,
            gamma_ge: model_key("gamma_ge", self.gamma_ge, |p| p.gamma_ge)?,
            gamma_eg: model_key("gamma_eg", self.gamma_eg, |p| p.gamma_eg)?,
        };
        model
            .validate()
            .map_err(|e| CliError::config(e.to_string()))?;

        let d = self.d.ok_or_else(|| CliError::config("d: required"))?;
        if d == 0 {
            return Err(CliError::config("d: must be at least 1"));
        }
        let initial_state = match self.initial_state.as_deref() {
            None => return Err(CliError::config("initial_state: required (mixed | fock)")),
            Some("mixed") => {
                if self.n.is_some() {
                    return Err(CliError::config(
                        "n: only meaningful with initial_state = \"fock\"",
                    ));
                }
                InitialState::Mixed
            }
            Some("fock") => {
                let n = self
                    .n
                    .ok_or_else(|| CliError::config("n: required with initial_state = \"fock\""))?;
                if n >= d {
                    return Err(CliError::config(format!(
                        "n: must satisfy n < d (n = {n}, d = {d})"
                    )));
                }
                InitialState::Fock(n)
            }
            Some(other) => {
                return Err(CliError::config(format!(
                    "initial_state: unknown value `{other}` (mixed | fock)"
                )))
            }
        };
        let prep = match self.prep.as_deref() {
            None => return Err(CliError::config("prep: required (ground | excited)")),
            Some("ground" | "g") => Preparation::Ground,
            Some("excited" | "e") => Preparation::Excited,
            Some(other) => {
                return Err(CliError::config(format!(
                    "prep: unknown value `{other}` (ground | excited)"
                )))
            }
        };
        let t_max = self
            .t_max
            .ok_or_else(|| CliError::config("t_max: required"))?;
        let dt = self.dt.unwrap_or(DEFAULT_DT);
        let stride = self.stride.unwrap_or(DEFAULT_STRIDE);
        TimeGrid::new(t_max, dt, stride).map_err(|e| CliError::config(e.to_string()))?;
        let truncation = match self.truncation.as_deref() {
            None | Some("algebraic_closure") => TruncationMode::AlgebraicClosure,
            Some("strict") => TruncationMode::Strict,
            Some(other) => {
                return Err(CliError::config(format!(
                    "truncation: unknown value `{other}` (algebraic_closure | strict)"
                )))
            }
        };
        let log_base = match &self.log_base {
            None | Some(LogBaseKey::Int(2)) => LogBase::Two,
            Some(LogBaseKey::Name(s)) if s == "e" => LogBase::E,
            Some(LogBaseKey::Name(s)) if s == "2" => LogBase::Two,
            Some(other) => {
                return Err(CliError::config(format!(
                    "log_base: {other:?} is not 2 or \"e\""
                )))
            }
        };
        let csv_out = match &self.csv_out {
            Some(p) => p.clone(),
            None if need_csv => return Err(CliError::config("csv_out: required")),
            None => PathBuf::new(),
        };
        Ok(RunConfig {
            preset,
            model,
            d,
            initial_state,
            prep,
            t_max,
            dt,
            stride,
            truncation,
            log_base,
            csv_out,
            svg_out: self.svg_out.clone(),
        })
    }
}

impl RunConfig {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t_max: self.t_max,
            dt: self.dt,
            stride: self.stride,
        }
    }

    /// Non-fatal concerns about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ratio = self.model.secular_ratio();
        if ratio < SECULAR_WARN_RATIO {
            out.push(format!(
                "Gamma/Omega = {ratio:.3} < {SECULAR_WARN_RATIO}: secular approximation questionable"
            ));
        }
        out
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    parse_raw(document)?.validate()
}

pub fn parse_raw(document: &str) -> Result<RawConfig> {
    toml::from_str(document).map_err(|e| CliError::config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}
