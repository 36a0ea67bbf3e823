//! Physical rates of the atom–cavity model.

use alloc::format;

use crate::{Error, Result};

/// Rates of the Jaynes–Cummings model with a relaxing atom.
///
/// `gamma_eg` drives `e → g` and `gamma_ge` drives `g → e`. `gamma_big`
/// is the atomic coherence decay rate and must be at least the mean of the
/// two population rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Coupling strength `|Ω|`.
    pub omega: f64,
    /// Detuning `Δ`.
    pub delta: f64,
    /// Coherence decay rate `Γ`.
    pub gamma_big: f64,
    pub gamma_ge: f64,
    pub gamma_eg: f64,
}

/// The two published parameter regimes, in units of `γ_eg = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Strong,
    Weak,
}

impl Regime {
    pub fn params(self) -> ModelParams {
        match self {
            Regime::Strong => ModelParams {
                omega: 0.7,
                delta: 0.5,
                gamma_big: 2.0,
                gamma_ge: 0.1,
                gamma_eg: 1.0,
            },
            Regime::Weak => ModelParams {
                omega: 0.7,
                delta: 0.5,
                gamma_big: 2.0,
                gamma_ge: 0.0,
                gamma_eg: 0.01,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Strong => "strong",
            Regime::Weak => "weak",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "strong" => Some(Regime::Strong),
            "weak" => Some(Regime::Weak),
            _ => None,
        }
    }
}

impl ModelParams {
    pub fn new(
        omega: f64,
        delta: f64,
        gamma_big: f64,
        gamma_ge: f64,
        gamma_eg: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            omega,
            delta,
            gamma_big,
            gamma_ge,
            gamma_eg,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("delta", self.delta),
            ("gamma_big", self.gamma_big),
            ("gamma_ge", self.gamma_ge),
            ("gamma_eg", self.gamma_eg),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in [
            ("omega", self.omega),
            ("gamma_big", self.gamma_big),
            ("gamma_ge", self.gamma_ge),
            ("gamma_eg", self.gamma_eg),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} is negative")));
            }
        }
        let floor = 0.5 * (self.gamma_eg + self.gamma_ge);
        if self.gamma_big < floor {
            return Err(Error::InvalidParams(format!(
                "gamma_big = {} is below (gamma_eg + gamma_ge)/2 = {floor}",
                self.gamma_big
            )));
        }
        if self.gamma_big == 0.0 && self.delta == 0.0 {
            return Err(Error::InvalidParams(
                "gamma_big and delta are both zero; kappa is undefined".into(),
            ));
        }
        Ok(())
    }

    /// `κ = |Ω|² / (Γ² + Δ²)`.
    pub fn kappa(&self) -> f64 {
        self.omega * self.omega / (self.gamma_big * self.gamma_big + self.delta * self.delta)
    }

    /// `α = κΓ`, the effective photon-exchange rate.
    pub fn alpha(&self) -> f64 {
        self.kappa() * self.gamma_big
    }

    /// `Γ/Ω`; infinite when the coupling vanishes.
    pub fn secular_ratio(&self) -> f64 {
        if self.omega == 0.0 {
            f64::INFINITY
        } else {
            self.gamma_big / self.omega
        }
    }
}
