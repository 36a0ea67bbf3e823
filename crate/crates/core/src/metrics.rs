//! Information characteristics of a measurement outcome: probability,
//! information gain and fidelity of the conditional field state.

use alloc::format;
use alloc::vec::Vec;

use crate::instrument::{conditional_state, InstrumentBranch};
use crate::linalg;
use crate::superop::SuperOp;
use crate::{Error, Operator, Result};

/// Eigenvalues below this are an error; between it and zero they are
/// clamped.
pub const EIGEN_NEGATIVE_TOL: f64 = 1e-8;
/// Fidelity may exceed one by at most this much before it is an error.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => libm::log2(x),
            LogBase::E => libm::log(x),
        }
    }
}

fn clamped_spectrum(rho: &Operator) -> Result<Vec<f64>> {
    let ev = linalg::hermitian_eigenvalues(rho);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -EIGEN_NEGATIVE_TOL {
        return Err(Error::InvalidState(format!(
            "eigenvalue {min:e} is negative"
        )));
    }
    Ok(ev.iter().map(|&l| l.clamp(0.0, 1.0)).collect())
}

/// `S(ρ) = −Tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &Operator, base: LogBase) -> Result<f64> {
    let s = clamped_spectrum(rho)?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * base.log(l))
        .sum::<f64>();
    // −0.0 for pure states
    Ok(s.max(0.0))
}

/// `I = S(before) − S(after)`; positive when the measurement purified the
/// state.
pub fn info_gain(before: &Operator, after: &Operator, base: LogBase) -> Result<f64> {
    Ok(von_neumann_entropy(before, base)? - von_neumann_entropy(after, base)?)
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`.
pub fn uhlmann_fidelity(rho: &Operator, sigma: &Operator) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            found: sigma.nrows(),
        });
    }
    clamped_spectrum(rho)?;
    clamped_spectrum(sigma)?;
    let root = linalg::sqrt_psd(rho);
    let inner = &root * sigma * &root;
    let f: f64 = linalg::hermitian_eigenvalues(&inner)
        .iter()
        .map(|&l| linalg::cut_sqrt(l))
        .sum();
    if f > 1.0 + FIDELITY_TOL {
        return Err(Error::InvalidState(format!("fidelity {f} exceeds one")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Metrics of a conditional state that exists (`p > P_FLOOR`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics {
    pub info_gain: f64,
    pub fidelity: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeMetrics {
    pub p: f64,
    /// `None` when the outcome probability is below the floor.
    pub state: Option<StateMetrics>,
}

impl OutcomeMetrics {
    pub fn defined(&self) -> bool {
        self.state.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub t: f64,
    pub g: OutcomeMetrics,
    pub e: OutcomeMetrics,
}

/// Evaluates one outcome against a prepared field state whose entropy is
/// already known.
pub fn outcome_metrics(
    m_r: &SuperOp,
    rho: &Operator,
    entropy_before: f64,
    base: LogBase,
) -> Result<OutcomeMetrics> {
    let c = conditional_state(m_r, rho)?;
    let state = match c.state {
        None => None,
        Some(post) => {
            let entropy = von_neumann_entropy(&post, base)?;
            Some(StateMetrics {
                info_gain: entropy_before - entropy,
                fidelity: uhlmann_fidelity(rho, &post)?,
                entropy,
            })
        }
    };
    Ok(OutcomeMetrics { p: c.p, state })
}

/// Probability, information gain, fidelity and entropy of both outcomes at
/// every recorded time of `branch`.
pub fn metrics_series(
    branch: &InstrumentBranch,
    rho: &Operator,
    base: LogBase,
) -> Result<Vec<MetricsRecord>> {
    let entropy_before = von_neumann_entropy(rho, base)?;
    branch
        .samples
        .iter()
        .map(|s| {
            Ok(MetricsRecord {
                t: s.t,
                g: outcome_metrics(&s.m_g, rho, entropy_before, base)?,
                e: outcome_metrics(&s.m_e, rho, entropy_before, base)?,
            })
        })
        .collect()
}
