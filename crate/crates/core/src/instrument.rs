//! Instrument maps of the reduced (secular) pointer–field model.
//!
//! For a pointer prepared in `prep`, the pair `(𝔐_g(t), 𝔐_e(t))` maps the
//! initial field state onto the unnormalized field state found together
//! with readout `g` or `e`. The pair obeys a linear ODE whose generator is a
//! 2×2 block matrix of superoperators:
//!
//! ```text
//! d/dt 𝔐_g = G_gg 𝔐_g + G_ge 𝔐_e      G_gg = −(αK₀ + β + γ_ge)   G_ge = αK₊ + γ_eg
//! d/dt 𝔐_e = G_eg 𝔐_g + G_ee 𝔐_e      G_eg =   αK₋ + γ_ge        G_ee = −(αK₀ − β + γ_eg)
//! ```
//!
//! with `β = κ(iΔ·N − Γ/2)`. Both preparations share the generator and
//! differ only in the initial condition, `(Id, 0)` or `(0, Id)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::fock::TruncationMode;
use crate::linalg;
use crate::superop::{Su11Generators, SuperOp};
use crate::{Error, ModelParams, Operator, Result, C64};

/// Pointer preparation, which is also the readout label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preparation {
    Ground,
    Excited,
}

impl Preparation {
    pub fn index(self) -> usize {
        match self {
            Preparation::Ground => 0,
            Preparation::Excited => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preparation::Ground => "ground",
            Preparation::Excited => "excited",
        }
    }
}

/// Below this probability a conditional state is not formed.
pub const P_FLOOR: f64 = 1e-12;
/// Negative probabilities down to this value are treated as round-off.
pub const P_NEGATIVE_TOL: f64 = 1e-8;

/// The four superoperator blocks of the reduced generator.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGenerator {
    pub gg: SuperOp,
    pub ge: SuperOp,
    pub eg: SuperOp,
    pub ee: SuperOp,
}

impl BlockGenerator {
    pub fn new(p: &ModelParams, d: usize, mode: TruncationMode) -> Result<Self> {
        p.validate()?;
        let g = Su11Generators::new(d, mode)?;
        let alpha = p.alpha();
        let kappa = p.kappa();
        let id = SuperOp::identity(d);

        let beta = C64::new(0.0, kappa * p.delta) * g.n.clone()
            + (-0.5 * kappa * p.gamma_big) * id.clone();
        let a_k0 = alpha * g.k0.clone();

        let gg = -(a_k0.clone() + beta.clone() + p.gamma_ge * id.clone());
        let ge = alpha * g.kplus + p.gamma_eg * id.clone();
        let eg = alpha * g.kminus + p.gamma_ge * id.clone();
        let ee = -(a_k0 - beta + p.gamma_eg * id);
        Ok(BlockGenerator { gg, ge, eg, ee })
    }

    pub fn dim(&self) -> usize {
        self.gg.dim()
    }

    /// The full `2d²×2d²` matrix `[[G_gg, G_ge], [G_eg, G_ee]]`.
    pub fn stacked(&self) -> DMatrix<C64> {
        let n = self.dim() * self.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(self.gg.matrix());
        m.view_mut((0, n), (n, n)).copy_from(self.ge.matrix());
        m.view_mut((n, 0), (n, n)).copy_from(self.eg.matrix());
        m.view_mut((n, n), (n, n)).copy_from(self.ee.matrix());
        m
    }
}

/// Free-function form of [`BlockGenerator::new`].
pub fn build_block_generator(
    p: &ModelParams,
    d: usize,
    mode: TruncationMode,
) -> Result<BlockGenerator> {
    BlockGenerator::new(p, d, mode)
}

/// Row-compressed copy of a dense matrix; exact zeros are dropped.
#[derive(Debug, Clone)]
struct SparseRows {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseRows {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut row_ptr = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseRows {
            row_ptr,
            cols,
            vals,
        }
    }

    fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `out = self · x` for a column-major `nrows × ncols` block `x`.
    fn mul_into(&self, x: &[C64], out: &mut [C64]) {
        let nr = self.nrows();
        for (src, dst) in x.chunks_exact(nr).zip(out.chunks_exact_mut(nr)) {
            for (i, o) in dst.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[k] * src[self.cols[k]];
                }
                *o = acc;
            }
        }
    }
}

/// Fixed-step classical RK4 integrator for the instrument pair, advanced one
/// step at a time.
///
/// The state is the stacked `2d²×d²` matrix `[𝔐_g; 𝔐_e]`.
#[derive(Debug, Clone)]
pub struct InstrumentStepper {
    d: usize,
    prep: Preparation,
    dt: f64,
    steps: usize,
    generator: SparseRows,
    state: Vec<C64>,
    k: [Vec<C64>; 4],
    scratch: Vec<C64>,
}

impl InstrumentStepper {
    pub fn new(
        p: &ModelParams,
        d: usize,
        prep: Preparation,
        dt: f64,
        mode: TruncationMode,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        let gen = BlockGenerator::new(p, d, mode)?;
        Ok(Self::from_generator(&gen, prep, dt))
    }

    pub fn from_generator(gen: &BlockGenerator, prep: Preparation, dt: f64) -> Self {
        let d = gen.dim();
        let n = d * d;
        let rows = 2 * n;
        let mut state = vec![C64::new(0.0, 0.0); rows * n];
        let offset = prep.index() * n;
        for c in 0..n {
            state[c * rows + offset + c] = C64::new(1.0, 0.0);
        }
        let len = state.len();
        InstrumentStepper {
            d,
            prep,
            dt,
            steps: 0,
            generator: SparseRows::from_dense(&gen.stacked()),
            state,
            k: [
                vec![C64::new(0.0, 0.0); len],
                vec![C64::new(0.0, 0.0); len],
                vec![C64::new(0.0, 0.0); len],
                vec![C64::new(0.0, 0.0); len],
            ],
            scratch: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn preparation(&self) -> Preparation {
        self.prep
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// Advances by one step of size `dt`.
    pub fn step(&mut self) -> Result<()> {
        let h = self.dt;
        let [k1, k2, k3, k4] = &mut self.k;
        let g = &self.generator;

        g.mul_into(&self.state, k1);
        axpy_into(&self.state, 0.5 * h, k1, &mut self.scratch);
        g.mul_into(&self.scratch, k2);
        axpy_into(&self.state, 0.5 * h, k2, &mut self.scratch);
        g.mul_into(&self.scratch, k3);
        axpy_into(&self.state, h, k3, &mut self.scratch);
        g.mul_into(&self.scratch, k4);

        let w = h / 6.0;
        let mut finite = true;
        for i in 0..self.state.len() {
            let inc = k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i];
            let v = self.state[i] + inc * w;
            finite &= v.re.is_finite() && v.im.is_finite();
            self.state[i] = v;
        }
        self.steps += 1;
        if !finite {
            return Err(Error::Divergence { t: self.time() });
        }
        Ok(())
    }

    fn block(&self, outcome: usize) -> SuperOp {
        let n = self.d * self.d;
        let rows = 2 * n;
        let m = DMatrix::from_fn(n, n, |i, j| self.state[j * rows + outcome * n + i]);
        SuperOp::from_matrix(self.d, m).expect("block has d²×d² shape")
    }

    /// Current `𝔐_g`.
    pub fn m_g(&self) -> SuperOp {
        self.block(0)
    }

    /// Current `𝔐_e`.
    pub fn m_e(&self) -> SuperOp {
        self.block(1)
    }

    /// `(Tr[𝔐_g ρ], Tr[𝔐_e ρ])` evaluated directly on the stacked state.
    /// Imaginary parts are discarded.
    pub fn probabilities(&self, rho: &Operator) -> Result<(f64, f64)> {
        let d = self.d;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows().max(rho.ncols()),
            });
        }
        let n = d * d;
        let rows = 2 * n;
        let v = rho.as_slice();
        let mut out = [C64::new(0.0, 0.0); 2];
        for (c, &x) in v.iter().enumerate() {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            let col = &self.state[c * rows..(c + 1) * rows];
            for (r, o) in out.iter_mut().enumerate() {
                for m in 0..d {
                    *o += col[r * n + m + m * d] * x;
                }
            }
        }
        Ok((out[0].re, out[1].re))
    }
}

fn axpy_into(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

/// One recorded time point of an [`InstrumentBranch`].
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSample {
    pub t: f64,
    pub m_g: SuperOp,
    pub m_e: SuperOp,
}

impl BranchSample {
    pub fn outcome(&self, r: Preparation) -> &SuperOp {
        match r {
            Preparation::Ground => &self.m_g,
            Preparation::Excited => &self.m_e,
        }
    }
}

/// Time series of the instrument pair for one pointer preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentBranch {
    pub prep: Preparation,
    pub samples: Vec<BranchSample>,
}

impl InstrumentBranch {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.m_g.dim())
    }
}

/// Time grid for [`integrate_instrument`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
    /// Record every `stride`-th step. The final step is always recorded.
    pub stride: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64, stride: usize) -> Result<Self> {
        let g = TimeGrid { t_max, dt, stride };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_max = {} must be positive",
                self.t_max
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.t_max) {
            return Err(Error::InvalidGrid(format!(
                "dt = {} must satisfy 0 < dt <= t_max",
                self.dt
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidGrid("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps; the last time point is `steps · dt ≥ t_max`.
    pub fn steps(&self) -> usize {
        libm::ceil(self.t_max / self.dt - 1e-9) as usize
    }
}

/// Steps the instrument pair over `grid`, calling `visit` at `t = 0`, every
/// `stride`-th step and the final step.
pub fn visit_instrument<F>(
    p: &ModelParams,
    d: usize,
    prep: Preparation,
    grid: TimeGrid,
    mode: TruncationMode,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&InstrumentStepper) -> Result<()>,
{
    grid.validate()?;
    let mut stepper = InstrumentStepper::new(p, d, prep, grid.dt, mode)?;
    let steps = grid.steps();
    visit(&stepper)?;
    for k in 1..=steps {
        stepper.step()?;
        if k % grid.stride == 0 || k == steps {
            visit(&stepper)?;
        }
    }
    Ok(())
}

/// Integrates the instrument pair from `t = 0` to `grid.t_max`.
pub fn integrate_instrument(
    p: &ModelParams,
    d: usize,
    prep: Preparation,
    grid: TimeGrid,
    mode: TruncationMode,
) -> Result<InstrumentBranch> {
    let mut samples = Vec::new();
    visit_instrument(p, d, prep, grid, mode, |s| {
        samples.push(BranchSample {
            t: s.time(),
            m_g: s.m_g(),
            m_e: s.m_e(),
        });
        Ok(())
    })?;
    Ok(InstrumentBranch { prep, samples })
}

/// Outcome probability and, when it is above [`P_FLOOR`], the normalized
/// conditional state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    pub p: f64,
    pub state: Option<Operator>,
}

/// `p_r = Tr[𝔐_r ρ]` and `ρ_r = 𝔐_r ρ / p_r`, re-Hermitized.
pub fn conditional_state(m_r: &SuperOp, rho: &Operator) -> Result<ConditionalState> {
    let x = m_r.apply(rho)?;
    let mut p = x.trace().re;
    if p < -P_NEGATIVE_TOL {
        return Err(Error::PositivityViolation { p });
    }
    if p < 0.0 {
        p = 0.0;
    }
    let state = (p > P_FLOOR).then(|| linalg::hermitian_part(&x) / C64::new(p, 0.0));
    Ok(ConditionalState { p, state })
}

/// Non-selective post-measurement state `(𝔐_g + 𝔐_e) ρ`.
pub fn unconditional_state(m_g: &SuperOp, m_e: &SuperOp, rho: &Operator) -> Result<Operator> {
    Ok(m_g.apply(rho)? + m_e.apply(rho)?)
}
