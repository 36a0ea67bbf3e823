//! Full atom ⊗ field Lindblad model, integrated without the secular
//! reduction. Used as an independent reference for the instrument maps.
//!
//! Joint basis is `{|g⟩, |e⟩} ⊗ {|0⟩ .. |d−1⟩}` with the atom as the outer
//! index, so joint index `= atom · d + n` with `g = 0`, `e = 1`.
//!
//! ```text
//! dρ/dt = −i[H(t), ρ] + γ_eg D[σ₋]ρ + γ_ge D[σ₊]ρ
//! H(t)  = Ω σ₊⊗a e^{iΔt} + Ω σ₋⊗a† e^{−iΔt}
//! ```

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::fock::{self, TruncationMode};
use crate::instrument::{
    integrate_instrument, BranchSample, InstrumentBranch, Preparation, TimeGrid,
};
use crate::linalg;
use crate::superop::SuperOp;
use crate::{Error, ModelParams, Operator, Result, C64};

const JOINT_TOL: f64 = 1e-10;

/// Density matrix of atom and field, `2d × 2d`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    d: usize,
    matrix: Operator,
}

impl JointState {
    pub fn new(d: usize, matrix: Operator) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        if matrix.nrows() != 2 * d || matrix.ncols() != 2 * d {
            return Err(Error::DimensionMismatch {
                expected: 2 * d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let s = JointState { d, matrix };
        s.check()?;
        Ok(s)
    }

    /// `|prep⟩⟨prep| ⊗ ρ_F`.
    pub fn product(prep: Preparation, rho_f: &Operator) -> Result<Self> {
        let d = rho_f.nrows();
        Self::new(d, atom_projector(prep).kronecker(rho_f))
    }

    fn check(&self) -> Result<()> {
        let m = &self.matrix;
        let herm = linalg::max_abs(&(m - m.adjoint()));
        if herm > JOINT_TOL {
            return Err(Error::InvalidState(format!("anti-Hermitian part {herm:e}")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > JOINT_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = linalg::min_eigenvalue(m);
        if min < -JOINT_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn field_dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Field block `ρ_μν = ⟨μ|ρ|ν⟩` for atomic labels `μ, ν`.
    pub fn block(&self, mu: Preparation, nu: Preparation) -> Operator {
        atom_block(&self.matrix, self.d, mu, nu)
    }
}

fn atom_block(m: &Operator, d: usize, mu: Preparation, nu: Preparation) -> Operator {
    m.view((mu.index() * d, nu.index() * d), (d, d))
        .into_owned()
}

fn atom_projector(prep: Preparation) -> Operator {
    fock::matrix_unit(2, prep.index(), prep.index())
}

/// `σ₋ = |g⟩⟨e|`.
fn sigma_minus() -> Operator {
    fock::matrix_unit(2, 0, 1)
}

/// Time-independent pieces of the joint generator.
#[derive(Debug, Clone)]
struct JointModel {
    delta: f64,
    /// `Ω σ₊⊗a`; the Hamiltonian is this times `e^{iΔt}` plus its adjoint.
    coupling: Operator,
    /// `(rate, L)` pairs.
    jumps: Vec<(f64, Operator)>,
    /// `½ Σ rate · L†L`.
    half_loss: Operator,
}

impl JointModel {
    fn new(p: &ModelParams, d: usize) -> Result<Self> {
        p.validate()?;
        let a = fock::annihilation_op(d)?;
        let id_f = Operator::identity(d, d);
        let sm = sigma_minus();
        let sp = sm.adjoint();
        let coupling = sp.kronecker(&a) * C64::new(p.omega, 0.0);
        let jumps: Vec<(f64, Operator)> = [
            (p.gamma_eg, sm.kronecker(&id_f)),
            (p.gamma_ge, sp.kronecker(&id_f)),
        ]
        .into_iter()
        .filter(|(rate, _)| *rate != 0.0)
        .collect();
        let mut half_loss = Operator::zeros(2 * d, 2 * d);
        for (rate, l) in &jumps {
            half_loss += l.adjoint() * l * C64::new(0.5 * rate, 0.0);
        }
        Ok(JointModel {
            delta: p.delta,
            coupling,
            jumps,
            half_loss,
        })
    }

    fn hamiltonian(&self, t: f64) -> Operator {
        let phase = C64::new(libm::cos(self.delta * t), libm::sin(self.delta * t));
        let h = &self.coupling * phase;
        let hd = h.adjoint();
        h + hd
    }

    fn liouvillian(&self, t: f64) -> SuperOp {
        let h = self.hamiltonian(t);
        let mut l = C64::new(0.0, -1.0) * SuperOp::commutator(&h).expect("square");
        for (rate, j) in &self.jumps {
            l = l + *rate * dissipator(j);
        }
        l
    }

    /// `−i(Kρ − ρK†) + Σ rate · LρL†` with `K = H − i·half_loss`.
    fn rhs(&self, t: f64, rho: &Operator) -> Operator {
        let k = self.hamiltonian(t) - &self.half_loss * C64::new(0.0, 1.0);
        let kr = &k * rho;
        let rk = rho * k.adjoint();
        let mut out = (kr - rk) * C64::new(0.0, -1.0);
        for (rate, l) in &self.jumps {
            out += l * rho * l.adjoint() * C64::new(*rate, 0.0);
        }
        out
    }

    /// RK4 with the Hamiltonian evaluated at `t`, `t + h/2` and `t + h`.
    fn propagate(&self, rho0: &Operator, grid: TimeGrid) -> Result<Vec<(f64, Operator)>> {
        let h = grid.dt;
        let steps = grid.steps();
        let mut out = Vec::with_capacity(steps / grid.stride + 2);
        let mut rho = rho0.clone();
        out.push((0.0, rho.clone()));
        let half = C64::new(0.5 * h, 0.0);
        let full = C64::new(h, 0.0);
        let sixth = C64::new(h / 6.0, 0.0);
        for k in 1..=steps {
            let t = (k - 1) as f64 * h;
            let k1 = self.rhs(t, &rho);
            let k2 = self.rhs(t + 0.5 * h, &(&rho + &k1 * half));
            let k3 = self.rhs(t + 0.5 * h, &(&rho + &k2 * half));
            let k4 = self.rhs(t + h, &(&rho + &k3 * full));
            rho += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * sixth;
            let t_new = k as f64 * h;
            if rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Divergence { t: t_new });
            }
            if k % grid.stride == 0 || k == steps {
                out.push((t_new, rho.clone()));
            }
        }
        Ok(out)
    }
}

/// `D[L]ρ = LρL† − ½{L†L, ρ}` as a superoperator.
fn dissipator(l: &Operator) -> SuperOp {
    let ld = l.adjoint();
    let ldl = &ld * l;
    let s = SuperOp::sandwich(l, &ld).expect("square");
    s - 0.5 * (SuperOp::left(&ldl).expect("square") + SuperOp::right(&ldl).expect("square"))
}

/// Superoperator of the joint generator at time `t`, acting on `2d × 2d`
/// operators.
pub fn joint_liouvillian(p: &ModelParams, d: usize, t: f64) -> Result<SuperOp> {
    Ok(JointModel::new(p, d)?.liouvillian(t))
}

fn check_oracle_grid(p: &ModelParams, grid: &TimeGrid) -> Result<()> {
    grid.validate()?;
    let max_dt = max_oracle_dt(p);
    if grid.dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::InvalidGrid(format!(
            "dt = {} does not resolve the joint dynamics; need dt <= {max_dt}",
            grid.dt
        )));
    }
    Ok(())
}

/// Largest step accepted by [`evolve_joint`] and
/// [`extract_instrument_oracle`]: `0.01 / max(|Δ|, Ω, Γ, 1)`.
pub fn max_oracle_dt(p: &ModelParams) -> f64 {
    0.01 / p.delta.abs().max(p.omega).max(p.gamma_big).max(1.0)
}

/// Integrates the joint master equation from `rho0`.
pub fn evolve_joint(
    p: &ModelParams,
    rho0: &JointState,
    grid: TimeGrid,
) -> Result<Vec<(f64, JointState)>> {
    let model = JointModel::new(p, rho0.d)?;
    check_oracle_grid(p, &grid)?;
    Ok(model
        .propagate(&rho0.matrix, grid)?
        .into_iter()
        .map(|(t, m)| {
            (
                t,
                JointState {
                    d: rho0.d,
                    matrix: m,
                },
            )
        })
        .collect())
}

/// Builds `Λ_g(t)` and `Λ_e(t)` column by column: each field matrix unit
/// `|m⟩⟨n|`, paired with the pointer preparation, is evolved through the
/// joint model, projected onto the readout and traced over the atom.
pub fn extract_instrument_oracle(
    p: &ModelParams,
    d: usize,
    prep: Preparation,
    grid: TimeGrid,
) -> Result<InstrumentBranch> {
    let model = JointModel::new(p, d)?;
    check_oracle_grid(p, &grid)?;
    let n = d * d;
    let pointer = atom_projector(prep);
    let mut columns: Vec<Vec<(f64, Operator)>> = Vec::with_capacity(n);
    for col in 0..n {
        let (m, k) = (col % d, col / d);
        let rho0 = pointer.kronecker(&fock::matrix_unit(d, m, k));
        columns.push(model.propagate(&rho0, grid)?);
    }
    let samples = (0..columns[0].len())
        .map(|s| {
            let t = columns[0][s].0;
            let mut lg = DMatrix::zeros(n, n);
            let mut le = DMatrix::zeros(n, n);
            for (col, series) in columns.iter().enumerate() {
                let rho = &series[s].1;
                let g = atom_block(rho, d, Preparation::Ground, Preparation::Ground);
                let e = atom_block(rho, d, Preparation::Excited, Preparation::Excited);
                lg.column_mut(col).copy_from_slice(g.as_slice());
                le.column_mut(col).copy_from_slice(e.as_slice());
            }
            BranchSample {
                t,
                m_g: SuperOp::from_matrix(d, lg).expect("d²×d²"),
                m_e: SuperOp::from_matrix(d, le).expect("d²×d²"),
            }
        })
        .collect();
    Ok(InstrumentBranch { prep, samples })
}

/// Largest entry-wise difference between two branches on the same grid,
/// per outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularResidual {
    pub g: f64,
    pub e: f64,
}

pub fn branch_residual(a: &InstrumentBranch, b: &InstrumentBranch) -> Result<SecularResidual> {
    if a.samples.len() != b.samples.len() {
        return Err(Error::InvalidGrid(format!(
            "branches have {} and {} samples",
            a.samples.len(),
            b.samples.len()
        )));
    }
    let mut r = SecularResidual { g: 0.0, e: 0.0 };
    for (x, y) in a.samples.iter().zip(&b.samples) {
        if (x.t - y.t).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "time mismatch {} vs {}",
                x.t, y.t
            )));
        }
        r.g = r.g.max(x.m_g.max_abs_diff(&y.m_g));
        r.e = r.e.max(x.m_e.max_abs_diff(&y.m_e));
    }
    Ok(r)
}

/// Max over the grid of `max |Λ_r − 𝔐_{r,prep}|`, oracle against the
/// reduced model, on identical grids.
pub fn secular_residual(
    p: &ModelParams,
    d: usize,
    prep: Preparation,
    grid: TimeGrid,
    mode: TruncationMode,
) -> Result<SecularResidual> {
    let oracle = extract_instrument_oracle(p, d, prep, grid)?;
    let reduced = integrate_instrument(p, d, prep, grid, mode)?;
    branch_residual(&oracle, &reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_state, maximally_mixed};
    use crate::Regime;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn params(omega: f64, delta: f64, gamma_big: f64, gamma_ge: f64, gamma_eg: f64) -> ModelParams {
        ModelParams::new(omega, delta, gamma_big, gamma_ge, gamma_eg).unwrap()
    }

    fn random_hermitian(rng: &mut StdRng, n: usize) -> Operator {
        let g = Operator::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        linalg::hermitian_part(&g)
    }

    #[test]
    fn zero_rates_give_zero_liouvillian() {
        let p = params(0.0, 0.5, 1.0, 0.0, 0.0);
        let l = joint_liouvillian(&p, 3, 0.7).unwrap();
        assert_eq!(linalg::max_abs(l.matrix()), 0.0);
    }

    #[test]
    fn liouvillian_is_trace_free() {
        let mut rng = StdRng::seed_from_u64(7);
        let p = Regime::Strong.params();
        for d in 1..=4 {
            let l = joint_liouvillian(&p, d, 1.3).unwrap();
            for _ in 0..3 {
                let x = random_hermitian(&mut rng, 2 * d);
                assert!(l.trace_of_image(&x).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn superoperator_and_direct_rhs_agree() {
        let mut rng = StdRng::seed_from_u64(8);
        let p = Regime::Strong.params();
        let d = 3;
        let model = JointModel::new(&p, d).unwrap();
        for t in [0.0, 0.4, 2.9] {
            let x = Operator::from_fn(2 * d, 2 * d, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let via_super = joint_liouvillian(&p, d, t).unwrap().apply(&x).unwrap();
            let direct = model.rhs(t, &x);
            assert!(linalg::max_abs(&(via_super - direct)) < 1e-12);
        }
    }

    #[test]
    fn ground_vacuum_is_dark() {
        let p = params(0.7, 0.5, 2.0, 0.0, 1.0);
        let rho0 = JointState::product(Preparation::Ground, &fock_state(3, 0).unwrap()).unwrap();
        let grid = TimeGrid::new(2.0, 0.004, 50).unwrap();
        for (_, s) in evolve_joint(&p, &rho0, grid).unwrap() {
            assert!(linalg::max_abs(&(s.matrix() - rho0.matrix())) < 1e-14);
        }
    }

    #[test]
    fn uncoupled_atom_relaxes() {
        let p = params(0.0, 0.5, 1.0, 0.0, 1.0);
        let rho_f = maximally_mixed(3).unwrap();
        let rho0 = JointState::product(Preparation::Excited, &rho_f).unwrap();
        let grid = TimeGrid::new(3.0, 0.005, 20).unwrap();
        for (t, s) in evolve_joint(&p, &rho0, grid).unwrap() {
            let pe = s
                .block(Preparation::Excited, Preparation::Excited)
                .trace()
                .re;
            assert!((pe - libm::exp(-t)).abs() < 1e-10, "t={t}");
            let field = s.block(Preparation::Ground, Preparation::Ground)
                + s.block(Preparation::Excited, Preparation::Excited);
            assert!(linalg::max_abs(&(field - &rho_f)) < 1e-12);
        }
    }

    #[test]
    fn joint_evolution_keeps_state_physical() {
        let p = Regime::Strong.params();
        let d = 3;
        let rho0 = JointState::product(Preparation::Ground, &maximally_mixed(d).unwrap()).unwrap();
        let grid = TimeGrid::new(5.0, max_oracle_dt(&p), 100).unwrap();
        for (_, s) in evolve_joint(&p, &rho0, grid).unwrap() {
            assert!((s.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-9);
            JointState::new(d, s.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = Regime::Strong.params();
        let rho0 = JointState::product(Preparation::Ground, &maximally_mixed(2).unwrap()).unwrap();
        let grid = TimeGrid::new(1.0, 0.01, 1).unwrap();
        assert!(matches!(
            evolve_joint(&p, &rho0, grid),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn oracle_instrument_structure() {
        let p = Regime::Strong.params();
        let d = 3;
        let grid = TimeGrid::new(2.0, max_oracle_dt(&p), 80).unwrap();
        let b = extract_instrument_oracle(&p, d, Preparation::Ground, grid).unwrap();
        let s0 = &b.samples[0];
        assert_eq!(s0.m_g, SuperOp::identity(d));
        assert_eq!(s0.m_e, SuperOp::zero(d));

        let mut rng = StdRng::seed_from_u64(12);
        for s in &b.samples {
            // trace preservation of Λ_g + Λ_e
            let x = Operator::from_fn(d, d, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let total = (&s.m_g + &s.m_e).trace_of_image(&x).unwrap();
            assert!((total - x.trace()).norm() < 1e-9);

            // Hermiticity pairing between |m⟩⟨n| and |n⟩⟨m| columns
            for lam in [&s.m_g, &s.m_e] {
                for m in 0..d {
                    for n in 0..d {
                        let a = lam.apply(&fock::matrix_unit(d, m, n)).unwrap();
                        let b = lam.apply(&fock::matrix_unit(d, n, m)).unwrap();
                        assert!(linalg::max_abs(&(a - b.adjoint())) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_extraction_is_linear() {
        let p = Regime::Strong.params();
        let d = 2;
        let grid = TimeGrid::new(1.5, max_oracle_dt(&p), 50).unwrap();
        let b = extract_instrument_oracle(&p, d, Preparation::Ground, grid).unwrap();
        let rho_f = Operator::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(0.5, 0.0)
            } else {
                C64::new(0.2, if i < j { 0.3 } else { -0.3 })
            }
        });
        let direct = evolve_joint(
            &p,
            &JointState::product(Preparation::Ground, &rho_f).unwrap(),
            grid,
        )
        .unwrap();
        for (s, (_, joint)) in b.samples.iter().zip(direct) {
            let via_g = s.m_g.apply(&rho_f).unwrap();
            let via_e = s.m_e.apply(&rho_f).unwrap();
            assert!(
                linalg::max_abs(&(via_g - joint.block(Preparation::Ground, Preparation::Ground)))
                    < 1e-10
            );
            assert!(
                linalg::max_abs(&(via_e - joint.block(Preparation::Excited, Preparation::Excited)))
                    < 1e-10
            );
        }
    }

    #[test]
    fn residual_vanishes_without_coupling() {
        let p = params(0.0, 0.5, 1.0, 0.1, 1.0);
        let grid = TimeGrid::new(3.0, 0.01, 10).unwrap();
        for prep in [Preparation::Ground, Preparation::Excited] {
            let r = secular_residual(&p, 3, prep, grid, TruncationMode::AlgebraicClosure).unwrap();
            assert!(r.g < 1e-10 && r.e < 1e-10, "{r:?}");
        }
    }
}
