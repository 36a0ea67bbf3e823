//! Truncated Fock-space operators and initial field states.
//!
//! Basis is ascending `|0⟩ .. |d−1⟩`; matrix entry `(m, n)` is `⟨m|X|n⟩`.

use alloc::format;

use nalgebra::DMatrix;

use crate::linalg;
use crate::{Error, Result, C64};

/// Dense complex operator on a finite Hilbert space.
pub type Operator = DMatrix<C64>;

/// How the truncated product `a·a†` is realized.
///
/// In a finite basis `a·a† = diag(1, 2, .., d−1, 0)`, which breaks
/// `[a, a†] = 1` on the top level. `AlgebraicClosure` substitutes
/// `a†a + 1` wherever `a·a†` occurs so the commutator holds exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum TruncationMode {
    #[default]
    AlgebraicClosure,
    Strict,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Annihilation operator: `a|n⟩ = √n |n−1⟩`.
pub fn annihilation_op(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let mut a = Operator::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new(libm::sqrt(n as f64), 0.0);
    }
    Ok(a)
}

/// Creation operator, the adjoint of [`annihilation_op`].
pub fn creation_op(d: usize) -> Result<Operator> {
    Ok(annihilation_op(d)?.adjoint())
}

/// Returns `(a†a, a·a†)` with `a·a†` realized according to `mode`.
///
/// Both are diagonal and built from integer entries, so `a†a` is exactly
/// `diag(0, 1, .., d−1)` rather than a rounded product of square roots.
pub fn quadratic_ops(d: usize, mode: TruncationMode) -> Result<(Operator, Operator)> {
    check_dim(d)?;
    let n_op = Operator::from_fn(d, d, |i, j| {
        C64::new(if i == j { i as f64 } else { 0.0 }, 0.0)
    });
    let aad_op = match mode {
        TruncationMode::Strict => Operator::from_fn(d, d, |i, j| {
            C64::new(
                if i == j && i + 1 < d {
                    (i + 1) as f64
                } else {
                    0.0
                },
                0.0,
            )
        }),
        TruncationMode::AlgebraicClosure => &n_op + Operator::identity(d, d),
    };
    Ok((n_op, aad_op))
}

/// Number state `|n⟩⟨n|`.
pub fn fock_state(d: usize, n: usize) -> Result<Operator> {
    check_dim(d)?;
    if n >= d {
        return Err(Error::OutOfRange { n, d });
    }
    let mut rho = Operator::zeros(d, d);
    rho[(n, n)] = C64::new(1.0, 0.0);
    Ok(rho)
}

/// Completely mixed state `1/d`.
pub fn maximally_mixed(d: usize) -> Result<Operator> {
    check_dim(d)?;
    Ok(Operator::identity(d, d) * C64::new(1.0 / d as f64, 0.0))
}

/// Matrix unit `|m⟩⟨n|`.
pub fn matrix_unit(d: usize, m: usize, n: usize) -> Operator {
    let mut e = Operator::zeros(d, d);
    e[(m, n)] = C64::new(1.0, 0.0);
    e
}

/// Tolerances used by [`check_density`].
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Verifies that `rho` is square, Hermitian, PSD and of unit trace.
pub fn check_density(rho: &Operator) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidState(format!(
            "{}x{} matrix is not square",
            rho.nrows(),
            rho.ncols()
        )));
    }
    check_dim(rho.nrows())?;
    let herm = linalg::max_abs(&(rho - rho.adjoint()));
    if herm >= HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("anti-Hermitian part {herm:e}")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() >= TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let min = linalg::min_eigenvalue(rho);
    if min < -PSD_TOL {
        return Err(Error::InvalidState(format!("minimum eigenvalue {min:e}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn diag(v: &[f64]) -> Operator {
        Operator::from_fn(v.len(), v.len(), |i, j| re(if i == j { v[i] } else { 0.0 }))
    }

    #[test]
    fn annihilation_small_dims() {
        assert_eq!(annihilation_op(1).unwrap(), Operator::zeros(1, 1));

        let a2 = annihilation_op(2).unwrap();
        assert_eq!(a2[(0, 1)], re(1.0));
        assert_eq!(a2.iter().filter(|z| z.norm() != 0.0).count(), 1);

        let a3 = annihilation_op(3).unwrap();
        assert_eq!(a3[(0, 1)], re(1.0));
        assert!((a3[(1, 2)].re - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(a3.iter().filter(|z| z.norm() != 0.0).count(), 2);

        assert_eq!(annihilation_op(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn annihilation_lowers_number_states() {
        let d = 7;
        let a = annihilation_op(d).unwrap();
        for n in 1..d {
            let mut ket = nalgebra::DVector::<C64>::zeros(d);
            ket[n] = re(1.0);
            let out = &a * ket;
            for m in 0..d {
                let want = if m == n - 1 {
                    libm::sqrt(n as f64)
                } else {
                    0.0
                };
                assert!((out[m] - re(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn quadratic_ops_modes() {
        let (n, aad) = quadratic_ops(2, TruncationMode::Strict).unwrap();
        assert_eq!(n, diag(&[0.0, 1.0]));
        assert_eq!(aad, diag(&[1.0, 0.0]));

        let (_, aad) = quadratic_ops(2, TruncationMode::AlgebraicClosure).unwrap();
        assert_eq!(aad, diag(&[1.0, 2.0]));

        let (n, aad) = quadratic_ops(1, TruncationMode::AlgebraicClosure).unwrap();
        assert_eq!(n[(0, 0)], re(0.0));
        assert_eq!(aad[(0, 0)], re(1.0));
    }

    #[test]
    fn quadratic_ops_match_truncated_products() {
        for d in 1..=9 {
            let a = annihilation_op(d).unwrap();
            let (n, aad) = quadratic_ops(d, TruncationMode::Strict).unwrap();
            assert!(linalg::max_abs(&(n - a.adjoint() * &a)) < 1e-14);
            assert!(linalg::max_abs(&(aad - &a * a.adjoint())) < 1e-14);
        }
    }

    #[test]
    fn closure_commutator_is_exact() {
        for d in 1..=12 {
            let (n, aad) = quadratic_ops(d, TruncationMode::AlgebraicClosure).unwrap();
            assert_eq!(aad - n, Operator::identity(d, d));
        }
    }

    #[test]
    fn fock_and_mixed_states() {
        assert_eq!(fock_state(2, 1).unwrap(), diag(&[0.0, 1.0]));
        let f = fock_state(6, 5).unwrap();
        assert_eq!(f[(5, 5)], re(1.0));
        assert_eq!(f.trace(), re(1.0));
        assert_eq!(fock_state(2, 2), Err(Error::OutOfRange { n: 2, d: 2 }));

        assert_eq!(maximally_mixed(2).unwrap()[(1, 1)], re(0.5));
        assert_eq!(maximally_mixed(1).unwrap()[(0, 0)], re(1.0));
        let m4 = maximally_mixed(4).unwrap();
        assert!((0..4).all(|i| m4[(i, i)] == re(0.25)));
        assert_eq!(maximally_mixed(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn constructed_states_are_exact_densities() {
        for d in 1..=8 {
            let mixed = maximally_mixed(d).unwrap();
            assert_eq!(mixed.adjoint(), mixed);
            check_density(&mixed).unwrap();
            for n in 0..d {
                let f = fock_state(d, n).unwrap();
                assert_eq!(f.adjoint(), f);
                assert_eq!(f.trace(), re(1.0));
                check_density(&f).unwrap();
            }
        }
    }

    #[test]
    fn check_density_rejects_bad_inputs() {
        let mut rho = maximally_mixed(2).unwrap();
        rho[(0, 1)] = re(0.1);
        assert!(check_density(&rho).is_err());
        let rho = diag(&[1.5, -0.5]);
        assert!(check_density(&rho).is_err());
        assert!(check_density(&(maximally_mixed(3).unwrap() * re(2.0))).is_err());
    }
}
