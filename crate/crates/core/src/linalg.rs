//! Small dense helpers shared by the other modules.

use nalgebra::{DMatrix, DVector};

use crate::{Operator, C64};

/// Largest absolute entry, `‖X‖_max`.
pub fn max_abs(x: &DMatrix<C64>) -> f64 {
    x.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `(X + X†) / 2`.
pub fn hermitian_part(x: &DMatrix<C64>) -> DMatrix<C64> {
    (x + x.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `x`, ascending.
pub fn hermitian_eigenvalues(x: &DMatrix<C64>) -> DVector<f64> {
    let mut ev = hermitian_part(x).symmetric_eigenvalues();
    ev.as_mut_slice().sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(x: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(x)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues at or below this are treated as zero when taking square
/// roots; the eigensolver cannot resolve them and `√ε` would otherwise
/// leak into fidelities.
pub const SPECTRAL_CUTOFF: f64 = 1e-14;

/// `√λ` for `λ > SPECTRAL_CUTOFF`, else zero.
pub fn cut_sqrt(l: f64) -> f64 {
    if l > SPECTRAL_CUTOFF {
        libm::sqrt(l)
    } else {
        0.0
    }
}

/// Principal square root of a PSD matrix. Negative eigenvalues are clamped
/// to zero; callers are expected to have checked them first.
pub fn sqrt_psd(x: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = hermitian_part(x).symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| C64::new(cut_sqrt(l), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Column-stacking vectorization: `vec(X)[i + j·d] = X[i, j]`.
pub fn vectorize(x: &Operator) -> DVector<C64> {
    DVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`] for a `d×d` operator.
pub fn unvectorize(v: &[C64], d: usize) -> Operator {
    Operator::from_column_slice(d, d, v)
}
