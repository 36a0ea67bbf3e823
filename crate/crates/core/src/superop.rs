//! Superoperators on field operators in Liouville space.
//!
//! Operators are vectorized by stacking columns, so the map `X ↦ A·X·B` is
//! the matrix `Bᵀ ⊗ A`. Composition of maps is the matrix product, with
//! `(S * T)` meaning "apply `T` first".

use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::fock::{self, TruncationMode};
use crate::linalg;
use crate::{Error, Operator, Result, C64};

/// Linear map on `d×d` operators, stored as a `d²×d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl SuperOp {
    pub fn from_matrix(dim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(SuperOp { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOp {
            dim,
            matrix: DMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SuperOp {
            dim,
            matrix: DMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// The map `X ↦ A·X·B`.
    pub fn sandwich(a: &Operator, b: &Operator) -> Result<Self> {
        let d = square_dim(a)?;
        if square_dim(b)? != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.nrows(),
            });
        }
        Ok(SuperOp {
            dim: d,
            matrix: b.transpose().kronecker(a),
        })
    }

    /// `X ↦ A·X`.
    pub fn left(a: &Operator) -> Result<Self> {
        let d = square_dim(a)?;
        Self::sandwich(a, &Operator::identity(d, d))
    }

    /// `X ↦ X·B`.
    pub fn right(b: &Operator) -> Result<Self> {
        let d = square_dim(b)?;
        Self::sandwich(&Operator::identity(d, d), b)
    }

    /// `X ↦ [H, X]`.
    pub fn commutator(h: &Operator) -> Result<Self> {
        Ok(Self::left(h)? - Self::right(h)?)
    }

    /// `X ↦ Xᵀ`, the standard example of a positive but not completely
    /// positive map.
    pub fn transpose_map(dim: usize) -> Self {
        let n = dim * dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..dim {
            for j in 0..dim {
                m[(j + i * dim, i + j * dim)] = C64::new(1.0, 0.0);
            }
        }
        SuperOp { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.nrows().max(x.ncols()),
            });
        }
        let v = &self.matrix * linalg::vectorize(x);
        Ok(linalg::unvectorize(v.as_slice(), self.dim))
    }

    /// `Tr[S(X)]` without forming `S(X)`.
    pub fn trace_of_image(&self, x: &Operator) -> Result<C64> {
        let y = self.apply(x)?;
        Ok(y.trace())
    }

    /// Choi matrix `C = Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|)`, so that
    /// `C[i·d + p, j·d + q] = ⟨p|S(|i⟩⟨j|)|q⟩`.
    ///
    /// `S` is completely positive iff `C ⪰ 0`.
    pub fn choi_matrix(&self) -> Operator {
        let d = self.dim;
        let n = d * d;
        Operator::from_fn(n, n, |row, col| {
            let (i, p) = (row / d, row % d);
            let (j, q) = (col / d, col % d);
            self.matrix[(p + q * d, i + j * d)]
        })
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.choi_matrix())
    }

    /// `max |S − T|` over matrix entries.
    pub fn max_abs_diff(&self, other: &SuperOp) -> f64 {
        linalg::max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, c: C64) -> SuperOp {
        SuperOp {
            dim: self.dim,
            matrix: &self.matrix * c,
        }
    }
}

fn square_dim(a: &Operator) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(a.nrows())
}

fn assert_same_dim(a: &SuperOp, b: &SuperOp) {
    assert_eq!(a.dim, b.dim, "superoperator dimension mismatch");
}

impl Add for SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: SuperOp) -> SuperOp {
        assert_same_dim(&self, &rhs);
        SuperOp {
            dim: self.dim,
            matrix: self.matrix + rhs.matrix,
        }
    }
}

impl Add<&SuperOp> for &SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        assert_same_dim(self, rhs);
        SuperOp {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: SuperOp) -> SuperOp {
        assert_same_dim(&self, &rhs);
        SuperOp {
            dim: self.dim,
            matrix: self.matrix - rhs.matrix,
        }
    }
}

impl Sub<&SuperOp> for &SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: &SuperOp) -> SuperOp {
        assert_same_dim(self, rhs);
        SuperOp {
            dim: self.dim,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Neg for SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        SuperOp {
            dim: self.dim,
            matrix: -self.matrix,
        }
    }
}

impl Mul<SuperOp> for f64 {
    type Output = SuperOp;
    fn mul(self, rhs: SuperOp) -> SuperOp {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl Mul<SuperOp> for C64 {
    type Output = SuperOp;
    fn mul(self, rhs: SuperOp) -> SuperOp {
        rhs.scale(self)
    }
}

/// Composition: `(S * T)(X) = S(T(X))`.
impl Mul<&SuperOp> for &SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: &SuperOp) -> SuperOp {
        assert_same_dim(self, rhs);
        SuperOp {
            dim: self.dim,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// The SU(1,1) superoperator set acting on field operators, plus the
/// commutator map with the number operator.
///
/// * `k0:     ρ ↦ ½(a†a·ρ + ρ·aa†)`
/// * `kplus:  ρ ↦ a†·ρ·a`
/// * `kminus: ρ ↦ a·ρ·a†`
/// * `n:      ρ ↦ [a†a, ρ]`
///
/// Under [`TruncationMode::AlgebraicClosure`] `aa†` is `a†a + 1`, and
/// `kplus` gains the boundary term `d·|d−1⟩⟨d−1|·ρ·|d−1⟩⟨d−1|`. With it,
/// `Tr[K₊ ρ] = Tr[ρ (a†a + 1)]` holds on the truncated space: the photon
/// that would be created above the cutoff is kept on the top level instead
/// of being lost.
#[derive(Debug, Clone, PartialEq)]
pub struct Su11Generators {
    pub k0: SuperOp,
    pub kplus: SuperOp,
    pub kminus: SuperOp,
    pub n: SuperOp,
}

impl Su11Generators {
    pub fn new(d: usize, mode: TruncationMode) -> Result<Self> {
        let a = fock::annihilation_op(d)?;
        let ad = a.adjoint();
        let (n_op, aad_op) = fock::quadratic_ops(d, mode)?;

        let k0 = 0.5 * (SuperOp::left(&n_op)? + SuperOp::right(&aad_op)?);
        let mut kplus = SuperOp::sandwich(&ad, &a)?;
        if mode == TruncationMode::AlgebraicClosure {
            let top = fock::matrix_unit(d, d - 1, d - 1);
            kplus = kplus + (d as f64) * SuperOp::sandwich(&top, &top)?;
        }
        let kminus = SuperOp::sandwich(&a, &ad)?;
        let n = SuperOp::commutator(&n_op)?;
        Ok(Su11Generators {
            k0,
            kplus,
            kminus,
            n,
        })
    }
}

/// Free-function form of [`Su11Generators::new`].
pub fn su11_generators(d: usize, mode: TruncationMode) -> Result<Su11Generators> {
    Su11Generators::new(d, mode)
}
