use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::HilbertSpace;
use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Dense complex operator acting on a tensor-product space.
///
/// Hamiltonians carry angular-frequency units (rad/us); unitaries and
/// projectors are dimensionless. Hermiticity and unitarity are predicates,
/// never assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    space: HilbertSpace,
    mat: CMatrix,
}

impl ComplexOperator {
    pub fn new(space: HilbertSpace, mat: CMatrix) -> Result<Self> {
        let n = space.dim();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: mat.nrows().max(mat.ncols()) });
        }
        Ok(Self { space, mat })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(space: HilbertSpace, rows: &[C64]) -> Result<Self> {
        let n = space.dim();
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: rows.len() });
        }
        Ok(Self { space, mat: CMatrix::from_row_slice(n, n, rows) })
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), mat: CMatrix::identity(n, n) }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), mat: CMatrix::zeros(n, n) }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space.clone(), mat: self.mat.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { space: self.space.clone(), mat: &self.mat * c }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Frobenius norm of `A − A†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Frobenius norm of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        (self.mat.adjoint() * &self.mat - CMatrix::identity(n, n)).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { space: self.space.clone(), mat: &self.mat * &other.mat - &other.mat * &self.mat })
    }

    /// Spectral (operator 2-) norm.
    pub fn op_norm(&self) -> f64 {
        self.mat.clone().singular_values().max()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { space: self.space.clone(), mat: &self.mat * &other.mat })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { space: self.space.clone(), mat: &self.mat + &other.mat })
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.check_same(u)?;
        Ok(Self { space: self.space.clone(), mat: &u.mat * &self.mat * u.mat.adjoint() })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space.dims().to_vec(), other.space.dims().to_vec()));
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexOperator> for &ComplexOperator {
            type Output = ComplexOperator;

            /// Panics if the operands live on different spaces; use the
            /// `try_*` methods for fallible composition.
            fn $method(self, rhs: &ComplexOperator) -> ComplexOperator {
                assert_eq!(self.space, rhs.space, "operator space mismatch");
                ComplexOperator { space: self.space.clone(), mat: &self.mat $op &rhs.mat }
            }
        }

        impl $trait<ComplexOperator> for ComplexOperator {
            type Output = ComplexOperator;

            fn $method(self, rhs: ComplexOperator) -> ComplexOperator {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<C64> for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: C64) -> ComplexOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: f64) -> ComplexOperator {
        self.scale_re(rhs)
    }
}
