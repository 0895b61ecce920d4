use nalgebra::DVector;

use super::{CMatrix, ComplexOperator, HilbertSpace, C64};
use crate::{Error, Result, Tolerances};

/// Pure state. Constructed normalized (see [`StateVector::normalize`]).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amps: DVector<C64>,
}

impl StateVector {
    /// Normalizes `amps` onto `space`; rejects the zero vector.
    pub fn normalize(space: HilbertSpace, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: amps.len() });
        }
        let norm = amps.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state amplitudes"));
        }
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector cannot be normalized".into()));
        }
        Ok(Self { space, amps: amps / C64::new(norm, 0.0) })
    }

    pub fn from_slice(space: HilbertSpace, amps: &[C64]) -> Result<Self> {
        Self::normalize(space, DVector::from_column_slice(amps))
    }

    /// Computational basis state at flat index `index`.
    pub fn basis(space: &HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: index });
        }
        let mut amps = DVector::zeros(space.dim());
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { space: space.clone(), amps })
    }

    /// Product basis state with one digit per subsystem.
    pub fn product(space: &HilbertSpace, digits: &[usize]) -> Result<Self> {
        Self::basis(space, space.index(digits)?)
    }

    pub(crate) fn from_raw(space: HilbertSpace, amps: DVector<C64>) -> Self {
        Self { space, amps }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(self.space.dims().to_vec(), other.space.dims().to_vec()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn apply(&self, op: &ComplexOperator) -> Result<StateVector> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch(op.space().dims().to_vec(), self.space.dims().to_vec()));
        }
        Ok(Self { space: self.space.clone(), amps: op.matrix() * &self.amps })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(self.space.clone(), &self.amps * self.amps.adjoint())
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Density matrix. [`DensityMatrix::new`] validates Hermiticity, unit trace
/// and positivity against [`Tolerances`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, mat: CMatrix, tol: &Tolerances) -> Result<Self> {
        let rho = Self::checked_shape(space, mat)?;
        rho.validate(tol)?;
        Ok(rho)
    }

    /// Shape-checked but otherwise unvalidated; used for intermediate
    /// propagation results whose drift is tracked separately.
    pub fn new_unchecked(space: HilbertSpace, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), space.dim());
        Self { space, mat }
    }

    fn checked_shape(space: HilbertSpace, mat: CMatrix) -> Result<Self> {
        let n = space.dim();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: mat.nrows().max(mat.ncols()) });
        }
        Ok(Self { space, mat })
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), mat: CMatrix::identity(n, n) / C64::new(n as f64, 0.0) }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if !self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = self.hermiticity_error();
        if herm > tol.hermitian {
            return Err(Error::InvalidState(format!("not Hermitian: ‖ρ−ρ†‖ = {herm:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn as_operator(&self) -> ComplexOperator {
        ComplexOperator::new(self.space.clone(), self.mat.clone()).expect("shape checked at construction")
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Diagonal entries (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &ComplexOperator) -> Result<DensityMatrix> {
        if u.space() != &self.space {
            return Err(Error::SpaceMismatch(u.space().dims().to_vec(), self.space.dims().to_vec()));
        }
        let m = u.matrix();
        Ok(Self { space: self.space.clone(), mat: m * &self.mat * m.adjoint() })
    }

    /// Expectation value `tr(ρ A)`.
    pub fn expect(&self, a: &ComplexOperator) -> Result<C64> {
        if a.space() != &self.space {
            return Err(Error::SpaceMismatch(a.space().dims().to_vec(), self.space.dims().to_vec()));
        }
        Ok((&self.mat * a.matrix()).trace())
    }
}
