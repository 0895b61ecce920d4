use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tensor-product Hilbert space described by its ordered subsystem
/// dimensions. Subsystem 0 is the slowest-varying index, so `|a⟩⊗|b⟩` maps
/// to flat index `a * dims[1] + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertSpace {
    dims: Vec<usize>,
    total: usize,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("no subsystems".into()));
        }
        let mut total: usize = 1;
        for (k, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(Error::InvalidSpace(format!("subsystem {k} has dimension 0")));
            }
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidSpace(format!("total dimension of {dims:?} overflows")))?;
        }
        Ok(Self { dims, total })
    }

    pub fn qubit() -> Self {
        Self { dims: vec![2], total: 2 }
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Space of `self ⊗ other`.
    pub fn concat(&self, other: &HilbertSpace) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Stride of each subsystem in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Flat index of a product basis state given one digit per subsystem.
    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), got: digits.len() });
        }
        let mut idx = 0;
        for (&d, &n) in digits.iter().zip(&self.dims) {
            if d >= n {
                return Err(Error::InvalidSpace(format!("digit {d} out of range for dimension {n}")));
            }
            idx = idx * n + d;
        }
        Ok(idx)
    }

    /// Inverse of [`Self::index`].
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }
}

impl TryFrom<Vec<usize>> for HilbertSpace {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<HilbertSpace> for Vec<usize> {
    fn from(space: HilbertSpace) -> Self {
        space.dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_overflow() {
        assert!(HilbertSpace::new(vec![]).is_err());
        assert!(HilbertSpace::new(vec![2, 0]).is_err());
        assert!(HilbertSpace::new(vec![usize::MAX, 2]).is_err());
        assert_eq!(HilbertSpace::new(vec![4, 3, 2]).unwrap().dim(), 24);
    }

    #[test]
    fn index_round_trip() {
        let s = HilbertSpace::new(vec![4, 3, 2]).unwrap();
        assert_eq!(s.index(&[1, 2, 1]).unwrap(), 1 * 6 + 2 * 2 + 1);
        for i in 0..s.dim() {
            assert_eq!(s.index(&s.digits(i)).unwrap(), i);
        }
        assert_eq!(s.strides(), vec![6, 2, 1]);
        assert!(s.index(&[4, 0, 0]).is_err());
    }
}
