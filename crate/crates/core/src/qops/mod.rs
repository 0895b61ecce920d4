//! Dense complex linear algebra over tensor-product Hilbert spaces.

mod operator;
mod space;
mod state;

pub use operator::{CMatrix, ComplexOperator, C64};
pub use space::HilbertSpace;
pub use state::{DensityMatrix, StateVector};

use nalgebra::DVector;

use crate::{Error, Result, Tolerances};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    let space = a.space().concat(b.space())?;
    ComplexOperator::new(space, a.matrix().kronecker(b.matrix()))
}

/// Kronecker product of an ordered list of operators.
pub fn tensor_all(ops: &[&ComplexOperator]) -> Result<ComplexOperator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidSpace("empty tensor product".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, op| tensor(&acc, op))
}

pub fn tensor_states(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let space = a.space().concat(b.space())?;
    Ok(StateVector::from_raw(space, a.amplitudes().kronecker(b.amplitudes())))
}

pub fn tensor_density(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let space = a.space().concat(b.space())?;
    Ok(DensityMatrix::new_unchecked(space, a.matrix().kronecker(b.matrix())))
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems retain
/// their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let space = rho.space();
    let dims = space.dims();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::PartialTrace("keep set is empty".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::PartialTrace(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let strides = space.strides();

    let offsets = |which: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &k in which {
            let mut next = Vec::with_capacity(out.len() * dims[k]);
            for &o in &out {
                for d in 0..dims[k] {
                    next.push(o + d * strides[k]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    let m = rho.matrix();
    let out = CMatrix::from_fn(n, n, |a, b| {
        traced_off
            .iter()
            .map(|&r| m[(kept_off[a] + r, kept_off[b] + r)])
            .sum()
    });
    let kept_space = HilbertSpace::new(keep.iter().map(|&k| dims[k]).collect())?;
    Ok(DensityMatrix::new_unchecked(kept_space, out))
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(a: &ComplexOperator) -> Result<ComplexOperator> {
    if !a.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let out = ComplexOperator::new(a.space().clone(), a.matrix().clone().exp())?;
    if !out.is_finite() {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(out)
}

/// `exp(−i H t)`.
pub fn propagator(h: &ComplexOperator, t: f64) -> Result<ComplexOperator> {
    expm(&h.scale(c(0.0, -t)))
}

/// `⟨ψ|ρ|ψ⟩`, with the imaginary residue checked against the default
/// tolerance.
pub fn state_fidelity(ideal: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    state_fidelity_tol(ideal, rho, &Tolerances::default())
}

pub fn state_fidelity_tol(ideal: &StateVector, rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    if ideal.space() != rho.space() {
        return Err(Error::SpaceMismatch(ideal.space().dims().to_vec(), rho.space().dims().to_vec()));
    }
    let psi = ideal.amplitudes();
    let f = psi.dotc(&(rho.matrix() * psi));
    if f.im.abs() >= tol.imag_residue.max(tol.imag_residue * f.re.abs()) {
        return Err(Error::InvalidState(format!("fidelity has imaginary residue {:e}", f.im)));
    }
    Ok(f.re)
}

/// `|⟨a|b⟩|²` for pure states.
pub fn pure_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

pub fn sigma_x() -> ComplexOperator {
    ComplexOperator::from_rows(HilbertSpace::qubit(), &[ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn sigma_y() -> ComplexOperator {
    ComplexOperator::from_rows(HilbertSpace::qubit(), &[ZERO, -I, I, ZERO]).expect("2x2")
}

/// `diag(1, −1)` on `(|0⟩, |1⟩)`.
pub fn sigma_z() -> ComplexOperator {
    ComplexOperator::from_rows(HilbertSpace::qubit(), &[ONE, ZERO, ZERO, -ONE]).expect("2x2")
}

pub fn identity(dim: usize) -> Result<ComplexOperator> {
    Ok(ComplexOperator::identity(&HilbertSpace::single(dim)?))
}

/// `n·σ` for a 3-vector `n`.
pub fn n_dot_sigma(n: [f64; 3]) -> ComplexOperator {
    &(&(&sigma_x() * n[0]) + &(&sigma_y() * n[1])) + &(&sigma_z() * n[2])
}

/// `|row⟩⟨col|` on `space`.
pub fn ket_bra(space: &HilbertSpace, row: usize, col: usize) -> Result<ComplexOperator> {
    let n = space.dim();
    if row >= n || col >= n {
        return Err(Error::DimensionMismatch { expected: n, got: row.max(col) });
    }
    let mut m = CMatrix::zeros(n, n);
    m[(row, col)] = ONE;
    ComplexOperator::new(space.clone(), m)
}

pub fn projector(space: &HilbertSpace, index: usize) -> Result<ComplexOperator> {
    ket_bra(space, index, index)
}

/// Bosonic annihilation operator truncated to `levels` Fock states.
pub fn destroy(levels: usize) -> Result<ComplexOperator> {
    let space = HilbertSpace::single(levels)?;
    let mut m = CMatrix::zeros(levels, levels);
    for n in 1..levels {
        m[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    ComplexOperator::new(space, m)
}

/// Distance between two unitaries after removing the global phase, aligned
/// on the largest-magnitude entry of `reference`. Returns the Frobenius norm
/// of the difference.
pub fn distance_up_to_phase(reference: &ComplexOperator, other: &ComplexOperator) -> Result<f64> {
    if reference.space() != other.space() {
        return Err(Error::SpaceMismatch(reference.space().dims().to_vec(), other.space().dims().to_vec()));
    }
    let r = reference.matrix();
    let (idx, _) = r
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let o = other.matrix();
    let (a, b) = (r[idx], o[idx]);
    let phase = if b.norm() == 0.0 { ONE } else { (a * b.conj()) / (a * b.conj()).norm() };
    Ok((r - o * phase).norm())
}

/// Column vector helper for tests and builders.
pub fn vector(amps: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(amps)
}
