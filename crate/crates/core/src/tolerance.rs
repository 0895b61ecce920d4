use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// State normalization after `normalize`.
    pub norm: f64,
    /// Hermiticity of density matrices and Hamiltonians.
    pub hermitian: f64,
    /// Trace of density matrices.
    pub trace: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub min_eigenvalue: f64,
    /// Residual imaginary part accepted for real-valued quadratic forms.
    pub imag_residue: f64,
    /// Unitarity check of propagators.
    pub unitary: f64,
    /// Proportionality to identity of DD pulse products.
    pub identity: f64,
    /// Trace drift allowed over a full propagation.
    pub trace_drift: f64,
    /// Hermiticity drift allowed over a full propagation.
    pub hermiticity_drift: f64,
    /// Smallest eigenvalue of the final state accepted by the propagator.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            hermitian: 1e-10,
            trace: 1e-10,
            min_eigenvalue: -1e-8,
            imag_residue: 1e-10,
            unitary: 1e-10,
            identity: 1e-12,
            trace_drift: 1e-8,
            hermiticity_drift: 1e-8,
            positivity: -1e-6,
        }
    }
}
