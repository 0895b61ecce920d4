//! Time evolution: pure-state and Liouville–von Neumann propagation with
//! instantaneous pulse events, gate runs against an environment qubit,
//! and parameter sweeps.

mod compare;
mod engine;
mod gate;

pub use compare::{compare_single_qubit_models, compare_two_qubit_models, ModelComparison};
pub use engine::{
    propagate_liouville, propagate_states, propagator, Diagnostics, Event, LiouvilleRun,
};
pub use gate::{
    run_gate, sweep, FidelityReport, GateModel, GateSetup, RunMetadata, SweepSurface,
};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::qops::{identity, sigma_x, sigma_y, sigma_z, tensor, ComplexOperator, DensityMatrix, HilbertSpace, StateVector};
use crate::{Error, Result, Tolerances};

/// `σx + σy + σz`, the environment operator of the noise model.
pub fn sigma_sum() -> ComplexOperator {
    &(&sigma_x() + &sigma_y()) + &sigma_z()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvInitial {
    /// `|0⟩_E`, the `σz = +1` state.
    #[default]
    Ground,
    /// `I/2`.
    Mixed,
    /// `(|0⟩ + |1⟩)/√2`.
    Plus,
}

impl EnvInitial {
    pub fn density(self) -> DensityMatrix {
        let q = HilbertSpace::qubit();
        match self {
            EnvInitial::Ground => StateVector::basis(&q, 0).expect("qubit").to_density(),
            EnvInitial::Mixed => DensityMatrix::maximally_mixed(&q),
            EnvInitial::Plus => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                StateVector::from_slice(q, &[crate::qops::c(r, 0.0), crate::qops::c(r, 0.0)])
                    .expect("normalized")
                    .to_density()
            }
        }
    }
}

/// Environment-qubit noise: `H_E = G₁ I ⊗ S`, `H_I = G₂ H(t) ⊗ S` with
/// `S = σx + σy + σz`. `g1` is an angular frequency (rad/us); `g2` is a
/// dimensionless multiplier of `H(t)` whose numeric value is the quoted
/// `G₂` in rad/us.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub g1: f64,
    pub g2: f64,
    #[serde(default)]
    pub env_initial: EnvInitial,
}

impl NoiseParams {
    pub fn new(g1: f64, g2: f64) -> Self {
        Self { g1, g2, env_initial: EnvInitial::Ground }
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g1", self.g1), ("g2", self.g2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta on the equation of motion.
    #[default]
    Rk4,
    /// `exp(−iH(t + h/2)h)` per step.
    ExpmMidpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Largest step, us. Each interval between breakpoints is split evenly.
    pub dt: f64,
    pub integrator: Integrator,
    /// Number of evenly spaced output samples over the gate (≥ 2).
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 2e-3, integrator: Integrator::Rk4, samples: 201, tolerances: Tolerances::default() }
    }
}

impl SimConfig {
    /// Step validator: `dt ≤ (1/50)·2π/f_max`.
    pub fn check_step(&self, max_frequency: f64) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", "must be positive"));
        }
        if max_frequency > 0.0 {
            let max = 2.0 * std::f64::consts::PI / (50.0 * max_frequency);
            if self.dt > max {
                return Err(Error::StepTooLarge { dt: self.dt, max });
            }
        }
        Ok(())
    }

    /// Copy with `dt` lowered, if needed, to satisfy the step validator.
    pub fn fit_step(&self, max_frequency: f64) -> Self {
        let mut out = self.clone();
        if max_frequency > 0.0 {
            out.dt = out.dt.min(2.0 * std::f64::consts::PI / (50.0 * max_frequency));
        }
        out
    }

    pub fn sample_times(&self, t_end: f64) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
    }
}

type OpFn = dyn Fn(f64) -> Result<ComplexOperator> + Send + Sync;

/// Time-dependent operator `t ↦ H(t)` with an upper bound on its largest
/// frequency (norm plus explicit phase rates) and the times at which it
/// may be discontinuous.
#[derive(Clone)]
pub struct TimeOperator {
    space: HilbertSpace,
    max_frequency: f64,
    breakpoints: Vec<f64>,
    f: Arc<OpFn>,
}

impl std::fmt::Debug for TimeOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeOperator")
            .field("space", &self.space)
            .field("max_frequency", &self.max_frequency)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl TimeOperator {
    pub fn new(
        space: HilbertSpace,
        max_frequency: f64,
        breakpoints: Vec<f64>,
        f: impl Fn(f64) -> Result<ComplexOperator> + Send + Sync + 'static,
    ) -> Self {
        Self { space, max_frequency, breakpoints, f: Arc::new(f) }
    }

    pub fn constant(h: ComplexOperator) -> Self {
        let space = h.space().clone();
        let norm = h.op_norm();
        Self::new(space, norm, Vec::new(), move |_| Ok(h.clone()))
    }

    pub fn at(&self, t: f64) -> Result<ComplexOperator> {
        let h = (self.f)(t)?;
        if h.space() != &self.space {
            return Err(Error::SpaceMismatch(self.space.dims().to_vec(), h.space().dims().to_vec()));
        }
        Ok(h)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn max_frequency(&self) -> f64 {
        self.max_frequency
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// `t ↦ H(t)⊗I + G₁ I⊗S + G₂ H(t)⊗S` on `[system] ⊗ [environment qubit]`.
pub fn compose_total(h_sys: &TimeOperator, noise: &NoiseParams) -> Result<TimeOperator> {
    compose_total_split(h_sys, h_sys, noise)
}

/// Like [`compose_total`] but with the applied control and the operator
/// the environment couples to given separately:
/// `control(t)⊗I + G₁ I⊗S + G₂ nominal(t)⊗S`.
pub fn compose_total_split(control: &TimeOperator, nominal: &TimeOperator, noise: &NoiseParams) -> Result<TimeOperator> {
    noise.validate()?;
    if control.space() != nominal.space() {
        return Err(Error::SpaceMismatch(control.space().dims().to_vec(), nominal.space().dims().to_vec()));
    }
    let env = HilbertSpace::qubit();
    let space = control.space().concat(&env)?;
    let s = sigma_sum();
    let id_e = identity(2)?;
    let h_e = tensor(&ComplexOperator::identity(control.space()), &s)?.scale_re(noise.g1);
    let root3 = 3f64.sqrt();
    let max_frequency = control.max_frequency() + root3 * (noise.g2 * nominal.max_frequency() + noise.g1);
    let mut breakpoints = control.breakpoints().to_vec();
    breakpoints.extend_from_slice(nominal.breakpoints());
    let (control, nominal, g2) = (control.clone(), nominal.clone(), noise.g2);
    let same = Arc::ptr_eq(&control.f, &nominal.f);
    Ok(TimeOperator::new(space, max_frequency, breakpoints, move |t| {
        let hc = control.at(t)?;
        let mut total = &tensor(&hc, &id_e)? + &h_e;
        if g2 != 0.0 {
            let hn = if same { hc } else { nominal.at(t)? };
            total = &total + &tensor(&hn, &s)?.scale_re(g2);
        }
        Ok(total)
    }))
}
