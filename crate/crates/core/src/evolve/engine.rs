//! Fixed-step integrators with instantaneous unitary events.

use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::qops::{identity, tensor, CMatrix, ComplexOperator, DensityMatrix, HilbertSpace, StateVector, C64};
use crate::{Error, Result};

use super::{Integrator, SimConfig, TimeOperator};

/// Instantaneous unitary applied at `time`. The unitary may act on a
/// leading factor of the propagation space; it is then extended by the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub unitary: ComplexOperator,
}

/// Conservation record over the sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_drift: f64,
    pub min_eigenvalue: f64,
    pub steps: usize,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self { max_trace_drift: 0.0, max_hermiticity_drift: 0.0, min_eigenvalue: f64::INFINITY, steps: 0 }
    }
}

impl Diagnostics {
    /// Fails when the run drifted past the propagation tolerances.
    pub fn check(&self, tol: &crate::Tolerances, t: f64) -> Result<()> {
        let reason = if self.max_trace_drift > tol.trace_drift {
            format!("trace drifted by {:e}", self.max_trace_drift)
        } else if self.max_hermiticity_drift > tol.hermiticity_drift {
            format!("Hermiticity drifted by {:e}", self.max_hermiticity_drift)
        } else if self.min_eigenvalue < tol.positivity {
            format!("eigenvalue {:e} below positivity bound", self.min_eigenvalue)
        } else {
            return Ok(());
        };
        Err(Error::Propagation { t, source: Box::new(Error::InvalidState(reason)) })
    }

    fn record(&mut self, rho: &CMatrix) {
        let trace: C64 = rho.trace();
        self.max_trace_drift = self.max_trace_drift.max((trace - 1.0).norm());
        let skew = rho - rho.adjoint();
        self.max_hermiticity_drift = self.max_hermiticity_drift.max(skew.norm());
        let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm).eigenvalues;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        self.min_eigenvalue = self.min_eigenvalue.min(min);
    }
}

#[derive(Debug, Clone)]
pub struct LiouvilleRun {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Action {
    /// `Ẏ = −iHY`
    Left,
    /// `Ẏ = −i[H, Y]`
    Commutator,
}

fn lift(event: &Event, space: &HilbertSpace) -> Result<CMatrix> {
    let u = &event.unitary;
    if u.space() == space {
        return Ok(u.matrix().clone());
    }
    let (head, rest) = (u.space().dims(), space.dims());
    if rest.len() > head.len() && &rest[..head.len()] == head {
        let tail: usize = rest[head.len()..].iter().product();
        return Ok(tensor(u, &identity(tail)?)?.into_matrix());
    }
    Err(Error::SpaceMismatch(space.dims().to_vec(), u.space().dims().to_vec()))
}

fn minus_i(m: &CMatrix) -> CMatrix {
    m.map(|z| C64::new(z.im, -z.re))
}

fn derivative(h: &CMatrix, y: &CMatrix, action: Action) -> CMatrix {
    match action {
        Action::Left => minus_i(&(h * y)),
        Action::Commutator => minus_i(&(h * y - y * h)),
    }
}

struct Engine<'a> {
    h: &'a TimeOperator,
    cfg: &'a SimConfig,
    action: Action,
    steps: usize,
}

impl Engine<'_> {
    /// H at `t`, pulled into the open interval `(a, b)` so that piecewise
    /// definitions are sampled on the side that owns the step.
    fn h_at(&self, t: f64, a: f64, b: f64) -> Result<CMatrix> {
        let eps = 1e-10 * (b - a);
        let tc = t.clamp(a + eps, b - eps);
        let h = self.h.at(tc)?;
        if !h.is_finite() {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        Ok(h.into_matrix())
    }

    fn advance(&mut self, y: &mut CMatrix, a: f64, b: f64) -> Result<()> {
        let len = b - a;
        if len <= 0.0 {
            return Ok(());
        }
        let n = ((len / self.cfg.dt).ceil() as usize).max(1);
        let step = len / n as f64;
        let mut h_start = match self.cfg.integrator {
            Integrator::Rk4 => Some(self.h_at(a, a, b)?),
            Integrator::ExpmMidpoint => None,
        };
        for k in 0..n {
            let t = a + k as f64 * step;
            match self.cfg.integrator {
                Integrator::Rk4 => {
                    let h0 = h_start.take().expect("carried between steps");
                    let hm = self.h_at(t + 0.5 * step, a, b)?;
                    let h1 = self.h_at(t + step, a, b)?;
                    let half = C64::new(0.5 * step, 0.0);
                    let full = C64::new(step, 0.0);
                    let k1 = derivative(&h0, y, self.action);
                    let k2 = derivative(&hm, &(&*y + &k1 * half), self.action);
                    let k3 = derivative(&hm, &(&*y + &k2 * half), self.action);
                    let k4 = derivative(&h1, &(&*y + &k3 * full), self.action);
                    let sum = k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4;
                    *y += sum * C64::new(step / 6.0, 0.0);
                    h_start = Some(h1);
                }
                Integrator::ExpmMidpoint => {
                    let hm = self.h_at(t + 0.5 * step, a, b)?;
                    let e = (hm * C64::new(0.0, -step)).exp();
                    *y = match self.action {
                        Action::Left => &e * &*y,
                        Action::Commutator => &e * &*y * e.adjoint(),
                    };
                }
            }
            self.steps += 1;
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Propagation { t: b, source: Box::new(Error::NonFinite("state")) });
        }
        Ok(())
    }
}

/// Integrates `y` from `0` through every sample time, applying events in
/// between, and hands each sample to `visit`.
fn drive(
    h: &TimeOperator,
    mut y: CMatrix,
    samples: &[f64],
    events: &[Event],
    cfg: &SimConfig,
    action: Action,
    mut visit: impl FnMut(f64, &CMatrix) -> Result<()>,
) -> Result<usize> {
    cfg.check_step(h.max_frequency())?;
    if samples.iter().any(|t| !t.is_finite() || *t < 0.0) || samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("samples", "sample times must be finite, non-negative and sorted"));
    }
    if events.windows(2).any(|w| w[1].time < w[0].time) {
        return Err(Error::InvalidSequence("events must be sorted by time".into()));
    }
    let space = h.space();
    let lifted: Vec<(f64, CMatrix)> =
        events.iter().map(|e| Ok((e.time, lift(e, space)?))).collect::<Result<_>>()?;
    let end = samples.last().copied().unwrap_or(0.0);

    let mut points: Vec<f64> = vec![0.0, end];
    points.extend(samples);
    points.extend(lifted.iter().map(|e| e.0).filter(|&t| t <= end));
    points.extend(h.breakpoints().iter().copied().filter(|&t| t > 0.0 && t < end));
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * end.max(1.0));

    let mut engine = Engine { h, cfg, action, steps: 0 };
    let (mut next_event, mut next_sample) = (0usize, 0usize);
    let mut t = 0.0;
    for &p in &points {
        engine.advance(&mut y, t, p).map_err(|e| match e {
            Error::Propagation { .. } => e,
            other => Error::Propagation { t: p, source: Box::new(other) },
        })?;
        t = p;
        let tol = 1e-14 * end.max(1.0);
        while next_event < lifted.len() && lifted[next_event].0 <= t + tol {
            let u = &lifted[next_event].1;
            y = match action {
                Action::Left => u * &y,
                Action::Commutator => u * &y * u.adjoint(),
            };
            next_event += 1;
        }
        while next_sample < samples.len() && samples[next_sample] <= t + tol {
            visit(samples[next_sample], &y)?;
            next_sample += 1;
        }
    }
    debug!("propagated to t = {end} in {} steps", engine.steps);
    Ok(engine.steps)
}

/// Liouville–von Neumann propagation `ρ̇ = −i[H(t), ρ]` with `ρ ← UρU†` at
/// each event; returns `ρ` at every sample time.
pub fn propagate_liouville(
    h: &TimeOperator,
    rho0: &DensityMatrix,
    samples: &[f64],
    events: &[Event],
    cfg: &SimConfig,
) -> Result<LiouvilleRun> {
    if rho0.space() != h.space() {
        return Err(Error::SpaceMismatch(h.space().dims().to_vec(), rho0.space().dims().to_vec()));
    }
    rho0.validate(&cfg.tolerances)?;
    let mut states = Vec::with_capacity(samples.len());
    let mut diagnostics = Diagnostics::default();
    let space = h.space().clone();
    let steps = drive(h, rho0.matrix().clone(), samples, events, cfg, Action::Commutator, |_, y| {
        diagnostics.record(y);
        states.push(DensityMatrix::new_unchecked(space.clone(), y.clone()));
        Ok(())
    })?;
    diagnostics.steps = steps;
    diagnostics.check(&cfg.tolerances, samples.last().copied().unwrap_or(0.0))?;
    Ok(LiouvilleRun { times: samples.to_vec(), states, diagnostics })
}

/// Pure-state propagation `ψ̇ = −iH(t)ψ` with `ψ ← Uψ` at each event.
pub fn propagate_states(
    h: &TimeOperator,
    psi0: &StateVector,
    samples: &[f64],
    events: &[Event],
    cfg: &SimConfig,
) -> Result<Vec<StateVector>> {
    if psi0.space() != h.space() {
        return Err(Error::SpaceMismatch(h.space().dims().to_vec(), psi0.space().dims().to_vec()));
    }
    let mut out = Vec::with_capacity(samples.len());
    let y0 = DMatrix::from_column_slice(psi0.space().dim(), 1, psi0.amplitudes().as_slice());
    let space = h.space().clone();
    drive(h, y0, samples, events, cfg, Action::Left, |_, y| {
        out.push(StateVector::from_raw(space.clone(), y.column(0).into_owned()));
        Ok(())
    })?;
    Ok(out)
}

/// Full propagator `U(t_end)` including events.
pub fn propagator(h: &TimeOperator, t_end: f64, events: &[Event], cfg: &SimConfig) -> Result<ComplexOperator> {
    let mut out = None;
    let y0 = ComplexOperator::identity(h.space()).into_matrix();
    drive(h, y0, &[t_end], events, cfg, Action::Left, |_, y| {
        out = Some(y.clone());
        Ok(())
    })?;
    ComplexOperator::new(h.space().clone(), out.expect("one sample"))
}
