//! Universal dynamical-decoupling sequences built from instantaneous
//! `−iσ` pulses, their injection into a gate evolution, and the
//! first-order decoupling error of a pulse window.

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::qops::{c, expm, identity, sigma_x, sigma_y, sigma_z, tensor, CMatrix, ComplexOperator, HilbertSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> ComplexOperator {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// `exp(−iπσ/2) = −iσ` on a single qubit.
pub fn pulse_unitary(axis: Axis) -> ComplexOperator {
    axis.pauli().scale(c(0.0, -1.0))
}

/// Where pulses act inside a larger system space.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseTarget {
    /// The whole space is one qubit.
    Qubit,
    /// A two-state logical subspace of `space`; every other basis state is
    /// left untouched.
    Subspace { space: HilbertSpace, levels: [usize; 2] },
    /// `σ ⊗ I` on two logical qubits.
    FirstQubit,
}

impl PulseTarget {
    pub fn subspace(space: HilbertSpace, levels: [usize; 2]) -> Result<Self> {
        if levels[0] == levels[1] || levels.iter().any(|&l| l >= space.dim()) {
            return Err(Error::param("levels", format!("invalid logical levels {levels:?}")));
        }
        Ok(PulseTarget::Subspace { space, levels })
    }

    pub fn space(&self) -> HilbertSpace {
        match self {
            PulseTarget::Qubit => HilbertSpace::qubit(),
            PulseTarget::Subspace { space, .. } => space.clone(),
            PulseTarget::FirstQubit => HilbertSpace::new(vec![2, 2]).expect("static"),
        }
    }

    /// Pulse unitary on the system space.
    pub fn pulse(&self, axis: Axis) -> ComplexOperator {
        let p = pulse_unitary(axis);
        match self {
            PulseTarget::Qubit => p,
            PulseTarget::FirstQubit => tensor(&p, &identity(2).expect("dim 2")).expect("small"),
            PulseTarget::Subspace { space, levels } => {
                let n = space.dim();
                let mut m = CMatrix::identity(n, n);
                for (i, &li) in levels.iter().enumerate() {
                    for (j, &lj) in levels.iter().enumerate() {
                        m[(li, lj)] = p.get(i, j);
                    }
                }
                ComplexOperator::new(space.clone(), m).expect("shape from space")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceLabel {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "XY4")]
    Xy4,
    #[serde(rename = "XY8")]
    Xy8,
    #[serde(rename = "XY12")]
    Xy12,
    #[serde(rename = "ZXZX")]
    Zxzx,
}

impl SequenceLabel {
    pub const LADDER: [SequenceLabel; 4] = [SequenceLabel::None, SequenceLabel::Xy4, SequenceLabel::Xy8, SequenceLabel::Xy12];

    pub fn label(self) -> &'static str {
        match self {
            SequenceLabel::None => "none",
            SequenceLabel::Xy4 => "XY4",
            SequenceLabel::Xy8 => "XY8",
            SequenceLabel::Xy12 => "XY12",
            SequenceLabel::Zxzx => "ZXZX",
        }
    }

    fn cycles_per_period(self) -> usize {
        match self {
            SequenceLabel::None => 0,
            SequenceLabel::Xy4 | SequenceLabel::Zxzx => 1,
            SequenceLabel::Xy8 => 2,
            SequenceLabel::Xy12 => 3,
        }
    }
}

impl fmt::Display for SequenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SequenceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(SequenceLabel::None),
            "XY4" | "XY-4" => Ok(SequenceLabel::Xy4),
            "XY8" | "XY-8" => Ok(SequenceLabel::Xy8),
            "XY12" | "XY-12" => Ok(SequenceLabel::Xy12),
            "ZXZX" => Ok(SequenceLabel::Zxzx),
            _ => Err(Error::InvalidSequence(format!("unknown label `{s}`"))),
        }
    }
}

/// Axis pattern inside each four-pulse cycle of XY8/XY12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisOrder {
    /// Every cycle is `X Y X Y`.
    #[default]
    Repeat,
    /// Literature XY8 `XYXY YXYX`; XY12 appends another `XYXY`.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DDPulse {
    pub time_fraction: f64,
    pub axis: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DDSequence {
    pub label: SequenceLabel,
    pub periods: usize,
    pub pulses: Vec<DDPulse>,
}

impl DDSequence {
    pub fn none() -> Self {
        Self { label: SequenceLabel::None, periods: 0, pulses: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Ordered product of the single-qubit pulses, latest on the left.
    pub fn net_product(&self) -> ComplexOperator {
        self.pulses
            .iter()
            .fold(identity(2).expect("dim 2"), |acc, p| &pulse_unitary(p.axis) * &acc)
    }

    /// Checks fraction ordering and that the pulses multiply to a phase
    /// times the identity.
    pub fn validate(&self) -> Result<()> {
        let mut last = 0.0;
        for p in &self.pulses {
            if !(p.time_fraction > last && p.time_fraction < 1.0) {
                return Err(Error::InvalidSequence(format!(
                    "time fraction {} not strictly increasing inside (0, 1)",
                    p.time_fraction
                )));
            }
            last = p.time_fraction;
        }
        let net = self.net_product();
        let phase = net.get(0, 0);
        let dev = (net.matrix() - CMatrix::identity(2, 2) * phase).norm();
        if (phase.norm() - 1.0).abs() > 1e-12 || dev > 1e-12 {
            return Err(Error::InvalidSequence(format!("{} pulses do not multiply to the identity", self.label)));
        }
        Ok(())
    }
}

/// Builds `label` repeated `periods` times with the default axis order.
pub fn make_sequence(label: SequenceLabel, periods: usize) -> Result<DDSequence> {
    make_sequence_with(label, periods, AxisOrder::Repeat)
}

/// Places `cycles = cycles_per_period · periods` four-pulse cycles evenly
/// over the window, with the pulses of cycle `k` at
/// `(k + (2j+1)/8) / cycles`, `j = 0..3`.
pub fn make_sequence_with(label: SequenceLabel, periods: usize, order: AxisOrder) -> Result<DDSequence> {
    if label == SequenceLabel::None {
        return Ok(DDSequence::none());
    }
    if periods == 0 {
        return Err(Error::InvalidSequence("periods must be at least 1".into()));
    }
    use Axis::*;
    let xyxy = [X, Y, X, Y];
    let yxyx = [Y, X, Y, X];
    let cycles = label.cycles_per_period() * periods;
    let per_cycle = label.cycles_per_period();
    let mut pulses = Vec::with_capacity(4 * cycles);
    for k in 0..cycles {
        let axes = match (label, order) {
            (SequenceLabel::Zxzx, _) => [X, Z, X, Z],
            (_, AxisOrder::Standard) if k % per_cycle == 1 => yxyx,
            _ => xyxy,
        };
        for (j, axis) in axes.into_iter().enumerate() {
            let time_fraction = (k as f64 + (2 * j + 1) as f64 / 8.0) / cycles as f64;
            pulses.push(DDPulse { time_fraction, axis });
        }
    }
    let seq = DDSequence { label, periods, pulses };
    seq.validate()?;
    Ok(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectionMode {
    /// Pulses only; the control Hamiltonian is left as designed.
    Naive,
    /// Between pulses the control is conjugated by the accumulated pulse
    /// product, so the noiseless net evolution is the unprotected gate.
    #[default]
    Toggled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEvent {
    /// us
    pub time: f64,
    pub axis: Axis,
    pub unitary: ComplexOperator,
}

/// Pulse events placed on a gate of duration `T`, plus the frame
/// `P_k` (product of the first `k` pulses) in force after each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub mode: InjectionMode,
    pub events: Vec<PulseEvent>,
    frames: Vec<ComplexOperator>,
}

impl Injection {
    /// Empty injection on `space`.
    pub fn none(space: &HilbertSpace) -> Self {
        Self { mode: InjectionMode::Naive, events: Vec::new(), frames: vec![ComplexOperator::identity(space)] }
    }

    pub fn event_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    /// Accumulated pulse product in force at `t` (events at exactly `t`
    /// count as applied).
    pub fn frame_at(&self, t: f64) -> &ComplexOperator {
        let k = self.events.partition_point(|e| e.time <= t);
        &self.frames[k]
    }

    /// Control Hamiltonian actually applied at `t`: `P_k H P_k†` in toggled
    /// mode, `H` otherwise.
    pub fn applied_control(&self, h: &ComplexOperator, t: f64) -> Result<ComplexOperator> {
        match self.mode {
            InjectionMode::Naive => Ok(h.clone()),
            InjectionMode::Toggled => h.conjugate_by(self.frame_at(t)),
        }
    }

    /// Product of all pulses, proportional to the identity on the pulse
    /// subspace.
    pub fn net_frame(&self) -> &ComplexOperator {
        self.frames.last().expect("at least the identity frame")
    }
}

/// Places `seq` on a gate of duration `duration` whose segment boundaries
/// are `boundaries`. A pulse that lands on a boundary is moved later by
/// `1e-9·T`.
pub fn inject(
    duration: f64,
    boundaries: &[f64],
    seq: &DDSequence,
    mode: InjectionMode,
    target: &PulseTarget,
) -> Result<Injection> {
    if !(duration > 0.0) {
        return Err(Error::param("duration", "gate duration must be positive"));
    }
    seq.validate()?;
    let space = target.space();
    let mut events: Vec<PulseEvent> = Vec::with_capacity(seq.len());
    for p in &seq.pulses {
        let mut time = p.time_fraction * duration;
        if boundaries.iter().any(|&b| (b - time).abs() <= 1e-12 * duration) {
            warn!("DD pulse at t = {time} collides with a segment boundary; shifted by 1e-9 T");
            time += 1e-9 * duration;
        }
        if let Some(prev) = events.last() {
            if time <= prev.time {
                return Err(Error::InvalidSequence(format!("overlapping pulses at t = {time}")));
            }
        }
        events.push(PulseEvent { time, axis: p.axis, unitary: target.pulse(p.axis) });
    }
    let mut frames = vec![ComplexOperator::identity(&space)];
    for e in &events {
        let next = &e.unitary * frames.last().expect("non-empty");
        frames.push(next);
    }
    Ok(Injection { mode, events, frames })
}

/// Time order of the window `Z f X f Z f X f` (read right to
/// left).
pub const ZXZX_WINDOW: [Axis; 4] = [Axis::X, Axis::Z, Axis::X, Axis::Z];

/// Propagator of the window `P_n f … P_1 f` with
/// `f = exp(−iτ(Σ σ^α ⊗ B^α + I ⊗ H_e))`.
pub fn window_propagator(axes: &[Axis], tau: f64, coupling: [&ComplexOperator; 3], env: &ComplexOperator) -> Result<ComplexOperator> {
    let h = system_environment(coupling, env)?;
    let f = expm(&h.scale(c(0.0, -tau)))?;
    let id_e = ComplexOperator::identity(env.space());
    let mut u = ComplexOperator::identity(h.space());
    for &a in axes {
        let p = tensor(&pulse_unitary(a), &id_e)?;
        u = &p * &(&f * &u);
    }
    Ok(u)
}

fn system_environment(coupling: [&ComplexOperator; 3], env: &ComplexOperator) -> Result<ComplexOperator> {
    if env.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: env.dim() });
    }
    let mut h = tensor(&identity(2)?, env)?;
    for (axis, b) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(coupling) {
        if b.space() != env.space() {
            return Err(Error::DimensionMismatch { expected: env.dim(), got: b.dim() });
        }
        h = &h + &tensor(&axis.pauli(), b)?;
    }
    Ok(h)
}

/// Spectral-norm distance between the pulse-interleaved window and
/// `(ΠP)·exp(−i nτ I⊗H_e)`, `n = axes.len()`.
pub fn decoupling_error_for(axes: &[Axis], tau: f64, coupling: [&ComplexOperator; 3], env: &ComplexOperator) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", "must be positive"));
    }
    let window = window_propagator(axes, tau, coupling, env)?;
    let net = axes.iter().fold(identity(2)?, |acc, &a| &pulse_unitary(a) * &acc);
    let free = expm(&tensor(&identity(2)?, env)?.scale(c(0.0, -(axes.len() as f64) * tau)))?;
    let ideal = &tensor(&net, &ComplexOperator::identity(env.space()))? * &free;
    Ok((&window - &ideal).op_norm())
}

/// [`decoupling_error_for`] on the `ZXZX` window of length `4τ`.
pub fn decoupling_error(tau: f64, coupling: [&ComplexOperator; 3], env: &ComplexOperator) -> Result<f64> {
    decoupling_error_for(&ZXZX_WINDOW, tau, coupling, env)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::param("samples", "need at least two matching points"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::param("samples", "log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
