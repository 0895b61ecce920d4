//! Bloch-sphere path programs and the reverse-engineered controls that
//! realize them.
//!
//! A path is a list of segments in `(θ, φ)` with `θ ∈ [0, π]`. Both angles
//! follow a common progress function `s(u)`, `u ∈ [0, 1]` the fraction of
//! the segment's duration. Azimuth jumps sit between segments, normally at a
//! pole where they cost nothing.
//!
//! For the auxiliary states `|φ₂⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩` and its
//! orthogonal partner, the Hamiltonian
//! `Δ(|1⟩⟨1| − |0⟩⟨0|) + [Ω/2 |1⟩⟨0| + h.c.]` with
//! `Ω = i e^{iφ}(θ̇ + i cosθ sinθ φ̇)` and `Δ = −½ sin²θ φ̇` drives the
//! auxiliary states along the path with no dynamical phase, so a cyclic path
//! produces `U = exp(−iγ n·σ)` with `γ = ½∮(1 − cosθ)dφ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::qops::{c, n_dot_sigma, ComplexOperator, HilbertSpace, StateVector, C64, I, ONE, ZERO};
use crate::{Error, Result};

const POLE_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaProfile {
    /// `s(u) = u`.
    Linear,
    /// `s(u) = u − sin(2πu)/2π`, so `ṡ ∝ sin²(πu)` starts and stops at zero.
    #[default]
    SineRamp,
}

impl ThetaProfile {
    /// `(s(u), ds/du)`.
    pub fn progress(self, u: f64) -> (f64, f64) {
        match self {
            ThetaProfile::Linear => (u, 1.0),
            ThetaProfile::SineRamp => {
                let w = 2.0 * PI * u;
                (u - w.sin() / (2.0 * PI), 1.0 - w.cos())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSegment {
    /// us
    pub duration: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    pub phi_start: f64,
    pub phi_end: f64,
    #[serde(default)]
    pub profile: ThetaProfile,
}

impl PathSegment {
    /// Segment at constant azimuth.
    pub fn polar(duration: f64, theta_start: f64, theta_end: f64, phi: f64, profile: ThetaProfile) -> Self {
        Self { duration, theta_start, theta_end, phi_start: phi, phi_end: phi, profile }
    }

    /// Segment whose duration is the shortest one keeping the generalized
    /// Rabi frequency `sqrt(|Ω|² + 4Δ²)` (the Bloch-sphere speed) at or below
    /// `omega_max`.
    pub fn with_ceiling(
        theta: (f64, f64),
        phi: (f64, f64),
        profile: ThetaProfile,
        omega_max: f64,
    ) -> Result<Self> {
        if !(omega_max > 0.0) {
            return Err(Error::param("omega_max", "drive ceiling must be positive"));
        }
        let mut seg = Self {
            duration: 1.0,
            theta_start: theta.0,
            theta_end: theta.1,
            phi_start: phi.0,
            phi_end: phi.1,
            profile,
        };
        const SAMPLES: usize = 2000;
        let peak = (0..=SAMPLES)
            .map(|k| seg.speed(k as f64 / SAMPLES as f64))
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidSchedule("segment does not move on the sphere".into()));
        }
        seg.duration = peak / omega_max;
        Ok(seg)
    }

    fn speed(&self, u: f64) -> f64 {
        let (s, ds) = self.profile.progress(u);
        let theta = self.theta_start + (self.theta_end - self.theta_start) * s;
        let dth = (self.theta_end - self.theta_start) * ds / self.duration;
        let dph = (self.phi_end - self.phi_start) * ds / self.duration;
        (dth * dth + (theta.sin() * dph).powi(2)).sqrt()
    }

    /// `(θ, φ, θ̇, φ̇)` at local time `tau` within the segment.
    pub fn angles(&self, tau: f64) -> (f64, f64, f64, f64) {
        let u = (tau / self.duration).clamp(0.0, 1.0);
        let (s, ds) = self.profile.progress(u);
        let dtheta = self.theta_end - self.theta_start;
        let dphi = self.phi_end - self.phi_start;
        (
            self.theta_start + dtheta * s,
            self.phi_start + dphi * s,
            dtheta * ds / self.duration,
            dphi * ds / self.duration,
        )
    }

    /// `½∫(1 − cosθ)dφ` along the segment; exact for any profile since both
    /// angles share the progress variable.
    pub fn solid_angle_half(&self) -> f64 {
        let dtheta = self.theta_end - self.theta_start;
        let dphi = self.phi_end - self.phi_start;
        if dphi == 0.0 {
            return 0.0;
        }
        if dtheta.abs() < 1e-14 {
            return 0.5 * dphi * (1.0 - self.theta_start.cos());
        }
        0.5 * dphi * (1.0 - (self.theta_end.sin() - self.theta_start.sin()) / dtheta)
    }
}

/// Azimuth discontinuity applied before segment `boundary` (or after the
/// last segment when `boundary == segments.len()`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiJump {
    pub boundary: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    segments: Vec<PathSegment>,
    #[serde(default)]
    phi_jumps: Vec<PhiJump>,
    #[serde(default)]
    allow_off_pole_jumps: bool,
}

/// Validated cyclic path program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleDoc", into = "ScheduleDoc")]
pub struct PathSchedule {
    segments: Vec<PathSegment>,
    phi_jumps: Vec<PhiJump>,
    allow_off_pole_jumps: bool,
    starts: Vec<f64>,
    total: f64,
}

impl TryFrom<ScheduleDoc> for PathSchedule {
    type Error = Error;

    fn try_from(doc: ScheduleDoc) -> Result<Self> {
        Self::build(doc.segments, doc.phi_jumps, doc.allow_off_pole_jumps)
    }
}

impl From<PathSchedule> for ScheduleDoc {
    fn from(s: PathSchedule) -> Self {
        Self { segments: s.segments, phi_jumps: s.phi_jumps, allow_off_pole_jumps: s.allow_off_pole_jumps }
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if (y + PI).abs() < 1e-15 { PI } else { y }
}

fn at_pole(theta: f64) -> bool {
    theta.sin().abs() < POLE_TOL
}

impl PathSchedule {
    /// Validates and builds a schedule whose jumps sit at poles.
    pub fn new(segments: Vec<PathSegment>, phi_jumps: Vec<PhiJump>) -> Result<Self> {
        Self::build(segments, phi_jumps, false)
    }

    /// Like [`PathSchedule::new`] but jumps may sit anywhere on the sphere.
    pub fn new_unrestricted(segments: Vec<PathSegment>, phi_jumps: Vec<PhiJump>) -> Result<Self> {
        Self::build(segments, phi_jumps, true)
    }

    fn build(segments: Vec<PathSegment>, mut phi_jumps: Vec<PhiJump>, allow_off_pole_jumps: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        for (k, s) in segments.iter().enumerate() {
            let finite = [s.duration, s.theta_start, s.theta_end, s.phi_start, s.phi_end]
                .iter()
                .all(|v| v.is_finite());
            if !finite {
                return Err(Error::NonFinite("path segment"));
            }
            if !(s.duration > 0.0) {
                return Err(Error::InvalidSchedule(format!("segment {k} has non-positive duration")));
            }
            let range = -ANGLE_TOL..=PI + ANGLE_TOL;
            if !range.contains(&s.theta_start) || !range.contains(&s.theta_end) {
                return Err(Error::InvalidSchedule(format!("segment {k} leaves θ ∈ [0, π]")));
            }
        }
        phi_jumps.sort_by_key(|j| j.boundary);
        let n = segments.len();
        for w in phi_jumps.windows(2) {
            if w[0].boundary == w[1].boundary {
                return Err(Error::InvalidSchedule(format!("two jumps at boundary {}", w[0].boundary)));
            }
        }
        for j in &phi_jumps {
            if j.boundary == 0 || j.boundary > n {
                return Err(Error::InvalidSchedule(format!("jump boundary {} out of range 1..={n}", j.boundary)));
            }
            let theta = segments[j.boundary - 1].theta_end;
            if !allow_off_pole_jumps && !at_pole(theta) {
                return Err(Error::InvalidSchedule(format!(
                    "φ jump at boundary {} where θ = {theta} is not a pole",
                    j.boundary
                )));
            }
        }
        let jump_at = |b: usize| phi_jumps.iter().find(|j| j.boundary == b).map_or(0.0, |j| j.delta);
        for k in 1..n {
            let (prev, next) = (&segments[k - 1], &segments[k]);
            if (prev.theta_end - next.theta_start).abs() > ANGLE_TOL {
                return Err(Error::InvalidSchedule(format!("θ discontinuous at boundary {k}")));
            }
            if wrap_angle(next.phi_start - prev.phi_end - jump_at(k)).abs() > ANGLE_TOL {
                return Err(Error::InvalidSchedule(format!("φ change at boundary {k} not matched by a jump")));
            }
        }
        let (first, last) = (&segments[0], &segments[n - 1]);
        if (first.theta_start - last.theta_end).abs() > ANGLE_TOL {
            return Err(Error::InvalidSchedule("path is not cyclic in θ".into()));
        }
        let phi_closed = wrap_angle(first.phi_start - last.phi_end - jump_at(n)).abs() <= ANGLE_TOL;
        if !phi_closed && first.theta_start.abs() > POLE_TOL {
            return Err(Error::InvalidSchedule("path is not cyclic in φ".into()));
        }

        let mut starts = Vec::with_capacity(n);
        let mut t = 0.0;
        for s in &segments {
            starts.push(t);
            t += s.duration;
        }
        Ok(Self { segments, phi_jumps, allow_off_pole_jumps, starts, total: t })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn phi_jumps(&self) -> &[PhiJump] {
        &self.phi_jumps
    }

    /// Gate duration `T` in us.
    pub fn duration(&self) -> f64 {
        self.total
    }

    /// Segment start times followed by `T`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = self.starts.clone();
        b.push(self.total);
        b
    }

    /// `(θ(0), φ(0))`.
    pub fn initial_angles(&self) -> (f64, f64) {
        (self.segments[0].theta_start, self.segments[0].phi_start)
    }

    /// Same path with every segment retimed under `timing`.
    pub fn retimed(&self, timing: &GateTiming) -> Result<Self> {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                PathSegment::with_ceiling(
                    (s.theta_start, s.theta_end),
                    (s.phi_start, s.phi_end),
                    timing.profile,
                    timing.omega_max,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(segments, self.phi_jumps.clone(), self.allow_off_pole_jumps)
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let eps = 1e-12 * self.total.max(1.0);
        if !(t >= -eps && t <= self.total + eps) {
            return Err(Error::OutsideSchedule { t, end: self.total });
        }
        let k = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        Ok((k, (t - self.starts[k]).max(0.0)))
    }

    /// `(θ, φ)` at time `t`.
    pub fn angles(&self, t: f64) -> Result<(f64, f64)> {
        let (k, tau) = self.locate(t)?;
        let (th, ph, _, _) = self.segments[k].angles(tau);
        Ok((th, ph))
    }

    /// Reverse-engineered drive at time `t`.
    pub fn control_fields(&self, t: f64) -> Result<ControlFields> {
        let (k, tau) = self.locate(t)?;
        let (th, ph, dth, dph) = self.segments[k].angles(tau);
        let omega = I * (I * ph).exp() * (c(dth, 0.0) + I * th.cos() * th.sin() * dph);
        let detuning = -0.5 * th.sin().powi(2) * dph;
        Ok(ControlFields { omega, detuning })
    }

    /// Upper bound on `sqrt(|Ω|² + 4Δ²)` over the schedule.
    pub fn peak_rabi(&self) -> f64 {
        const SAMPLES: usize = 400;
        self.segments
            .iter()
            .flat_map(|s| (0..=SAMPLES).map(move |k| s.speed(k as f64 / SAMPLES as f64)))
            .fold(0.0, f64::max)
    }

    /// `γ = ½∮(1 − cosθ)dφ`, jumps included.
    pub fn geometric_phase(&self) -> f64 {
        let along: f64 = self.segments.iter().map(PathSegment::solid_angle_half).sum();
        let jumps: f64 = self
            .phi_jumps
            .iter()
            .map(|j| 0.5 * (1.0 - self.segments[j.boundary - 1].theta_end.cos()) * j.delta)
            .sum();
        along + jumps
    }

    /// Target `exp(−iγ n·σ)` with `n` set by the starting point.
    pub fn target(&self, qubit_count: u8) -> Result<GateTarget> {
        let (th, ph) = self.initial_angles();
        GateTarget::new(self.geometric_phase(), bloch_axis(th, ph), qubit_count)
    }
}

/// `(sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn bloch_axis(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlFields {
    /// Complex Rabi frequency, rad/us.
    pub omega: C64,
    /// rad/us
    pub detuning: f64,
}

impl ControlFields {
    /// `Δ(|1⟩⟨1| − |0⟩⟨0|) + [Ω/2 |1⟩⟨0| + h.c.]` on one logical qubit.
    pub fn qubit_hamiltonian(&self) -> ComplexOperator {
        let d = c(self.detuning, 0.0);
        let w = self.omega * 0.5;
        ComplexOperator::from_rows(HilbertSpace::qubit(), &[-d, w.conj(), w, d]).expect("2x2")
    }

    /// The single-qubit form embedded in the exchange block
    /// `{|01⟩, |10⟩}` of two logical qubits (`|0⟩ ↦ |01⟩`, `|1⟩ ↦ |10⟩`).
    pub fn exchange_hamiltonian(&self) -> ComplexOperator {
        let mut rows = [ZERO; 16];
        let d = c(self.detuning, 0.0);
        let w = self.omega * 0.5;
        rows[5] = -d;
        rows[6] = w.conj();
        rows[9] = w;
        rows[10] = d;
        ComplexOperator::from_rows(HilbertSpace::new(vec![2, 2]).expect("static"), &rows).expect("4x4")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTarget {
    pub gamma: f64,
    pub axis: [f64; 3],
    pub qubit_count: u8,
}

impl GateTarget {
    pub fn new(gamma: f64, axis: [f64; 3], qubit_count: u8) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::param("axis", format!("must be a unit vector, norm is {norm}")));
        }
        if !(1..=2).contains(&qubit_count) {
            return Err(Error::param("qubit_count", "must be 1 or 2"));
        }
        Ok(Self { gamma, axis, qubit_count })
    }
}

/// `exp(−iγ n·σ)`; for two qubits the same 2×2 block acts on
/// `{|01⟩, |10⟩}` while `|00⟩` and `|11⟩` are left alone.
pub fn target_unitary(target: &GateTarget) -> ComplexOperator {
    let (s, co) = target.gamma.sin_cos();
    let u = &ComplexOperator::identity(&HilbertSpace::qubit()).scale_re(co) + &n_dot_sigma(target.axis).scale(c(0.0, -s));
    if target.qubit_count == 1 {
        return u;
    }
    let mut rows = [ZERO; 16];
    rows[0] = ONE;
    rows[15] = ONE;
    rows[5] = u.get(0, 0);
    rows[6] = u.get(0, 1);
    rows[9] = u.get(1, 0);
    rows[10] = u.get(1, 1);
    ComplexOperator::from_rows(HilbertSpace::new(vec![2, 2]).expect("static"), &rows).expect("4x4")
}

/// Auxiliary states `(|φ₁⟩, |φ₂⟩)` at `(θ, φ)`.
pub fn auxiliary_states(theta: f64, phi: f64) -> (StateVector, StateVector) {
    let (s, co) = (theta / 2.0).sin_cos();
    let q = HilbertSpace::qubit();
    let e = (I * phi).exp();
    let phi1 = StateVector::from_slice(q.clone(), &[e.conj() * s, c(-co, 0.0)]).expect("normalized");
    let phi2 = StateVector::from_slice(q, &[c(co, 0.0), e * s]).expect("normalized");
    (phi1, phi2)
}

/// Phase `γ` read off a propagated single-qubit unitary through
/// `⟨φ₂(0)|U|φ₂(0)⟩ = e^{−iγ}`.
pub fn propagated_phase(u: &ComplexOperator, theta0: f64, phi0: f64) -> Result<f64> {
    let (_, phi2) = auxiliary_states(theta0, phi0);
    let overlap = phi2.inner(&phi2.apply(u)?)?;
    Ok(-overlap.arg())
}

/// Drive ceiling and `θ̇` profile used to time a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateTiming {
    #[serde(default)]
    pub profile: ThetaProfile,
    /// Largest allowed `|Ω|`, rad/us.
    pub omega_max: f64,
}

impl GateTiming {
    pub fn new(profile: ThetaProfile, omega_max: f64) -> Self {
        Self { profile, omega_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseGateVariant {
    /// North pole to south pole and back, jump at the south pole.
    #[default]
    PoleToPole,
    /// `∫θ̇ = π/2` per half, as the constraint is stated; the jump then
    /// falls on the equator.
    QuarterTurn,
}

/// Phase gate `exp(−iπσ_z/4)`: down the meridian at `φ₀`, jump by `π/4`,
/// back up at `φ₀ + π/4`.
pub fn schedule_phase_gate(phi0: f64, timing: &GateTiming) -> Result<PathSchedule> {
    schedule_phase_gate_variant(phi0, PhaseGateVariant::PoleToPole, timing)
}

pub fn schedule_phase_gate_variant(phi0: f64, variant: PhaseGateVariant, timing: &GateTiming) -> Result<PathSchedule> {
    let turn = match variant {
        PhaseGateVariant::PoleToPole => PI,
        PhaseGateVariant::QuarterTurn => FRAC_PI_2,
    };
    let seg = |a, b, phi| PathSegment::with_ceiling((a, b), (phi, phi), timing.profile, timing.omega_max);
    let segments = vec![seg(0.0, turn, phi0)?, seg(turn, 0.0, phi0 + FRAC_PI_4)?];
    let jumps = vec![PhiJump { boundary: 1, delta: FRAC_PI_4 }];
    match variant {
        PhaseGateVariant::PoleToPole => PathSchedule::new(segments, jumps),
        PhaseGateVariant::QuarterTurn => PathSchedule::new_unrestricted(segments, jumps),
    }
}

/// NOT gate about `x` for `theta0 = π/2`: down to the south pole at `φ = 0`,
/// over to the north pole at `φ = π/2`, back down to `theta0` at `φ = 0`.
///
/// The middle leg is the nominal "`φ = −π/2` with `θ̇ > 0`" leg written in
/// canonical coordinates; both give identical control fields.
pub fn schedule_not_gate(theta0: f64, timing: &GateTiming) -> Result<PathSchedule> {
    if !(theta0 > POLE_TOL && theta0 < PI - POLE_TOL) {
        return Err(Error::param("theta0", "must lie strictly between the poles"));
    }
    three_leg(theta0, 0.0, FRAC_PI_2, timing)
}

/// iSWAP on the exchange block: the NOT construction started from
/// `(θ₀, φ₀) = (π/2, π)` with the middle leg at `φ = 3π/2`.
pub fn schedule_iswap(timing: &GateTiming) -> Result<PathSchedule> {
    three_leg(FRAC_PI_2, PI, -FRAC_PI_2, timing)
}

/// `θ₀ → π` at `φ₀`; jump `Δ`; `π → 0` at `φ₀ + Δ`; jump `−Δ`; `0 → θ₀` at
/// `φ₀`.
fn three_leg(theta0: f64, phi0: f64, delta: f64, timing: &GateTiming) -> Result<PathSchedule> {
    let seg = |a, b, phi| PathSegment::with_ceiling((a, b), (phi, phi), timing.profile, timing.omega_max);
    PathSchedule::new(
        vec![seg(theta0, PI, phi0)?, seg(PI, 0.0, phi0 + delta)?, seg(0.0, theta0, phi0)?],
        vec![PhiJump { boundary: 1, delta }, PhiJump { boundary: 2, delta: -delta }],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    Phase,
    Not,
    Iswap,
}

impl GateKind {
    pub const ALL: [GateKind; 3] = [GateKind::Phase, GateKind::Not, GateKind::Iswap];

    pub fn qubit_count(self) -> u8 {
        match self {
            GateKind::Iswap => 2,
            _ => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GateKind::Phase => "phase",
            GateKind::Not => "not",
            GateKind::Iswap => "iswap",
        }
    }

    /// Canonical schedule (`φ₀ = 0` for the phase gate, `θ₀ = π/2` for NOT).
    pub fn schedule(self, timing: &GateTiming) -> Result<PathSchedule> {
        match self {
            GateKind::Phase => schedule_phase_gate(0.0, timing),
            GateKind::Not => schedule_not_gate(FRAC_PI_2, timing),
            GateKind::Iswap => schedule_iswap(timing),
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests;
