//! Gate runs: geometric schedule + model + DD + environment qubit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::{inject, DDSequence, Injection, InjectionMode, PulseTarget, SequenceLabel};
use crate::geometric::{target_unitary, GateKind, GateTiming, PathSchedule, ThetaProfile};
use crate::qops::{partial_trace, state_fidelity, tensor_density, HilbertSpace, StateVector, C64, I};
use crate::siv::{build_four_level_hamiltonian, drive_for_logical_coupling, logical_indices, SystemParams};
use crate::{Error, Result};

use super::engine::{propagate_liouville, propagate_states, Diagnostics, Event};
use super::{compose_total_split, NoiseParams, SimConfig, TimeOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateModel {
    /// Logical 2×2 (one qubit) or 4×4 (two qubits) Hamiltonian.
    #[default]
    Effective,
    /// Four SiV levels plus a truncated phonon mode, single qubit only.
    FourLevel,
}

/// Everything needed to build the system Hamiltonian of one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSetup {
    pub kind: GateKind,
    pub model: GateModel,
    pub params: SystemParams,
    pub schedule: PathSchedule,
}

impl GateSetup {
    /// Canonical schedule for `kind`, timed at the largest coupling the
    /// parameters allow: `|Ω_eff|` for one qubit, `O_eff` for iSWAP.
    pub fn new(kind: GateKind, model: GateModel, params: SystemParams, profile: ThetaProfile) -> Result<Self> {
        params.validate()?;
        let omega_max = match kind {
            GateKind::Iswap => params.o_eff()?,
            _ => params.omega_eff()?.norm(),
        };
        let schedule = kind.schedule(&GateTiming::new(profile, omega_max))?;
        Self::with_schedule(kind, model, params, schedule)
    }

    /// Custom schedule; `kind` decides the qubit count and labelling.
    pub fn with_schedule(kind: GateKind, model: GateModel, params: SystemParams, schedule: PathSchedule) -> Result<Self> {
        params.validate()?;
        if model == GateModel::FourLevel {
            if kind == GateKind::Iswap {
                return Err(Error::Unsupported("iSWAP has no four-level model; use the effective model".into()));
            }
            if params.detuning_eff().abs() > 1e-12 {
                return Err(Error::Unsupported("four-level gates need δ = Δ₁".into()));
            }
            if schedule.segments().iter().any(|s| s.phi_end != s.phi_start) {
                return Err(Error::Unsupported("four-level gates cannot realize a detuning; φ must be piecewise constant".into()));
            }
        }
        Ok(Self { kind, model, params, schedule })
    }

    pub fn duration(&self) -> f64 {
        self.schedule.duration()
    }

    pub fn system_space(&self) -> HilbertSpace {
        match (self.model, self.kind) {
            (GateModel::FourLevel, _) => HilbertSpace::new(vec![4, self.params.n_max + 1]).expect("valid params"),
            (_, GateKind::Iswap) => HilbertSpace::new(vec![2, 2]).expect("static"),
            _ => HilbertSpace::qubit(),
        }
    }

    /// Flat indices of the logical basis states inside [`Self::system_space`].
    pub fn logical_levels(&self) -> Vec<usize> {
        match (self.model, self.kind) {
            (GateModel::FourLevel, _) => logical_indices(&self.system_space()).expect("fock ≥ 2").to_vec(),
            (_, GateKind::Iswap) => vec![0, 1, 2, 3],
            _ => vec![0, 1],
        }
    }

    pub fn logical_labels(&self) -> Vec<&'static str> {
        match self.kind {
            GateKind::Iswap => vec!["00", "01", "10", "11"],
            _ => vec!["0", "1"],
        }
    }

    pub fn pulse_target(&self) -> Result<PulseTarget> {
        match (self.model, self.kind) {
            (GateModel::FourLevel, _) => {
                let l = self.logical_levels();
                PulseTarget::subspace(self.system_space(), [l[0], l[1]])
            }
            (_, GateKind::Iswap) => Ok(PulseTarget::FirstQubit),
            _ => Ok(PulseTarget::Qubit),
        }
    }

    /// `|0⟩_L`, or `|01⟩_L` for two qubits.
    pub fn initial_state(&self) -> Result<StateVector> {
        let space = self.system_space();
        let index = match self.kind {
            GateKind::Iswap => 1,
            _ => self.logical_levels()[0],
        };
        StateVector::basis(&space, index)
    }

    /// `U(T)|ψ(0)⟩` with `U` the target of the schedule.
    pub fn ideal_final_state(&self) -> Result<StateVector> {
        let u = target_unitary(&self.schedule.target(self.kind.qubit_count())?);
        match self.model {
            GateModel::Effective => self.initial_state()?.apply(&u),
            GateModel::FourLevel => {
                let l = self.logical_levels();
                let mut amps = nalgebra::DVector::from_element(self.system_space().dim(), C64::default());
                amps[l[0]] = u.get(0, 0);
                amps[l[1]] = u.get(1, 0);
                StateVector::normalize(self.system_space(), amps)
            }
        }
    }

    /// Nominal system Hamiltonian `H(t)`.
    pub fn hamiltonian(&self) -> TimeOperator {
        let schedule = self.schedule.clone();
        let space = self.system_space();
        let peak = schedule.peak_rabi();
        let breakpoints = schedule.boundaries();
        let p = self.params;
        match (self.model, self.kind) {
            (GateModel::Effective, GateKind::Iswap) => {
                let beat = p.lambda1 - p.lambda2;
                TimeOperator::new(space, peak + beat.abs(), breakpoints, move |t| {
                    let mut f = schedule.control_fields(t)?;
                    f.omega *= (I * beat * t).exp();
                    Ok(f.exchange_hamiltonian())
                })
            }
            (GateModel::Effective, _) => {
                TimeOperator::new(space, peak, breakpoints, move |t| Ok(schedule.control_fields(t)?.qubit_hamiltonian()))
            }
            (GateModel::FourLevel, _) => {
                let ph = p.phonons();
                let kappa = crate::siv::effective_factor(&ph, p.delta).expect("validated");
                let fast = p.delta_big1.abs().max(p.delta_big2.abs()).max(p.delta.abs());
                let bound = fast + 2.0 * p.g * (p.n_max as f64).sqrt() + peak / kappa.abs();
                TimeOperator::new(space, bound, breakpoints, move |t| {
                    let f = schedule.control_fields(t)?;
                    let drive = drive_for_logical_coupling(f.omega, &ph, p.delta)?;
                    build_four_level_hamiltonian(t, drive, &ph, p.delta)
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub gate: GateKind,
    pub model: GateModel,
    pub dd: SequenceLabel,
    pub periods: usize,
    pub mode: InjectionMode,
    pub noise: NoiseParams,
    /// us
    pub duration: f64,
    pub dt: f64,
}

/// Outcome of one gate run. Populations are taken in the pulse frame
/// (`P_k† ρ P_k`), so between pulses they follow the unprotected gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `populations[k][i]`: logical state `k` at `times[i]`.
    pub populations: Vec<Vec<f64>>,
    pub leakage_trace: Vec<f64>,
    /// Population outside the logical subspace at `T`.
    pub leakage: f64,
    /// `⟨ψ(t)|ρ(t)|ψ(t)⟩` against the noiseless trajectory with the same pulses.
    pub fidelity_trace: Vec<f64>,
    /// `⟨ψ_ideal|ρ(T)|ψ_ideal⟩`, `ψ_ideal = U(T)ψ(0)`.
    pub final_fidelity: f64,
    pub diagnostics: Diagnostics,
    pub metadata: RunMetadata,
}

impl FidelityReport {
    /// Largest `|Σ populations + leakage − 1|` over the grid.
    pub fn normalization_error(&self) -> f64 {
        (0..self.times.len())
            .map(|i| {
                let sum: f64 = self.populations.iter().map(|p| p[i]).sum::<f64>() + self.leakage_trace[i];
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn events_of(injection: &Injection) -> Vec<Event> {
    injection.events.iter().map(|e| Event { time: e.time, unitary: e.unitary.clone() }).collect()
}

/// Applied control: the nominal `H(t)` re-expressed in the pulse frame in
/// toggled mode.
fn applied(nominal: &TimeOperator, injection: &Injection) -> TimeOperator {
    if injection.mode == InjectionMode::Naive || injection.events.is_empty() {
        return nominal.clone();
    }
    let (h, inj) = (nominal.clone(), injection.clone());
    let mut breakpoints = nominal.breakpoints().to_vec();
    breakpoints.extend(injection.event_times());
    TimeOperator::new(nominal.space().clone(), nominal.max_frequency(), breakpoints, move |t| {
        inj.applied_control(&h.at(t)?, t)
    })
}

/// Runs one gate with `seq` injected under `mode` and the environment
/// qubit coupled through `noise`.
pub fn run_gate(
    setup: &GateSetup,
    seq: &DDSequence,
    mode: InjectionMode,
    noise: &NoiseParams,
    cfg: &SimConfig,
) -> Result<FidelityReport> {
    noise.validate()?;
    let duration = setup.duration();
    let target = setup.pulse_target()?;
    let injection = inject(duration, &setup.schedule.boundaries(), seq, mode, &target)?;
    let nominal = setup.hamiltonian();
    let control = applied(&nominal, &injection);
    let total = compose_total_split(&control, &nominal, noise)?;
    let events = events_of(&injection);

    let psi0 = setup.initial_state()?;
    let rho0 = tensor_density(&psi0.to_density(), &noise.env_initial.density())?;
    let times = cfg.sample_times(duration);
    let run = propagate_liouville(&total, &rho0, &times, &events, cfg)?;
    let reference = propagate_states(&control, &psi0, &times, &events, cfg)?;

    let levels = setup.logical_levels();
    let keep: Vec<usize> = (0..setup.system_space().subsystems()).collect();
    let mut populations = vec![Vec::with_capacity(times.len()); levels.len()];
    let mut leakage_trace = Vec::with_capacity(times.len());
    let mut fidelity_trace = Vec::with_capacity(times.len());
    let mut last = None;
    for ((t, rho), psi) in times.iter().zip(&run.states).zip(&reference) {
        let sys = partial_trace(rho, &keep)?;
        let framed = sys.evolve(&injection.frame_at(*t).dagger())?;
        let pops = framed.populations();
        let mut inside = 0.0;
        for (series, &l) in populations.iter_mut().zip(&levels) {
            series.push(pops[l]);
            inside += pops[l];
        }
        leakage_trace.push((sys.trace() - inside).max(0.0));
        fidelity_trace.push(state_fidelity(psi, &sys)?);
        last = Some(sys);
    }
    let last = last.ok_or_else(|| Error::param("samples", "need at least one sample"))?;
    let final_fidelity = state_fidelity(&setup.ideal_final_state()?, &last)?;
    let leakage = *leakage_trace.last().expect("non-empty");
    Ok(FidelityReport {
        times,
        labels: setup.logical_labels().into_iter().map(String::from).collect(),
        populations,
        leakage_trace,
        leakage,
        fidelity_trace,
        final_fidelity,
        diagnostics: run.diagnostics,
        metadata: RunMetadata {
            gate: setup.kind,
            model: setup.model,
            dd: seq.label,
            periods: seq.periods,
            mode,
            noise: *noise,
            duration,
            dt: cfg.dt,
        },
    })
}

/// Final fidelities on a `(G₁, G₂)` grid; `fidelity[i][j]` belongs to
/// `(g1[i], g2[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSurface {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub fidelity: Vec<Vec<f64>>,
    pub diagnostics: Vec<Vec<Diagnostics>>,
}

impl SweepSurface {
    /// `(g1, g2, F)` rows, `g2` varying fastest.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.g1
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.g2.iter().enumerate().map(move |(j, &b)| (a, b, self.fidelity[i][j])))
    }
}

/// `run_gate` over every grid cell, in parallel. `env` supplies the
/// environment initial state; its `g1`/`g2` are ignored.
pub fn sweep(
    setup: &GateSetup,
    seq: &DDSequence,
    mode: InjectionMode,
    g1: &[f64],
    g2: &[f64],
    env: &NoiseParams,
    cfg: &SimConfig,
) -> Result<SweepSurface> {
    if g1.is_empty() || g2.is_empty() {
        return Err(Error::param("range", "sweep ranges must be non-empty"));
    }
    let cells: Vec<(usize, usize)> = (0..g1.len()).flat_map(|i| (0..g2.len()).map(move |j| (i, j))).collect();
    let results: Vec<(f64, Diagnostics)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let noise = NoiseParams { g1: g1[i], g2: g2[j], env_initial: env.env_initial };
            run_gate(setup, seq, mode, &noise, cfg).map(|r| (r.final_fidelity, r.diagnostics))
        })
        .collect::<Result<_>>()?;
    let mut fidelity = vec![vec![0.0; g2.len()]; g1.len()];
    let mut diagnostics = vec![vec![Diagnostics::default(); g2.len()]; g1.len()];
    for (&(i, j), (f, d)) in cells.iter().zip(results) {
        fidelity[i][j] = f;
        diagnostics[i][j] = d;
    }
    Ok(SweepSurface { g1: g1.to_vec(), g2: g2.to_vec(), fidelity, diagnostics })
}
