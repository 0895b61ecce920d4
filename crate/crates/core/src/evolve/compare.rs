//! Full vs reduced model comparisons.

use serde::{Deserialize, Serialize};

use crate::dd::{inject, DDSequence, InjectionMode, PulseTarget};
use crate::qops::{partial_trace, tensor_density, HilbertSpace, StateVector};
use crate::siv::{
    build_effective_jc, build_four_level_hamiltonian, build_two_qubit_effective, build_two_qubit_full, logical_indices,
    SystemParams,
};
use crate::{Error, Result};

use super::engine::{propagate_liouville, propagate_states, Event};
use super::{compose_total_split, NoiseParams, SimConfig, TimeOperator};

/// Logical populations of two models on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `full[k][i]`: state `k` at `times[i]`.
    pub full: Vec<Vec<f64>>,
    pub effective: Vec<Vec<f64>>,
    pub max_abs_dev: f64,
}

impl ModelComparison {
    fn new(times: Vec<f64>, labels: &[&str], full: Vec<Vec<f64>>, effective: Vec<Vec<f64>>) -> Self {
        let max_abs_dev = full
            .iter()
            .zip(&effective)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        Self { times, labels: labels.iter().map(|s| s.to_string()).collect(), full, effective, max_abs_dev }
    }
}

fn pick(states: &[StateVector], levels: &[usize]) -> Vec<Vec<f64>> {
    levels
        .iter()
        .map(|&l| states.iter().map(|s| s.amplitudes()[l].norm_sqr()).collect())
        .collect()
}

/// Four-level+phonon model against the effective JC model from `|1,1⟩`
/// under a constant Raman drive, over `duration` us (default: one
/// effective Rabi period `2π/|Ω_eff|`). The step is lowered as needed for
/// the fast terms.
pub fn compare_single_qubit_models(params: &SystemParams, duration: Option<f64>, cfg: &SimConfig) -> Result<ModelComparison> {
    params.validate()?;
    let p = *params;
    let ph = p.phonons();
    let omega_eff = p.omega_eff()?;
    let period = match duration {
        Some(d) if d > 0.0 => d,
        Some(_) => return Err(Error::param("duration", "must be positive")),
        None if omega_eff.norm() == 0.0 => {
            return Err(Error::param("omega", "zero effective Rabi frequency has no period"));
        }
        None => 2.0 * std::f64::consts::PI / omega_eff.norm(),
    };
    let times = cfg.sample_times(period);
    let fock = ph.fock_levels() as f64;

    let full_space = HilbertSpace::new(vec![4, ph.fock_levels()])?;
    let fast = p.delta_big1.abs().max(p.delta_big2.abs()).max(p.delta.abs());
    let full = TimeOperator::new(full_space.clone(), fast + 2.0 * p.g * fock.sqrt() + p.omega.abs(), Vec::new(), move |t| {
        build_four_level_hamiltonian(t, crate::qops::c(p.omega, 0.0), &ph, p.delta)
    });
    let det = p.detuning_eff();
    let eff_space = HilbertSpace::new(vec![2, ph.fock_levels()])?;
    let n_max = p.n_max;
    let eff = TimeOperator::new(eff_space.clone(), det.abs() + omega_eff.norm() * fock.sqrt(), Vec::new(), move |t| {
        build_effective_jc(t, omega_eff, det, n_max)
    });

    let full_levels = logical_indices(&full_space)?;
    let eff_levels = logical_indices(&eff_space)?;
    let full_states = propagate_states(
        &full,
        &StateVector::basis(&full_space, full_levels[0])?,
        &times,
        &[],
        &cfg.fit_step(full.max_frequency()),
    )?;
    let eff_states =
        propagate_states(&eff, &StateVector::basis(&eff_space, eff_levels[0])?, &times, &[], &cfg.fit_step(eff.max_frequency()))?;
    Ok(ModelComparison::new(times, &["0", "1"], pick(&full_states, &full_levels), pick(&eff_states, &eff_levels)))
}

/// Two SiV centers sharing a phonon mode (constant drive `Ω_eff` on
/// both) against the noiseless dispersive exchange model, from `|01⟩_L`
/// over `duration` us.
///
/// The full model carries the environment qubit and `seq`, with pulses
/// `σ ⊗ I` on the first center; the effective model is the noise-free
/// reference. Populations of `|01⟩_L`, `|10⟩_L` are taken in the pulse
/// frame.
pub fn compare_two_qubit_models(
    params: &SystemParams,
    duration: f64,
    seq: &DDSequence,
    mode: InjectionMode,
    noise: &NoiseParams,
    cfg: &SimConfig,
) -> Result<ModelComparison> {
    params.validate()?;
    noise.validate()?;
    if !(duration > 0.0) {
        return Err(Error::param("duration", "must be positive"));
    }
    let p = *params;
    let omega_eff = p.omega_eff()?;
    let times = cfg.sample_times(duration);
    let fock = p.n_max + 1;

    let full_space = HilbertSpace::new(vec![2, 2, fock])?;
    let bound = p.lambda1.abs().max(p.lambda2.abs()) + omega_eff.norm() * (2.0 * fock as f64).sqrt();
    let nominal = TimeOperator::new(full_space.clone(), bound, Vec::new(), move |t| {
        build_two_qubit_full(t, omega_eff, p.lambda1, p.lambda2, p.n_max)
    });
    let injection = inject(duration, &[], seq, mode, &PulseTarget::FirstQubit)?;
    let events: Vec<Event> = injection.events.iter().map(|e| Event { time: e.time, unitary: e.unitary.clone() }).collect();
    let control = if mode == InjectionMode::Toggled && !events.is_empty() {
        let (h, inj) = (nominal.clone(), injection.clone());
        let lifted = move |t: f64| -> Result<crate::qops::ComplexOperator> {
            let frame = crate::qops::tensor(inj.frame_at(t), &crate::qops::identity(fock)?)?;
            h.at(t)?.conjugate_by(&frame)
        };
        TimeOperator::new(full_space.clone(), bound, injection.event_times(), lifted)
    } else {
        nominal.clone()
    };
    let total = compose_total_split(&control, &nominal, noise)?;
    let l01 = full_space.index(&[0, 1, 0])?;
    let l10 = full_space.index(&[1, 0, 0])?;
    let psi0 = StateVector::basis(&full_space, l01)?;
    let rho0 = tensor_density(&psi0.to_density(), &noise.env_initial.density())?;
    let run = propagate_liouville(&total, &rho0, &times, &events, &cfg.fit_step(total.max_frequency()))?;
    let mut full = vec![Vec::with_capacity(times.len()), Vec::with_capacity(times.len())];
    for (t, rho) in times.iter().zip(&run.states) {
        let sys = partial_trace(rho, &[0, 1, 2])?;
        let frame = crate::qops::tensor(injection.frame_at(*t), &crate::qops::identity(fock)?)?;
        let pops = sys.evolve(&frame.dagger())?.populations();
        full[0].push(pops[l01]);
        full[1].push(pops[l10]);
    }

    let eff_space = HilbertSpace::new(vec![2, 2])?;
    let beat = (p.lambda1 - p.lambda2).abs();
    let eff = TimeOperator::new(eff_space.clone(), beat + omega_eff.norm_sqr() / p.lambda1.abs().min(p.lambda2.abs()), Vec::new(), move |t| {
        build_two_qubit_effective(t, omega_eff, p.lambda1, p.lambda2)
    });
    let eff_states = propagate_states(&eff, &StateVector::basis(&eff_space, 1)?, &times, &[], &cfg.fit_step(eff.max_frequency()))?;
    Ok(ModelComparison::new(times, &["01", "10"], full, pick(&eff_states, &[1, 2])))
}
