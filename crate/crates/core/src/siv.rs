//! Driven SiV centers in a phononic waveguide: ground-level energies,
//! effective couplings and Hamiltonian builders at three levels of
//! reduction.
//!
//! Level labels `|1⟩..|4⟩` map to indices `0..3`. Builders return operators
//! on `[levels] ⊗ [Fock(n_max + 1)]` unless stated otherwise.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::qops::{c, destroy, identity, ket_bra, tensor, tensor_all, ComplexOperator, HilbertSpace, C64, I};
use crate::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SivParams {
    pub lambda_so: f64,
    pub upsilon_x: f64,
    pub upsilon_y: f64,
    pub omega_b: f64,
    pub omega_x: f64,
}

impl SivParams {
    /// `Δ = sqrt(λ_SO² + 4(Υx² + Υy²))`.
    pub fn big_delta(&self) -> f64 {
        (self.lambda_so.powi(2) + 4.0 * (self.upsilon_x.powi(2) + self.upsilon_y.powi(2))).sqrt()
    }

    /// `(η₊, η₋)` with `η± = ½ ωx / (Δ ± ωB)`.
    pub fn etas(&self) -> Result<(f64, f64)> {
        let d = self.big_delta();
        if !(d > 0.0) {
            return Err(Error::param("lambda_so", "Δ must be positive"));
        }
        let plus = 0.5 * self.omega_x / (d + self.omega_b);
        let minus = 0.5 * self.omega_x / (d - self.omega_b);
        for (name, eta) in [("η+", plus), ("η-", minus)] {
            if !eta.is_finite() || eta.abs() >= 1.0 {
                return Err(Error::Perturbative(format!("|{name}| = {} must be < 1", eta.abs())));
            }
        }
        Ok((plus, minus))
    }
}

/// Which η multiplies ωx in ω₃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Omega3Eta {
    /// `η₊`.
    #[default]
    EtaPlus,
    /// `η₋`, following the pairing of the other three levels.
    Paired,
}

/// Approximate ground-level energies `ω₁..ω₄`.
pub fn ground_energies(p: &SivParams, variant: Omega3Eta) -> Result<[f64; 4]> {
    let (ep, em) = p.etas()?;
    let d = p.big_delta();
    let (wb, wx) = (p.omega_b, p.omega_x);
    let eta3 = match variant {
        Omega3Eta::EtaPlus => ep,
        Omega3Eta::Paired => em,
    };
    Ok([
        -(d + wb) / 2.0 - ep * wx / 2.0,
        -(d - wb) / 2.0 - em * wx / 2.0,
        (d - wb) / 2.0 + eta3 * wx / 2.0,
        (d + wb) / 2.0 + ep * wx / 2.0,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveParams {
    pub omega_a2: C64,
    pub omega_a3: C64,
    pub delta1: f64,
    pub delta: f64,
}

impl DriveParams {
    /// Large-detuning check: error below 5× the strongest Rabi frequency,
    /// warning below 10×.
    pub fn check_detuning(&self) -> Result<()> {
        let rabi = self.omega_a2.norm().max(self.omega_a3.norm());
        let ratio = self.delta1.abs() / rabi;
        if rabi > 0.0 && ratio < 5.0 {
            return Err(Error::Perturbative(format!("δ₁ is only {ratio:.2}× the Rabi frequency")));
        }
        if rabi > 0.0 && ratio < 10.0 {
            warn!("δ₁ is only {ratio:.2}× the Rabi frequency; elimination of |A⟩ is marginal");
        }
        Ok(())
    }
}

/// Two-photon Raman Rabi frequency `Ω = −Ω*_A2 Ω_A3 (2δ₁+δ) / (4δ₁(δ₁+δ))`.
pub fn raman_rabi(d: &DriveParams) -> Result<C64> {
    if d.delta1 == 0.0 || d.delta1 + d.delta == 0.0 {
        return Err(Error::param("delta1", "δ₁ and δ₁+δ must be nonzero"));
    }
    d.check_detuning()?;
    let num = 2.0 * d.delta1 + d.delta;
    let den = 4.0 * d.delta1 * (d.delta1 + d.delta);
    Ok(-d.omega_a2.conj() * d.omega_a3 * (num / den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononParams {
    pub g: f64,
    pub delta_big1: f64,
    pub delta_big2: f64,
    pub n_max: usize,
}

impl PhononParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::param("n_max", "Fock truncation must be at least 1"));
        }
        if !self.g.is_finite() || !self.delta_big1.is_finite() || !self.delta_big2.is_finite() {
            return Err(Error::NonFinite("phonon parameters"));
        }
        Ok(())
    }

    pub fn fock_levels(&self) -> usize {
        self.n_max + 1
    }
}

/// Coupling factor `κ = g(Δ₁+δ)/(2Δ₁δ)` so that `Ω_eff = Ω κ`.
pub fn effective_factor(ph: &PhononParams, delta: f64) -> Result<f64> {
    if ph.delta_big1 == 0.0 || delta == 0.0 {
        return Err(Error::param("delta_big1", "Δ₁ and δ must be nonzero"));
    }
    Ok(ph.g * (ph.delta_big1 + delta) / (2.0 * ph.delta_big1 * delta))
}

/// `Ω_eff = Ω g (Δ₁+δ) / (2Δ₁δ)`.
pub fn effective_rabi(omega: C64, ph: &PhononParams, delta: f64) -> Result<C64> {
    Ok(omega * effective_factor(ph, delta)?)
}

/// Raman drive `Ω` that makes the four-level dynamics realize an effective
/// logical coupling `⟨1|H|0⟩ = target/2` on `{|1,1⟩, |2,0⟩}`.
///
/// Eliminating `|3,0⟩` yields `⟨1,1|H_eff|2,0⟩ = −Ωκ/2`; the sign is
/// opposite to the closed-form `Ω_eff` formula and is checked numerically in
/// the tests.
pub fn drive_for_logical_coupling(target: C64, ph: &PhononParams, delta: f64) -> Result<C64> {
    let k = effective_factor(ph, delta)?;
    if k == 0.0 {
        return Err(Error::param("g", "zero coupling cannot realize a drive"));
    }
    Ok(-target.conj() / k)
}

fn four_level_space(ph: &PhononParams) -> Result<HilbertSpace> {
    HilbertSpace::new(vec![4, ph.fock_levels()])
}

/// Interaction-picture Hamiltonian of one driven SiV coupled to a phonon
/// mode:
/// `g a (|3⟩⟨1| e^{iΔ₁t} + |4⟩⟨2| e^{iΔ₂t}) + (Ω/2)|3⟩⟨2| e^{iδt} + h.c.`
pub fn build_four_level_hamiltonian(t: f64, omega: C64, ph: &PhononParams, delta: f64) -> Result<ComplexOperator> {
    ph.validate()?;
    let lv = HilbertSpace::single(4)?;
    let a = destroy(ph.fock_levels())?;
    let id_f = identity(ph.fock_levels())?;
    let s31 = ket_bra(&lv, 2, 0)?.scale((I * ph.delta_big1 * t).exp());
    let s42 = ket_bra(&lv, 3, 1)?.scale((I * ph.delta_big2 * t).exp());
    let phonon = tensor(&(&s31 + &s42), &a)?.scale_re(ph.g);
    let drive = tensor(&ket_bra(&lv, 2, 1)?, &id_f)?.scale(omega * 0.5 * (I * delta * t).exp());
    let half = &phonon + &drive;
    let h = &half + &half.dagger();
    debug_assert_eq!(h.space(), &four_level_space(ph)?);
    Ok(h)
}

/// Effective Jaynes–Cummings Hamiltonian
/// `(Ω_eff/2) a† |1⟩⟨2| e^{iΔ_eff t} + h.c.` on `[levels 1,2] ⊗ [Fock]`.
pub fn build_effective_jc(t: f64, omega_eff: C64, detuning: f64, n_max: usize) -> Result<ComplexOperator> {
    if n_max < 1 {
        return Err(Error::param("n_max", "Fock truncation must be at least 1"));
    }
    let lv = HilbertSpace::qubit();
    let adag = destroy(n_max + 1)?.dagger();
    let half = tensor(&ket_bra(&lv, 0, 1)?, &adag)?.scale(omega_eff * 0.5 * (I * detuning * t).exp());
    Ok(&half + &half.dagger())
}

/// Flat indices of `|0⟩_L = |1,1⟩` and `|1⟩_L = |2,0⟩` for a
/// `[levels] ⊗ [Fock]` space.
pub fn logical_indices(space: &HilbertSpace) -> Result<[usize; 2]> {
    Ok([space.index(&[0, 1])?, space.index(&[1, 0])?])
}

/// `N_exc = |2⟩⟨2| ⊗ I + I ⊗ a†a` on `[levels 1,2] ⊗ [Fock]`.
pub fn jc_excitation_number(n_max: usize) -> Result<ComplexOperator> {
    let lv = HilbertSpace::qubit();
    let a = destroy(n_max + 1)?;
    let num = &a.dagger() * &a;
    Ok(&tensor(&ket_bra(&lv, 1, 1)?, &identity(n_max + 1)?)? + &tensor(&identity(2)?, &num)?)
}

/// Exchange strength `Ω_eff²(Λ₁+Λ₂)/(8Λ₁Λ₂)`, the modulus of the
/// `|01⟩_L ↔ |10⟩_L` matrix element (identical drives on both centers).
pub fn exchange_coupling(omega_eff: C64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if lambda1 == 0.0 || lambda2 == 0.0 {
        return Err(Error::param("lambda", "Λ₁ and Λ₂ must be nonzero"));
    }
    let ratio = lambda1.abs().min(lambda2.abs()) / omega_eff.norm();
    if omega_eff.norm() > 0.0 && ratio < 5.0 {
        warn!("Λ is only {ratio:.2}× Ω_eff; dispersive elimination is marginal");
    }
    Ok(omega_eff.norm_sqr() * (lambda1 + lambda2) / (8.0 * lambda1 * lambda2))
}

fn two_logical_space() -> HilbertSpace {
    HilbertSpace::new(vec![2, 2]).expect("static dims")
}

/// Dispersive two-qubit exchange Hamiltonian on `{|00⟩,|01⟩,|10⟩,|11⟩}_L`:
/// `−K e^{i(Λ₁−Λ₂)t} σ₁⁻σ₂⁺ + h.c.` with `K` from [`exchange_coupling`].
///
/// This is the interaction-picture form; [`two_qubit_rotating_frame`]
/// gives the equivalent static matrix with diagonal detunings.
pub fn build_two_qubit_effective(t: f64, omega_eff: C64, lambda1: f64, lambda2: f64) -> Result<ComplexOperator> {
    let k = exchange_coupling(omega_eff, lambda1, lambda2)?;
    let s = two_logical_space();
    let x = ket_bra(&s, 1, 2)?.scale(-k * (I * (lambda1 - lambda2) * t).exp());
    Ok(&x + &x.dagger())
}

/// Static rotating-frame form
/// `−[[0,0,0,0],[0,Λ₂−Λ₁,K,0],[0,K,Λ₁−Λ₂,0],[0,0,0,0]]`.
pub fn two_qubit_rotating_frame(omega_eff: C64, lambda1: f64, lambda2: f64) -> Result<ComplexOperator> {
    let k = exchange_coupling(omega_eff, lambda1, lambda2)?;
    let mut rows = [C64::default(); 16];
    rows[5] = c(-(lambda2 - lambda1), 0.0);
    rows[6] = c(-k, 0.0);
    rows[9] = c(-k, 0.0);
    rows[10] = c(-(lambda1 - lambda2), 0.0);
    ComplexOperator::from_rows(two_logical_space(), &rows)
}

/// Two SiV centers sharing one phonon mode, each with
/// `(Ω_eff/2) a† |1⟩⟨2| e^{iΛₙt} + h.c.`, on `[2] ⊗ [2] ⊗ [Fock]`.
pub fn build_two_qubit_full(t: f64, omega_eff: C64, lambda1: f64, lambda2: f64, n_max: usize) -> Result<ComplexOperator> {
    if n_max < 1 {
        return Err(Error::param("n_max", "Fock truncation must be at least 1"));
    }
    let q = HilbertSpace::qubit();
    let lower = ket_bra(&q, 0, 1)?;
    let id2 = identity(2)?;
    let adag = destroy(n_max + 1)?.dagger();
    let first = tensor_all(&[&lower, &id2, &adag])?.scale(omega_eff * 0.5 * (I * lambda1 * t).exp());
    let second = tensor_all(&[&id2, &lower, &adag])?.scale(omega_eff * 0.5 * (I * lambda2 * t).exp());
    let half = &first + &second;
    Ok(&half + &half.dagger())
}

/// Physical parameter set shared by the gate models. Angular frequencies
/// in rad/us; `omega` is the (real) Raman Rabi frequency `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega: f64,
    pub g: f64,
    pub delta_big1: f64,
    pub delta_big2: f64,
    pub delta: f64,
    /// Two-qubit dispersive detunings `Λ₁`, `Λ₂`.
    pub lambda1: f64,
    pub lambda2: f64,
    pub n_max: usize,
}

impl Default for SystemParams {
    /// `Ω/2π = 10 MHz`, `g/2π = 5 MHz`, `Δ₁/2π = 100 MHz`, `Δ₂/2π = 500 MHz`,
    /// `δ = Δ₁`, `Λ₁ = Λ₂ = 10 Ω_eff`, `n_max = 2`.
    fn default() -> Self {
        Self {
            omega: crate::mhz(10.0),
            g: crate::mhz(5.0),
            delta_big1: crate::mhz(100.0),
            delta_big2: crate::mhz(500.0),
            delta: crate::mhz(100.0),
            lambda1: crate::mhz(5.0),
            lambda2: crate::mhz(5.0),
            n_max: 2,
        }
    }
}

impl SystemParams {
    pub fn phonons(&self) -> PhononParams {
        PhononParams { g: self.g, delta_big1: self.delta_big1, delta_big2: self.delta_big2, n_max: self.n_max }
    }

    pub fn validate(&self) -> Result<()> {
        self.phonons().validate()?;
        let all = [self.omega, self.g, self.delta_big1, self.delta_big2, self.delta, self.lambda1, self.lambda2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("system parameters"));
        }
        effective_factor(&self.phonons(), self.delta)?;
        Ok(())
    }

    /// `Ω_eff` for the configured Raman drive.
    pub fn omega_eff(&self) -> Result<C64> {
        effective_rabi(c(self.omega, 0.0), &self.phonons(), self.delta)
    }

    /// `Δ_eff = δ − Δ₁`.
    pub fn detuning_eff(&self) -> f64 {
        self.delta - self.delta_big1
    }

    /// `O_eff = Ω_eff²(Λ₁+Λ₂)/(4Λ₁Λ₂)`, the two-qubit drive ceiling.
    pub fn o_eff(&self) -> Result<f64> {
        Ok(2.0 * exchange_coupling(self.omega_eff()?, self.lambda1, self.lambda2)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideParams {
    /// m
    pub length: f64,
    /// m²
    pub cross_section: f64,
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/m³
    pub mass_density: f64,
    /// Strain sensitivity `d` in rad/us.
    pub strain_sensitivity: f64,
    /// Dimensionless coupling profile `ξ`.
    pub coupling_profile: f64,
}

impl Default for WaveguideParams {
    fn default() -> Self {
        Self {
            length: 80e-6,
            cross_section: 80e-9 * 80e-9,
            youngs_modulus: 1050e9,
            poisson_ratio: 0.2,
            mass_density: 3500.0,
            strain_sensitivity: crate::mhz(1e9),
            coupling_profile: 1.0,
        }
    }
}

impl WaveguideParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("cross_section", self.cross_section),
            ("youngs_modulus", self.youngs_modulus),
            ("mass_density", self.mass_density),
            ("strain_sensitivity", self.strain_sensitivity),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return Err(Error::param("poisson_ratio", "must lie in (0, 0.5)"));
        }
        if !(self.coupling_profile >= 0.0) {
            return Err(Error::param("coupling_profile", "must be non-negative"));
        }
        Ok(())
    }

    /// Compression-branch sound speed `sqrt(E/ρ)` in m/s.
    pub fn compression_speed(&self) -> f64 {
        (self.youngs_modulus / self.mass_density).sqrt()
    }

    /// Wavenumber (1/m) of the compression mode at angular frequency
    /// `omega` (rad/us).
    pub fn compression_wavenumber(&self, omega: f64) -> f64 {
        omega * 1e6 / self.compression_speed()
    }
}

/// Strain coupling `g = d sqrt(ħk²/(2ρLAω)) ξ` in rad/us for wavenumber `k`
/// (1/m) and mode frequency `omega` (rad/us).
pub fn waveguide_coupling(w: &WaveguideParams, wavenumber: f64, mode_frequency: f64) -> Result<f64> {
    w.validate()?;
    if !(wavenumber > 0.0) || !(mode_frequency > 0.0) {
        return Err(Error::param("mode", "wavenumber and mode frequency must be positive"));
    }
    let omega_si = mode_frequency * 1e6;
    let inner = HBAR * wavenumber.powi(2) / (2.0 * w.mass_density * w.length * w.cross_section * omega_si);
    Ok(w.strain_sensitivity * inner.sqrt() * w.coupling_profile)
}
