//! Experiment configuration: one JSON document, every field optional.
//! Frequencies are given as value/2π with the unit in the key name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use geomdd_core::dd::{InjectionMode, SequenceLabel};
use geomdd_core::evolve::{EnvInitial, GateModel, Integrator, NoiseParams, SimConfig};
use geomdd_core::geometric::{GateKind, ThetaProfile};
use geomdd_core::siv::{SystemParams, WaveguideParams};
use geomdd_core::{khz, mhz, Tolerances};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CompareModels,
    #[default]
    GateFidelity,
    RobustnessSweep,
    DdScaling,
    WaveguideG,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::CompareModels => "compare-models",
            Experiment::GateFidelity => "gate-fidelity",
            Experiment::RobustnessSweep => "robustness-sweep",
            Experiment::DdScaling => "dd-scaling",
            Experiment::WaveguideG => "waveguide-g",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub omega_mhz: f64,
    pub g_mhz: f64,
    pub delta1_mhz: f64,
    pub delta2_mhz: f64,
    pub delta_mhz: f64,
    pub lambda1_mhz: f64,
    pub lambda2_mhz: f64,
    pub n_max: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            omega_mhz: 10.0,
            g_mhz: 5.0,
            delta1_mhz: 100.0,
            delta2_mhz: 500.0,
            delta_mhz: 100.0,
            lambda1_mhz: 5.0,
            lambda2_mhz: 5.0,
            n_max: 2,
        }
    }
}

impl SystemConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            omega: mhz(self.omega_mhz),
            g: mhz(self.g_mhz),
            delta_big1: mhz(self.delta1_mhz),
            delta_big2: mhz(self.delta2_mhz),
            delta: mhz(self.delta_mhz),
            lambda1: mhz(self.lambda1_mhz),
            lambda2: mhz(self.lambda2_mhz),
            n_max: self.n_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub g1_khz: f64,
    pub g2_khz: f64,
    pub env_initial: EnvInitial,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { g1_khz: 40.0, g2_khz: 40.0, env_initial: EnvInitial::Ground }
    }
}

impl NoiseConfig {
    pub fn params(&self) -> NoiseParams {
        NoiseParams { g1: khz(self.g1_khz), g2: khz(self.g2_khz), env_initial: self.env_initial }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSettings {
    pub dt_us: f64,
    pub integrator: Integrator,
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for SimSettings {
    fn default() -> Self {
        let d = SimConfig::default();
        Self { dt_us: d.dt, integrator: d.integrator, samples: d.samples, tolerances: d.tolerances }
    }
}

impl SimSettings {
    pub fn config(&self) -> SimConfig {
        SimConfig { dt: self.dt_us, integrator: self.integrator, samples: self.samples, tolerances: self.tolerances }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    /// Two SiV centers instead of one.
    pub two_qubit: bool,
    /// Window length; one effective Rabi period (single) or one exchange
    /// period (two-qubit) when absent.
    pub duration_us: Option<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { two_qubit: false, duration_us: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Grid points per axis, the first being zero noise.
    pub points: usize,
    /// Smallest and largest non-zero noise as multiples of `noise.*_khz`.
    pub min_factor: f64,
    pub max_factor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { points: 11, min_factor: 0.2, max_factor: 2.0 }
    }
}

impl SweepConfig {
    /// `{0}` followed by `points − 1` log-spaced values in
    /// `[min_factor, max_factor] × reference`.
    pub fn grid(&self, reference: f64) -> Vec<f64> {
        let mut g = vec![0.0];
        let n = self.points.saturating_sub(1);
        let (lo, hi) = (self.min_factor * reference, self.max_factor * reference);
        g.extend((0..n).map(|k| if n == 1 { hi } else { lo * (hi / lo).powf(k as f64 / (n - 1) as f64) }));
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub tau_min_us: f64,
    pub tau_max_us: f64,
    pub points: usize,
    pub seed: u64,
    /// Largest entry magnitude of the random couplings and environment
    /// Hamiltonian, rad/us.
    pub coupling_scale: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { tau_min_us: 1e-3, tau_max_us: 1e-1, points: 9, seed: 0, coupling_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveguideConfig {
    pub length_um: f64,
    pub width_nm: f64,
    pub thickness_nm: f64,
    pub youngs_modulus_gpa: f64,
    pub poisson_ratio: f64,
    pub density_kg_m3: f64,
    /// Strain susceptibility `d/2π` in MHz per unit strain.
    pub strain_sensitivity_mhz: f64,
    pub coupling_profile: f64,
    pub mode_frequency_ghz: f64,
}

impl Default for WaveguideConfig {
    fn default() -> Self {
        let w = WaveguideParams::default();
        Self {
            length_um: w.length * 1e6,
            width_nm: 80.0,
            thickness_nm: 80.0,
            youngs_modulus_gpa: w.youngs_modulus * 1e-9,
            poisson_ratio: w.poisson_ratio,
            density_kg_m3: w.mass_density,
            strain_sensitivity_mhz: geomdd_core::to_mhz(w.strain_sensitivity),
            coupling_profile: w.coupling_profile,
            mode_frequency_ghz: 46.0,
        }
    }
}

impl WaveguideConfig {
    pub fn params(&self) -> WaveguideParams {
        WaveguideParams {
            length: self.length_um * 1e-6,
            cross_section: self.width_nm * 1e-9 * self.thickness_nm * 1e-9,
            youngs_modulus: self.youngs_modulus_gpa * 1e9,
            poisson_ratio: self.poisson_ratio,
            mass_density: self.density_kg_m3,
            strain_sensitivity: mhz(self.strain_sensitivity_mhz),
            coupling_profile: self.coupling_profile,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub system: SystemConfig,
    pub gate: GateKind,
    pub model: GateModel,
    pub profile: ThetaProfile,
    /// Sequence for single-sequence runs (the protected two-qubit comparison).
    pub dd: SequenceLabel,
    /// Sequences compared by `gate-fidelity` and `robustness-sweep`.
    pub dd_levels: Vec<SequenceLabel>,
    pub dd_periods: usize,
    pub injection: InjectionMode,
    pub noise: NoiseConfig,
    pub sim: SimSettings,
    pub compare: CompareConfig,
    pub sweep: SweepConfig,
    pub scaling: ScalingConfig,
    pub waveguide: WaveguideConfig,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::default(),
            system: SystemConfig::default(),
            gate: GateKind::Not,
            model: GateModel::Effective,
            profile: ThetaProfile::SineRamp,
            dd: SequenceLabel::Xy12,
            dd_levels: SequenceLabel::LADDER.to_vec(),
            dd_periods: 3,
            injection: InjectionMode::Toggled,
            noise: NoiseConfig::default(),
            sim: SimSettings::default(),
            compare: CompareConfig::default(),
            sweep: SweepConfig::default(),
            scaling: ScalingConfig::default(),
            waveguide: WaveguideConfig::default(),
            output: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Reads `path` (or the defaults) and applies `key=value` overrides,
    /// where `key` is a dotted path and `value` is JSON (bare words are
    /// taken as strings).
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => "{}".to_string(),
        };
        let name = path.map(|p| p.display().to_string()).unwrap_or_else(|| "<defaults>".into());
        let parsed: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        if overrides.is_empty() {
            parsed.validate()?;
            return Ok(parsed);
        }
        let mut doc = serde_json::to_value(&parsed).map_err(|e| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = serde_json::from_value(doc).map_err(|e| CliError::Config(format!("after --set overrides: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.system.params().validate().map_err(|e| CliError::Config(format!("system: {e}")))?;
        self.noise.params().validate().map_err(|e| CliError::Config(format!("noise: {e}")))?;
        self.waveguide.params().validate().map_err(|e| CliError::Config(format!("waveguide: {e}")))?;
        if !(self.sim.dt_us > 0.0) {
            return bad(format!("sim.dt_us must be positive, got {}", self.sim.dt_us));
        }
        if self.sim.samples < 2 {
            return bad("sim.samples must be at least 2".into());
        }
        if self.dd_periods == 0 {
            return bad("dd_periods must be at least 1".into());
        }
        if self.dd_levels.is_empty() {
            return bad("dd_levels must not be empty".into());
        }
        if self.sweep.points < 2 || !(self.sweep.min_factor > 0.0) || !(self.sweep.max_factor >= self.sweep.min_factor) {
            return bad("sweep needs points >= 2 and 0 < min_factor <= max_factor".into());
        }
        let s = &self.scaling;
        if !(s.tau_min_us > 0.0) || !(s.tau_max_us >= 100.0 * s.tau_min_us) || s.points < 2 {
            return bad("scaling needs 0 < tau_min_us, tau_max_us >= 100 tau_min_us (two decades) and points >= 2".into());
        }
        if !(s.coupling_scale >= 0.0) {
            return bad("scaling.coupling_scale must be non-negative".into());
        }
        if !(self.waveguide.mode_frequency_ghz > 0.0) {
            return bad("waveguide.mode_frequency_ghz must be positive".into());
        }
        if let Some(d) = self.compare.duration_us {
            if !(d > 0.0) {
                return bad("compare.duration_us must be positive".into());
            }
        }
        Ok(())
    }
}

fn apply_override(doc: &mut Value, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{spec}`")))?;
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("--set {key}: `{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            if !obj.contains_key(*part) {
                return Err(CliError::Config(format!("--set {key}: unknown key `{part}`")));
            }
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .get_mut(*part)
            .ok_or_else(|| CliError::Config(format!("--set {key}: unknown key `{part}`")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_reference_parameter_set() {
        let p = ExperimentConfig::default().system.params();
        assert_eq!(p, SystemParams::default());
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.noise.g2_khz = 1.0 / 3.0;
        cfg.compare.duration_us = Some(2.5);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let path = std::env::temp_dir().join(format!("geomdd-config-{}.json", std::process::id()));
        std::fs::write(&path, "{\n  \"gate\": \"not\",\n  \"nosie\": {}\n}\n").unwrap();
        let err = ExperimentConfig::load(Some(&path), &[]).unwrap_err();
        std::fs::remove_file(&path).ok();
        let msg = err.to_string();
        assert!(msg.contains("nosie") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn overrides_follow_dotted_paths() {
        let cfg = ExperimentConfig::load(None, &["noise.g1_khz=1".into(), "gate=iswap".into(), "dd=XY8".into()]).unwrap();
        assert_eq!(cfg.noise.g1_khz, 1.0);
        assert_eq!(cfg.gate, GateKind::Iswap);
        assert_eq!(cfg.dd, SequenceLabel::Xy8);
        assert!(ExperimentConfig::load(None, &["noise.g3_khz=1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["gate=toffoli".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["noise".into()]).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        assert!(ExperimentConfig::load(None, &["noise.g1_khz=-1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["scaling.tau_max_us=0.005".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["sim.samples=1".into()]).is_err());
    }

    #[test]
    fn sweep_grid_starts_at_zero() {
        let g = SweepConfig::default().grid(40.0);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 8.0).abs() < 1e-12);
        assert!((g[10] - 80.0).abs() < 1e-9);
    }
}
