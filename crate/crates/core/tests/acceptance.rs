//! Acceptance suite. Runs every exit criterion, prints one PASS/FAIL line
//! each and exits non-zero if any fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geomdd_core::dd::{decoupling_error, loglog_slope, make_sequence, DDSequence, InjectionMode, SequenceLabel};
use geomdd_core::evolve::{
    compare_single_qubit_models, propagator, run_gate, sweep, Diagnostics, FidelityReport, GateModel, GateSetup,
    NoiseParams, SimConfig,
};
use geomdd_core::geometric::{propagated_phase, GateKind, GateTiming, PathSchedule, ThetaProfile};
use geomdd_core::qops::{distance_up_to_phase, ComplexOperator, HilbertSpace, C64};
use geomdd_core::siv::SystemParams;
use geomdd_core::khz;

const PERIODS: usize = 3;
const LADDER_TOL: f64 = 0.03;

/// Conservation record of every Liouville run.
#[derive(Default)]
struct Conservation {
    runs: usize,
    trace: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
    normalization: f64,
}

impl Conservation {
    fn new() -> Self {
        Self { min_eigenvalue: f64::INFINITY, ..Self::default() }
    }

    fn diagnostics(&mut self, d: &Diagnostics) {
        self.runs += 1;
        self.trace = self.trace.max(d.max_trace_drift);
        self.hermiticity = self.hermiticity.max(d.max_hermiticity_drift);
        self.min_eigenvalue = self.min_eigenvalue.min(d.min_eigenvalue);
    }

    fn report(&mut self, r: &FidelityReport) {
        self.diagnostics(&r.diagnostics);
        self.normalization = self.normalization.max(r.normalization_error());
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn emit(id: usize, name: &str, o: &Outcome, elapsed: f64) {
    let mut out = std::io::stdout().lock();
    let tag = if o.pass { "PASS" } else { "FAIL" };
    writeln!(out, "criterion {id} [{tag}] {name} ({elapsed:.1} s): {}", o.detail).unwrap();
}

fn setup(kind: GateKind) -> GateSetup {
    GateSetup::new(kind, GateModel::Effective, SystemParams::default(), ThetaProfile::SineRamp).unwrap()
}

fn sim(kind: GateKind, samples: usize) -> SimConfig {
    let dt = if kind == GateKind::Iswap { 1e-2 } else { 2e-3 };
    SimConfig { dt, samples, ..SimConfig::default() }
}

fn noiseless_gates(log: &mut Conservation) -> Outcome {
    let mut worst = 1.0f64;
    let mut parts = Vec::new();
    for kind in GateKind::ALL {
        let r = run_gate(&setup(kind), &DDSequence::none(), InjectionMode::Toggled, &NoiseParams::noiseless(), &sim(kind, 41)).unwrap();
        log.report(&r);
        worst = worst.min(r.final_fidelity);
        parts.push(format!("{kind} F = {:.8}", r.final_fidelity));
    }
    Outcome { pass: worst >= 0.9999, detail: parts.join(", ") }
}

fn model_reduction() -> Outcome {
    let cfg = SimConfig { dt: 1e-3, samples: 401, ..SimConfig::default() };
    let cmp = compare_single_qubit_models(&SystemParams::default(), None, &cfg).unwrap();
    let period = cmp.times.last().copied().unwrap_or(0.0);
    Outcome {
        pass: cmp.max_abs_dev < 0.05,
        detail: format!("max |ΔP| = {:.4} over {period:.3} us (limit 0.05)", cmp.max_abs_dev),
    }
}

/// Final fidelities for (none, XY4, XY8, XY12).
fn ladder(kind: GateKind, g: f64, log: &mut Conservation) -> [f64; 4] {
    let noise = NoiseParams::new(g, g);
    let s = setup(kind);
    SequenceLabel::LADDER.map(|label| {
        let seq = make_sequence(label, PERIODS).unwrap();
        let r = run_gate(&s, &seq, InjectionMode::Toggled, &noise, &sim(kind, 41)).unwrap();
        log.report(&r);
        r.final_fidelity
    })
}

struct LadderCheck {
    within: bool,
    ordered: bool,
    text: String,
}

fn check_ladder(kind: GateKind, got: [f64; 4], expected: [f64; 3]) -> LadderCheck {
    let within = got[1..].iter().zip(expected).all(|(g, e)| (g - e).abs() <= LADDER_TOL);
    let ordered = got.windows(2).all(|w| w[0] < w[1]);
    let text = format!(
        "{kind} (none, XY4, XY8, XY12) = ({:.4}, {:.4}, {:.4}, {:.4}) [1 − F = {:.2e}, {:.2e}, {:.2e}, {:.2e}] vs ({}, {}, {}){}{}",
        got[0],
        got[1],
        got[2],
        got[3],
        1.0 - got[0],
        1.0 - got[1],
        1.0 - got[2],
        1.0 - got[3],
        expected[0],
        expected[1],
        expected[2],
        if within { "" } else { " outside ±0.03" },
        if ordered { ", strictly ordered" } else { ", NOT strictly ordered" },
    );
    LadderCheck { within, ordered, text }
}

fn ladder_outcome(checks: &[LadderCheck], fallback_ok: bool) -> Outcome {
    let ordered = checks.iter().all(|c| c.ordered);
    let within = checks.iter().all(|c| c.within);
    let pass = ordered && (within || fallback_ok);
    let mode = if within { "values within tolerance" } else if pass { "fallback: ordering + noiseless correctness" } else { "values and fallback both fail" };
    let body: Vec<&str> = checks.iter().map(|c| c.text.as_str()).collect();
    Outcome { pass, detail: format!("{mode}; {}", body.join("; ")) }
}

fn log_grid(reference: f64) -> Vec<f64> {
    let (lo, hi) = (0.2 * reference, 2.0 * reference);
    let mut g = vec![0.0];
    g.extend((0..10).map(|k| lo * (hi / lo).powf(k as f64 / 9.0)));
    g
}

fn dominance(log: &mut Conservation) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (kind, reference) in [(GateKind::Not, khz(40.0)), (GateKind::Phase, khz(40.0)), (GateKind::Iswap, khz(1.0))] {
        let grid = log_grid(reference);
        let s = setup(kind);
        let cfg = sim(kind, 11);
        let env = NoiseParams::default();
        let bare = sweep(&s, &DDSequence::none(), InjectionMode::Toggled, &grid, &grid, &env, &cfg).unwrap();
        let seq = make_sequence(SequenceLabel::Xy12, PERIODS).unwrap();
        let dd = sweep(&s, &seq, InjectionMode::Toggled, &grid, &grid, &env, &cfg).unwrap();
        for surface in [&bare, &dd] {
            surface.diagnostics.iter().flatten().for_each(|d| log.diagnostics(d));
        }
        let mut violations = 0;
        let mut margin = f64::INFINITY;
        for ((_, _, fb), (_, _, fd)) in bare.cells().zip(dd.cells()) {
            margin = margin.min(fd - fb);
            if fd < fb - 1e-9 {
                violations += 1;
            }
        }
        pass &= violations == 0;
        parts.push(format!("{kind}: {violations}/121 violations, min(F_XY12 − F_none) = {margin:.2e}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn random_hermitian(rng: &mut impl Rng) -> ComplexOperator {
    let a = DMatrix::from_fn(2, 2, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    ComplexOperator::new(HilbertSpace::qubit(), h).unwrap()
}

fn error_scaling() -> Outcome {
    let taus: Vec<f64> = (0..9).map(|k| 1e-3 * 10f64.powf(k as f64 / 4.0)).collect();
    let mut slopes = Vec::new();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<ComplexOperator> = (0..3).map(|_| random_hermitian(&mut rng)).collect();
        let env = random_hermitian(&mut rng);
        let errs: Vec<f64> = taus.iter().map(|&t| decoupling_error(t, [&b[0], &b[1], &b[2]], &env).unwrap()).collect();
        slopes.push(loglog_slope(&taus, &errs).unwrap());
    }
    let pass = slopes.iter().all(|s| (1.8..=2.2).contains(s));
    let list: Vec<String> = slopes.iter().map(|s| format!("{s:.4}")).collect();
    Outcome { pass, detail: format!("slopes over τ ∈ [1e-3, 1e-1]: [{}]", list.join(", ")) }
}

fn unitary_of(kind: GateKind, schedule: PathSchedule) -> ComplexOperator {
    let s = GateSetup::with_schedule(kind, GateModel::Effective, SystemParams::default(), schedule).unwrap();
    let cfg = SimConfig { dt: if kind == GateKind::Iswap { 5e-3 } else { 2.5e-4 }, ..SimConfig::default() };
    propagator(&s.hamiltonian(), s.duration(), &[], &cfg).unwrap()
}

fn wrapped(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn path_independence() -> Outcome {
    let p = SystemParams::default();
    let mut worst_u = 0.0f64;
    let mut worst_phase = 0.0f64;
    for kind in GateKind::ALL {
        let omega_max = match kind {
            GateKind::Iswap => p.o_eff().unwrap(),
            _ => p.omega_eff().unwrap().norm(),
        };
        let sine = kind.schedule(&GateTiming::new(ThetaProfile::SineRamp, omega_max)).unwrap();
        let lin = kind.schedule(&GateTiming::new(ThetaProfile::Linear, omega_max)).unwrap();
        let (us, ul) = (unitary_of(kind, sine.clone()), unitary_of(kind, lin));
        worst_u = worst_u.max(distance_up_to_phase(&us, &ul).unwrap());
        let block = match kind {
            GateKind::Iswap => {
                let m = us.matrix();
                ComplexOperator::from_rows(HilbertSpace::qubit(), &[m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)]]).unwrap()
            }
            _ => us,
        };
        let (th, ph) = sine.initial_angles();
        let extracted = propagated_phase(&block, th, ph).unwrap();
        worst_phase = worst_phase.max(wrapped(extracted - sine.geometric_phase()).abs());
    }
    Outcome {
        pass: worst_u < 1e-6 && worst_phase < 1e-6,
        detail: format!("max ‖U_sine − U_linear‖ = {worst_u:.2e}, max |γ − γ_propagated| = {worst_phase:.2e}"),
    }
}

fn conservation(log: &Conservation) -> Outcome {
    let pass = log.trace < 1e-8 && log.hermiticity < 1e-8 && log.min_eigenvalue >= -1e-6 && log.normalization < 1e-6;
    Outcome {
        pass,
        detail: format!(
            "{} runs: trace drift {:.2e}, Hermiticity drift {:.2e}, min eigenvalue {:.2e}, normalization {:.2e}",
            log.runs, log.trace, log.hermiticity, log.min_eigenvalue, log.normalization
        ),
    }
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut log = Conservation::new();
    let mut failed = Vec::new();
    let mut record = |id: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        emit(id, name, &o, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(id);
        }
        o.pass
    };

    let c1 = record(1, "noiseless gate correctness", &mut || noiseless_gates(&mut log));
    record(2, "four-level vs effective JC populations", &mut model_reduction);
    record(3, "single-qubit DD fidelity ladder at 40 kHz", &mut || {
        let not = check_ladder(GateKind::Not, ladder(GateKind::Not, khz(40.0), &mut log), [0.9525, 0.9955, 0.9997]);
        let phase = check_ladder(GateKind::Phase, ladder(GateKind::Phase, khz(40.0), &mut log), [0.9398, 0.998, 0.9993]);
        ladder_outcome(&[not, phase], c1)
    });
    record(4, "iSWAP DD fidelity ladder at 1 kHz", &mut || {
        let iswap = check_ladder(GateKind::Iswap, ladder(GateKind::Iswap, khz(1.0), &mut log), [0.9298, 0.9882, 0.996]);
        ladder_outcome(&[iswap], c1)
    });
    record(5, "DD-protected fidelity dominates on 11×11 noise grids", &mut || dominance(&mut log));
    record(6, "decoupling error scales as τ²", &mut error_scaling);
    record(7, "geometric path independence", &mut path_independence);
    record(8, "conservation over all runs", &mut || conservation(&log));

    let mut out = std::io::stdout().lock();
    if failed.is_empty() {
        writeln!(out, "acceptance: all 8 criteria pass").unwrap();
    } else {
        writeln!(out, "acceptance: failing criteria {failed:?}").unwrap();
        drop(out);
        std::process::exit(1);
    }
}
