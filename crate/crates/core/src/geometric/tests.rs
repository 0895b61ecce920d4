use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use super::*;
use crate::qops::{distance_up_to_phase, sigma_x, sigma_y, CMatrix};

fn timing() -> GateTiming {
    GateTiming::new(ThetaProfile::SineRamp, PI)
}

/// Oracle: fixed-step RK4 on `U̇ = −iH(t)U`, integrated segment by segment.
fn propagate(schedule: &PathSchedule, two_qubit: bool, steps_per_segment: usize) -> ComplexOperator {
    let h_in = |t: f64, lo: f64, hi: f64| {
        let eps = 1e-10 * (hi - lo);
        let f = schedule.control_fields(t.clamp(lo + eps, hi - eps)).unwrap();
        let h = if two_qubit { f.exchange_hamiltonian() } else { f.qubit_hamiltonian() };
        h.into_matrix() * c(0.0, -1.0)
    };
    let n = if two_qubit { 4 } else { 2 };
    let mut u = CMatrix::identity(n, n);
    let b = schedule.boundaries();
    for w in b.windows(2) {
        let dt = (w[1] - w[0]) / steps_per_segment as f64;
        let h_at = |t: f64| h_in(t, w[0], w[1]);
        for k in 0..steps_per_segment {
            let t = w[0] + k as f64 * dt;
            let k1 = h_at(t) * &u;
            let k2 = h_at(t + dt / 2.0) * (&u + &k1 * c(dt / 2.0, 0.0));
            let k3 = h_at(t + dt / 2.0) * (&u + &k2 * c(dt / 2.0, 0.0));
            let k4 = h_at(t + dt) * (&u + &k3 * c(dt, 0.0));
            u += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
        }
    }
    let space = if two_qubit { HilbertSpace::new(vec![2, 2]).unwrap() } else { HilbertSpace::qubit() };
    ComplexOperator::new(space, u).unwrap()
}

#[test]
fn static_path_has_no_drive() {
    let seg = PathSegment { duration: 1.0, theta_start: 1.0, theta_end: 1.0, phi_start: 0.3, phi_end: 0.3, profile: ThetaProfile::Linear };
    let s = PathSchedule::new(vec![seg], vec![]).unwrap();
    let f = s.control_fields(0.4).unwrap();
    assert_eq!(f.omega, c(0.0, 0.0));
    assert_eq!(f.detuning, 0.0);
}

#[test]
fn linear_ramp_gives_imaginary_rabi() {
    let r = 0.7;
    let up = PathSegment::polar(PI / r, 0.0, PI, 0.0, ThetaProfile::Linear);
    let down = PathSegment::polar(PI / r, PI, 0.0, 0.0, ThetaProfile::Linear);
    let s = PathSchedule::new(vec![up, down], vec![]).unwrap();
    let f = s.control_fields(1.0).unwrap();
    assert!((f.omega - c(0.0, r)).norm() < 1e-15);
    assert_eq!(f.detuning, 0.0);
    assert!(matches!(s.control_fields(-1.0), Err(Error::OutsideSchedule { .. })));
    assert!(s.control_fields(s.duration() + 1.0).is_err());
}

#[test]
fn rabi_equals_theta_rate_at_fixed_phi() {
    let s = schedule_not_gate(FRAC_PI_2, &timing()).unwrap();
    for k in 0..200 {
        let t = s.duration() * k as f64 / 200.0;
        let (seg, tau) = s.locate(t).unwrap();
        let (_, _, dth, _) = s.segments()[seg].angles(tau);
        assert!((s.control_fields(t).unwrap().omega.norm() - dth.abs()).abs() < 1e-12);
    }
}

#[test]
fn phase_gate_matches_closed_form_hamiltonian() {
    let phi0 = 0.4;
    let s = schedule_phase_gate(phi0, &timing()).unwrap();
    for k in 1..100 {
        let t = s.duration() * k as f64 / 100.0;
        let (seg, tau) = s.locate(t).unwrap();
        let (_, _, dth, _) = s.segments()[seg].angles(tau);
        let phi = if seg == 0 { phi0 } else { phi0 + FRAC_PI_4 };
        let closed_form = &sigma_x().scale_re(-phi.sin() * dth / 2.0) + &sigma_y().scale_re(phi.cos() * dth / 2.0);
        let h = s.control_fields(t).unwrap().qubit_hamiltonian();
        assert!((h.matrix() - closed_form.matrix()).norm() < 1e-12);
    }
}

#[test]
fn phase_gate_periodic_in_phi0() {
    let a = schedule_phase_gate(0.3, &timing()).unwrap();
    let b = schedule_phase_gate(0.3 + 2.0 * PI, &timing()).unwrap();
    for k in 0..50 {
        let t = a.duration() * k as f64 / 50.0;
        let (fa, fb) = (a.control_fields(t).unwrap(), b.control_fields(t).unwrap());
        assert!((fa.omega - fb.omega).norm() < 1e-12);
    }
}

#[test]
fn nominal_not_and_iswap_legs_equal_canonical() {
    // Printed middle legs run θ: π → 2π with θ̇ > 0 at φ = −π/2 (NOT) and
    // φ = 3π/2 (iSWAP).
    for (gate, nominal_phi) in [(GateKind::Not, -FRAC_PI_2), (GateKind::Iswap, 1.5 * PI)] {
        let s = gate.schedule(&timing()).unwrap();
        let mid = s.segments()[1];
        let t = s.boundaries()[1] + 0.37 * mid.duration;
        let (_, _, dth, _) = mid.angles(t - s.boundaries()[1]);
        let closed_form = I * (I * nominal_phi).exp() * dth.abs();
        assert!((s.control_fields(t).unwrap().omega - closed_form).norm() < 1e-12, "{gate}");
    }
}

#[test]
fn durations_follow_the_ceiling() {
    let s = schedule_not_gate(FRAC_PI_2, &timing()).unwrap();
    assert!((s.duration() - 4.0).abs() < 1e-9);
    assert!((s.peak_rabi() - PI).abs() < 1e-6);
    let lin = schedule_not_gate(FRAC_PI_2, &GateTiming::new(ThetaProfile::Linear, PI)).unwrap();
    assert!((lin.duration() - 2.0).abs() < 1e-12);
    let sw = schedule_iswap(&GateTiming::new(ThetaProfile::SineRamp, PI / 20.0)).unwrap();
    assert!((sw.duration() - 80.0).abs() < 1e-7);
}

#[test]
fn validator_rejects_bad_paths() {
    let seg = |a, b, phi| PathSegment::polar(1.0, a, b, phi, ThetaProfile::Linear);
    assert!(PathSchedule::new(vec![], vec![]).is_err());
    // open path
    assert!(PathSchedule::new(vec![seg(0.0, PI, 0.0)], vec![]).is_err());
    // jump off the poles
    let r = PathSchedule::new(vec![seg(0.0, 1.0, 0.0), seg(1.0, 0.0, 0.5)], vec![PhiJump { boundary: 1, delta: 0.5 }]);
    assert!(r.is_err());
    // φ change without a jump
    assert!(PathSchedule::new(vec![seg(0.0, PI, 0.0), seg(PI, 0.0, 0.5)], vec![]).is_err());
    // θ outside range
    assert!(PathSchedule::new(vec![seg(0.0, 4.0, 0.0), seg(4.0, 0.0, 0.0)], vec![]).is_err());
    // south-pole closure needs an explicit jump
    let r = PathSchedule::new(vec![seg(PI, 0.0, 0.0), seg(0.0, PI, 0.3)], vec![PhiJump { boundary: 1, delta: 0.3 }]);
    assert!(r.is_err());
    assert!(schedule_not_gate(0.0, &timing()).is_err());
}

#[test]
fn schedule_json_round_trip() {
    let s = schedule_iswap(&timing()).unwrap();
    let json = serde_json::to_string(&s).unwrap();
    let back: PathSchedule = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    let broken = json.replace("\"delta\":-1.5707963267948966", "\"delta\":-1.0");
    assert!(serde_json::from_str::<PathSchedule>(&broken).is_err());
}

#[test]
fn geometric_phase_simple_loops() {
    let eq = PathSegment { duration: 1.0, theta_start: FRAC_PI_2, theta_end: FRAC_PI_2, phi_start: 0.0, phi_end: 2.0 * PI, profile: ThetaProfile::SineRamp };
    let s = PathSchedule::new(vec![eq], vec![]).unwrap();
    assert!((s.geometric_phase() - PI).abs() < 1e-12);
    let seg = |a, b| PathSegment::polar(1.0, a, b, 0.2, ThetaProfile::Linear);
    let flat = PathSchedule::new(vec![seg(0.3, 2.0), seg(2.0, 0.3)], vec![]).unwrap();
    assert_eq!(flat.geometric_phase(), 0.0);
}

/// Oracle: midpoint-rule line integral of `½(1 − cosθ)φ̇` plus jump terms.
fn line_integral(s: &PathSchedule) -> f64 {
    let mut sum = 0.0;
    for (k, seg) in s.segments().iter().enumerate() {
        let n = 20_000;
        let h = seg.duration / n as f64;
        for i in 0..n {
            let (th, _, _, dph) = seg.angles((i as f64 + 0.5) * h);
            sum += 0.5 * (1.0 - th.cos()) * dph * h;
        }
        if let Some(j) = s.phi_jumps().iter().find(|j| j.boundary == k + 1) {
            sum += 0.5 * (1.0 - seg.theta_end.cos()) * j.delta;
        }
    }
    sum
}

#[test]
fn geometric_phase_of_builtins() {
    for (gate, want) in [(GateKind::Phase, FRAC_PI_4), (GateKind::Not, FRAC_PI_2), (GateKind::Iswap, -FRAC_PI_2)] {
        let s = gate.schedule(&timing()).unwrap();
        assert!((s.geometric_phase() - want).abs() < 1e-12, "{gate}");
        assert!((line_integral(&s) - want).abs() < 1e-9, "{gate}");
    }
    let wedge = PathSegment { duration: 2.0, theta_start: 1.1, theta_end: 1.1, phi_start: 0.0, phi_end: 2.0 * PI, profile: ThetaProfile::SineRamp };
    let s = PathSchedule::new(vec![wedge], vec![]).unwrap();
    assert!((s.geometric_phase() - line_integral(&s)).abs() < 1e-9);
}

#[test]
fn targets_and_closed_forms() {
    let not = GateKind::Not.schedule(&timing()).unwrap().target(1).unwrap();
    let u = target_unitary(&not);
    assert!((u.matrix() - sigma_x().scale(c(0.0, -1.0)).matrix()).norm() < 1e-15);
    let phase = GateKind::Phase.schedule(&timing()).unwrap().target(1).unwrap();
    assert!((phase.axis[2] - 1.0).abs() < 1e-15);
    let id = target_unitary(&GateTarget::new(0.0, [0.0, 0.0, 1.0], 1).unwrap());
    assert!((id.matrix() - CMatrix::identity(2, 2)).norm() < 1e-15);

    // closed-form two-qubit matrix at γ = π/2, θ₀ = π/2, φ₀ = π
    let t2 = GateTarget::new(FRAC_PI_2, bloch_axis(FRAC_PI_2, PI), 2).unwrap();
    let u2 = target_unitary(&t2);
    assert!((u2.get(1, 2).norm() - 1.0).abs() < 1e-15);
    assert!((u2.get(2, 1).norm() - 1.0).abs() < 1e-15);
    assert!(u2.get(1, 1).norm() < 1e-15);
    assert_eq!(u2.get(0, 0), ONE);
    assert_eq!(u2.get(3, 3), ONE);
    assert!(GateTarget::new(0.1, [1.0, 1.0, 0.0], 1).is_err());
}

#[test]
fn builtin_schedules_propagate_to_targets() {
    for gate in GateKind::ALL {
        let t = if gate == GateKind::Iswap { GateTiming::new(ThetaProfile::SineRamp, PI / 20.0) } else { timing() };
        let s = gate.schedule(&t).unwrap();
        let two = gate == GateKind::Iswap;
        let u = propagate(&s, two, 4000);
        let target = target_unitary(&s.target(gate.qubit_count()).unwrap());
        assert!(distance_up_to_phase(&target, &u).unwrap() < 1e-6, "{gate}");
    }
    let s = GateKind::Iswap.schedule(&GateTiming::new(ThetaProfile::SineRamp, PI / 20.0)).unwrap();
    let u = propagate(&s, true, 4000);
    let block = [[ZERO, c(0.0, -1.0)], [c(0.0, -1.0), ZERO]];
    for (i, row) in block.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            assert!((u.get(1 + i, 1 + j) - want).norm() < 1e-6);
        }
    }
}

#[test]
fn profiles_give_the_same_gate() {
    for gate in [GateKind::Phase, GateKind::Not] {
        let sine = gate.schedule(&timing()).unwrap();
        let lin = gate.schedule(&GateTiming::new(ThetaProfile::Linear, 1.7)).unwrap();
        let (a, b) = (propagate(&sine, false, 4000), propagate(&lin, false, 4000));
        assert!((a.matrix() - b.matrix()).norm() < 1e-6, "{gate}");
    }
}

#[test]
fn propagated_phase_matches_geometric_phase() {
    for gate in [GateKind::Phase, GateKind::Not] {
        let s = gate.schedule(&timing()).unwrap();
        let u = propagate(&s, false, 4000);
        let (th, ph) = s.initial_angles();
        assert!((propagated_phase(&u, th, ph).unwrap() - s.geometric_phase()).abs() < 1e-6, "{gate}");
        let (phi1, _) = auxiliary_states(th, ph);
        let o1 = phi1.inner(&phi1.apply(&u).unwrap()).unwrap();
        assert!((o1 - (I * s.geometric_phase()).exp()).norm() < 1e-6);
    }
}

#[test]
fn phi_driven_loop_propagates() {
    // a latitude loop exercises the detuning term
    let seg = PathSegment { duration: 3.0, theta_start: 1.0, theta_end: 1.0, phi_start: 0.0, phi_end: 2.0 * PI, profile: ThetaProfile::SineRamp };
    let s = PathSchedule::new(vec![seg], vec![]).unwrap();
    let u = propagate(&s, false, 4000);
    let target = target_unitary(&s.target(1).unwrap());
    assert!((u.matrix() - target.matrix()).norm() < 1e-6);
}

#[test]
fn quarter_turn_phase_gate_is_reported_not_assumed() {
    let s = schedule_phase_gate_variant(0.0, PhaseGateVariant::QuarterTurn, &timing()).unwrap();
    assert!((s.geometric_phase() - PI / 8.0).abs() < 1e-12);
    let u = propagate(&s, false, 4000);
    let target = target_unitary(&s.target(1).unwrap());
    assert!(distance_up_to_phase(&target, &u).unwrap() > 1e-2);
}

proptest! {
    #[test]
    fn phase_is_reparameterization_invariant(a in 0.05f64..3.0, b in 0.05f64..3.0, dphi in -3.0f64..3.0, d1 in 0.1f64..5.0, d2 in 0.1f64..5.0) {
        let mk = |d: f64, profile| PathSegment { duration: d, theta_start: a, theta_end: b, phi_start: 0.0, phi_end: dphi, profile };
        let back = |d: f64, profile| PathSegment { duration: d, theta_start: b, theta_end: a, phi_start: dphi, phi_end: 2.0 * PI, profile };
        let s1 = PathSchedule::new(vec![mk(d1, ThetaProfile::Linear), back(d2, ThetaProfile::SineRamp)], vec![]).unwrap();
        let s2 = PathSchedule::new(vec![mk(d2, ThetaProfile::SineRamp), back(d1, ThetaProfile::Linear)], vec![]).unwrap();
        prop_assert!((s1.geometric_phase() - s2.geometric_phase()).abs() < 1e-9);
        prop_assert!((s1.geometric_phase() - line_integral(&s1)).abs() < 1e-7);
    }

    #[test]
    fn auxiliary_states_orthonormal(th in 0.0f64..PI, ph in -PI..PI) {
        let (a, b) = auxiliary_states(th, ph);
        prop_assert!(a.inner(&b).unwrap().norm() < 1e-15);
        prop_assert!((a.norm() - 1.0).abs() < 1e-15);
    }
}
