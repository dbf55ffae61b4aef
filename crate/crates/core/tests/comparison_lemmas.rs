use willmore_core::ode::{
    check_lemma21, check_lemma22, focal_bound_check, psi_ratio, psi_zero_crossing, solve_linear, solve_psi_pair,
    wronskian,
};
use willmore_core::{DecayProfile, DEFAULT_STEP};

fn suite() -> Vec<DecayProfile> {
    vec![
        DecayProfile::Zero,
        DecayProfile::exponential(1.0, 1.0).unwrap(),
        DecayProfile::exponential(0.5, 2.0).unwrap(),
        DecayProfile::power(1.0, 2.0).unwrap(),
    ]
}

#[test]
fn lemma21_slacks_hold_on_suite() {
    for p in suite() {
        let (s1, _) = solve_psi_pair(p.radial(), 20.0, DEFAULT_STEP).unwrap();
        let r = check_lemma21(&s1, p.radial(), Some(p.total_mass()), 0.05);
        assert!(r.min_slack() >= -1e-9, "{p}: {r:?}");
    }
}

#[test]
fn lemma21_saturates_for_zero_profile() {
    let (s1, _) = solve_psi_pair(|_| 0.0, 20.0, DEFAULT_STEP).unwrap();
    let r = check_lemma21(&s1, |_| 0.0, Some(0.0), 0.05);
    for v in [r.lower_psi, r.upper_psi, r.lower_dpsi, r.upper_dpsi, r.ratio_cap.unwrap()] {
        assert!(v.abs() <= 1e-9, "{r:?}");
    }
}

#[test]
fn lemma21_ratio_cap_for_unit_mass_power_profile() {
    let p = DecayProfile::power(1.0, 2.0).unwrap();
    let (s1, _) = solve_psi_pair(p.radial(), 20.0, DEFAULT_STEP).unwrap();
    let r = check_lemma21(&s1, p.radial(), Some(1.0), 0.05);
    assert!(r.final_ratio <= std::f64::consts::E + 1e-6);
    assert!(r.final_ratio > 1.0);
}

#[test]
fn lemma22_slacks_hold_on_suite() {
    for p in suite() {
        let (s1, s2) = solve_psi_pair(p.radial(), 20.0, DEFAULT_STEP).unwrap();
        let r = check_lemma22(&s1, &s2, p.radial(), 0.05);
        assert!(r.min_slack() >= -1e-9, "{p}: {r:?}");
        assert!(r.derivative_residual <= 1e-6, "{p}: {r:?}");
    }
}

#[test]
fn lemma22_zero_profile_ratio_is_coth() {
    let (s1, s2) = solve_psi_pair(|_| 0.0, 20.0, DEFAULT_STEP).unwrap();
    let r = check_lemma22(&s1, &s2, |_| 0.0, 0.05);
    assert!(r.ratio_bound.abs() <= 1e-8, "{r:?}");
}

#[test]
fn lemma22_constant_three_on_short_window() {
    // ψ₂/ψ₁ = 2 coth 2t
    let (s1, s2) = solve_psi_pair(|_| 3.0, 5.0, DEFAULT_STEP).unwrap();
    let r = check_lemma22(&s1, &s2, |_| 3.0, 0.1);
    assert!(r.ratio_bound >= -1e-9);
    let ratios = psi_ratio(&s1, &s2);
    let t = s1.grid()[1000];
    assert!((ratios[999] - 2.0 / (2.0 * t).tanh()).abs() < 1e-9);
}

#[test]
fn wronskian_drift_on_suite() {
    for p in suite() {
        let (s1, s2) = solve_psi_pair(p.radial(), 20.0, DEFAULT_STEP).unwrap();
        let drift = wronskian(&s1, &s2).iter().map(|w| (w - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift <= 1e-8, "{p}: {drift}");
    }
}

#[test]
fn half_step_self_consistency() {
    let lam = |t: f64| (-t).exp();
    let a = solve_linear(lam, 0.0, 1.0, 20.0, DEFAULT_STEP).unwrap();
    let b = solve_linear(lam, 0.0, 1.0, 20.0, DEFAULT_STEP / 2.0).unwrap();
    let ia = a.len() - 1;
    let ib = b.len() - 1;
    let rel = (a.ln_abs_psi(ia) - b.ln_abs_psi(ib)).exp_m1().abs();
    assert!(rel <= 1e-9, "{rel}");
    // fourth order: the coarse error is ~16x the fine one
    let c = solve_linear(lam, 0.0, 1.0, 20.0, DEFAULT_STEP / 4.0).unwrap();
    let ic = c.len() - 1;
    let e1 = (a.ln_abs_psi(ia) - c.ln_abs_psi(ic)).abs();
    let e2 = (b.ln_abs_psi(ib) - c.ln_abs_psi(ic)).abs();
    let order = (e1 / e2).log2();
    assert!((3.5..4.6).contains(&order), "observed order {order}");
}

#[test]
fn constant_coefficient_closed_forms() {
    for c in [0.0, 0.5, 3.0, 8.0] {
        let k = f64::sqrt(1.0 + c);
        let (s1, s2) = solve_psi_pair(|_| c, 5.0, DEFAULT_STEP).unwrap();
        for i in (1..s1.len()).step_by(97) {
            let t = s1.grid()[i];
            let r1 = s1.psi(i) / ((k * t).sinh() / k) - 1.0;
            let r2 = s2.psi(i) / (k * t).cosh() - 1.0;
            assert!(r1.abs() <= 1e-8 && r2.abs() <= 1e-8, "c={c} t={t}");
        }
    }
}

#[test]
fn zero_crossing_precedes_focal_bound() {
    let p = DecayProfile::exponential(1.0, 1.0).unwrap();
    // worst-case geodesic coefficient with 2b = 2
    let d0 = 40.0;
    let two_b = p.mass_along_geodesic(d0).unwrap();
    let t0 = focal_bound_check(2.0, -4.0, DEFAULT_STEP).unwrap();
    let t1 = psi_zero_crossing(p.along_geodesic(d0), -4.0, 5.0, DEFAULT_STEP).unwrap().unwrap();
    assert!(two_b <= 2.0 + 1e-12);
    assert!(t1 <= t0, "t1 = {t1}, t0 = {t0}");
}
