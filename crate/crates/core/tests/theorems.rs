use std::f64::consts::PI;

use willmore_core::willmore::{
    compose_thm12_constant, estimate_rv, thm11_rhs, verify_thm11, verify_thm12, DEFAULT_TOL,
};
use willmore_core::{
    sphere_volume_constant, DecayProfile, Error, GeodesicBallDomain, RotSymManifold, Warp, DEFAULT_STEP,
};

#[test]
fn hyperbolic_equality_case() {
    for n in [1, 2, 3] {
        let m = RotSymManifold::new(n, Warp::Hyperbolic, 42.0, DEFAULT_STEP).unwrap();
        for r0 in [0.5, 1.0, 2.0] {
            let d = GeodesicBallDomain::new(&m, r0).unwrap();
            let r = verify_thm11(&d, &DecayProfile::Zero, 40.0).unwrap();
            let exact = sphere_volume_constant(n).unwrap() * (n as f64 * r0).exp();
            assert!(((r.rhs - exact) / exact).abs() <= 1e-12, "n {n} r0 {r0}");
            assert!(((r.lhs - exact) / exact).abs() <= 1e-8, "n {n} r0 {r0}");
            assert!((r.margin / r.rhs).abs() <= 1e-6);
        }
    }
}

#[test]
fn thm11_example_values() {
    let m = RotSymManifold::new(2, Warp::Hyperbolic, 42.0, DEFAULT_STEP).unwrap();
    let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
    let rhs = thm11_rhs(&d, &DecayProfile::Zero).unwrap();
    let s = 1f64.sinh();
    let closed = 4.0 * PI * s * s * (1.0 + 1.0 / 1f64.tanh()).powi(2);
    assert!(((rhs - closed) / closed).abs() < 1e-13);
    assert!(((rhs - 4.0 * PI * 2f64.exp()) / rhs).abs() < 1e-13);
}

#[test]
fn thm11_rhs_grows_with_mass() {
    // a one-dimensional boundary has no tangential Ricci term, so every
    // ψ₁-generated model is admissible for its own profile
    let m = RotSymManifold::new(1, Warp::Hyperbolic, 5.0, DEFAULT_STEP).unwrap();
    let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
    let values: Vec<f64> = (0..=20)
        .map(|i| {
            let b = 0.1 * i as f64;
            let p = if b == 0.0 { DecayProfile::Zero } else { DecayProfile::exponential(b, 1.0).unwrap() };
            thm11_rhs(&d, &p).unwrap()
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn thm11_on_exponential_warp_in_one_dimension() {
    let p = DecayProfile::exponential(0.5, 2.0).unwrap();
    let m = RotSymManifold::new(1, Warp::Psi1(p), 42.0, DEFAULT_STEP).unwrap();
    for r0 in [0.5, 1.0, 2.0] {
        let d = GeodesicBallDomain::new(&m, r0).unwrap();
        let r = verify_thm11(&d, &p, 40.0).unwrap();
        assert!(r.margin >= 0.0 && r.passes(DEFAULT_TOL));
        assert!(r.admissibility >= -1e-7);
    }
}

#[test]
fn exponential_warp_is_inadmissible_in_higher_dimensions() {
    // Ric_tan + n + nλ = (n − 1)(λ − Q/f²) and Q/f² > λ once λ has started to decay
    let p = DecayProfile::exponential(0.5, 1.0).unwrap();
    for n in [2, 3] {
        let m = RotSymManifold::new(n, Warp::Psi1(p), 10.0, DEFAULT_STEP).unwrap();
        let margin = m.verify_curvature_bound(&p);
        assert!(margin.radial.abs() < 1e-12);
        assert!(margin.tangential < -1e-3);
        let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
        assert!(matches!(verify_thm11(&d, &p, 5.0), Err(Error::Inadmissible { .. })));
    }
}

#[test]
fn rv_estimators_agree() {
    let p = DecayProfile::exponential(0.5, 2.0).unwrap();
    let m = RotSymManifold::new(2, Warp::Psi1(p), 42.0, DEFAULT_STEP).unwrap();
    let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
    let rv = estimate_rv(&d, 40.0).unwrap();
    assert!(rv.agreement <= 1e-6 && rv.trusted());
    // RV = L² e² with L = lim f/sinh
    let l = (m.warp_at(42.0).unwrap().ln_f - 42f64.sinh().ln()).exp();
    assert!((rv.rv / (l * l * 2f64.exp()) - 1.0).abs() < 1e-9);
    assert!(l > 1.0 && l <= (p.total_mass()).exp());
}

#[test]
fn rv_tends_to_one_for_shrinking_balls() {
    let m = RotSymManifold::new(2, Warp::Hyperbolic, 41.0, DEFAULT_STEP).unwrap();
    let d = GeodesicBallDomain::new(&m, 1e-9).unwrap();
    assert!((estimate_rv(&d, 40.0).unwrap().rv - 1.0).abs() < 1e-8);
}

#[test]
fn thm12_on_bump_manifold() {
    for step in [1e-3, 5e-4] {
        let bump = DecayProfile::smooth_bump(0.1, 1.0, 2.0).unwrap();
        let m = RotSymManifold::new(2, Warp::Psi1(bump), 40.5, step).unwrap();
        let d = GeodesicBallDomain::new(&m, 0.5).unwrap();
        let r = verify_thm12(&d, 2.0, 40.0, 20.0).unwrap();
        assert!(r.passes(DEFAULT_TOL) && r.margin >= 0.0, "{r:?}");
        assert!(r.constants.rho_norm > 0.0 && r.rv.trusted());
    }
}

#[test]
fn thm12_reduces_to_equality_without_excess() {
    let flat = DecayProfile::smooth_bump(0.0, 1.0, 2.0).unwrap();
    for warp in [Warp::Hyperbolic, Warp::Psi1(flat)] {
        let m = RotSymManifold::new(2, warp, 41.0, DEFAULT_STEP).unwrap();
        let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
        let r = verify_thm12(&d, 2.0, 40.0, 20.0).unwrap();
        assert_eq!(r.constants.rho_norm, 0.0);
        assert_eq!(r.constants.c_total, 0.0);
        assert!((r.margin / r.rhs).abs() <= 1e-6, "{r:?}");
        let exact = 4.0 * PI * 2f64.exp();
        assert!(((r.rhs - exact) / exact).abs() <= 1e-6);
    }
}

#[test]
fn thm12_constant_is_monotone() {
    let cs: Vec<f64> =
        [0.0, 1e-6, 1e-4, 1e-2, 1.0].iter().map(|&r| compose_thm12_constant(2, 2.0, r).unwrap().c_total).collect();
    assert_eq!(cs[0], 0.0);
    assert!(cs.windows(2).all(|w| w[1] >= w[0]), "{cs:?}");
    assert!(cs[4].is_finite() && cs[4] > 0.0);
}

#[test]
fn thm12_preconditions() {
    let m = RotSymManifold::new(2, Warp::Hyperbolic, 41.0, DEFAULT_STEP).unwrap();
    let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
    assert!(matches!(verify_thm12(&d, 1.5, 40.0, 20.0), Err(Error::Precondition(_))));
}
