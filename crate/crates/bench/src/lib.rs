//! Shared fixtures for the benchmarks.

use willmore_core::{DecayProfile, RotSymManifold, Warp, DEFAULT_STEP};

pub fn exponential() -> DecayProfile {
    DecayProfile::exponential(0.5, 2.0).expect("valid parameters")
}

pub fn bump() -> DecayProfile {
    DecayProfile::smooth_bump(0.1, 1.0, 2.0).expect("valid parameters")
}

/// The two-dimensional bump model solved far enough for `r0 = 0.5` and `r_eval = 40`.
pub fn bump_manifold() -> RotSymManifold {
    RotSymManifold::new(2, Warp::Psi1(bump()), 40.5, DEFAULT_STEP).expect("valid model")
}
