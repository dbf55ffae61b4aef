//! Numerical comparison geometry for Willmore-type inequalities on
//! rotationally symmetric manifolds with decaying negative Ricci excess.
//!
//! The crate solves the comparison equation `ψ'' = (1 + Λ)ψ`, builds warped
//! product models and their geodesic balls, evolves mean curvature along
//! normal geodesics and checks the resulting volume inequalities with
//! explicit margins.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inequality;
pub mod manifold;
pub mod numeric;
pub mod ode;
pub mod profiles;
pub mod tube;
pub mod willmore;

pub use error::{Error, Result};
pub use inequality::Lemma31Params;
pub use manifold::{sphere_volume_constant, GeodesicBallDomain, RotSymManifold, Warp};
pub use ode::{OdeSolution, DEFAULT_STEP, MAX_STEP};
pub use profiles::DecayProfile;
pub use tube::TubeEvolution;
pub use willmore::{Theorem, WillmoreReport};
