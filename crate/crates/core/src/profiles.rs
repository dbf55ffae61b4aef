//! Curvature-decay profiles `λ(t)`.
//!
//! A profile bounds the Ricci excess below `-n` as a function of the
//! distance to the base point. Only closed-form families are supported so
//! that masses and partial integrals are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative curvature-decay function with closed-form integrals.
///
/// The smooth bump is a plateau of height `a` whose two edges are quintic
/// smoothstep ramps of width `(t_hi - t_lo) / 4`, so the profile is `C²` and
/// supported on `[t_lo, t_hi]`. It is the only non-monotone family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", try_from = "RawProfile")]
pub enum DecayProfile {
    Zero,
    /// `a e^{-c t}`
    Exponential {
        a: f64,
        c: f64,
    },
    /// `a (1 + t)^{-s}`
    Power {
        a: f64,
        s: f64,
    },
    SmoothBump {
        a: f64,
        t_lo: f64,
        t_hi: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawProfile {
    Zero,
    Exponential { a: f64, c: f64 },
    Power { a: f64, s: f64 },
    SmoothBump { a: f64, t_lo: f64, t_hi: f64 },
}

impl TryFrom<RawProfile> for DecayProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        match raw {
            RawProfile::Zero => Ok(DecayProfile::Zero),
            RawProfile::Exponential { a, c } => DecayProfile::exponential(a, c),
            RawProfile::Power { a, s } => DecayProfile::power(a, s),
            RawProfile::SmoothBump { a, t_lo, t_hi } => DecayProfile::smooth_bump(a, t_lo, t_hi),
        }
    }
}

fn check_amplitude(a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("amplitude must be finite and >= 0, got {a}")))
    }
}

/// Quintic smoothstep `6x⁵ - 15x⁴ + 10x³` on `[0, 1]`.
fn smoothstep(x: f64) -> f64 {
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

/// Antiderivative of [`smoothstep`] vanishing at 0; equals 1/2 at 1.
fn smoothstep_integral(x: f64) -> f64 {
    x.powi(4) * (2.5 + x * (-3.0 + x))
}

impl DecayProfile {
    pub fn exponential(a: f64, c: f64) -> Result<Self> {
        check_amplitude(a)?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("exponential rate must be > 0, got {c}")));
        }
        Ok(Self::Exponential { a, c })
    }

    pub fn power(a: f64, s: f64) -> Result<Self> {
        check_amplitude(a)?;
        if !(s.is_finite() && s > 1.0) {
            return Err(Error::Domain(format!("power exponent must be > 1, got {s}")));
        }
        Ok(Self::Power { a, s })
    }

    pub fn smooth_bump(a: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        check_amplitude(a)?;
        if !(t_lo.is_finite() && t_hi.is_finite() && 0.0 <= t_lo && t_lo < t_hi) {
            return Err(Error::Domain(format!("bump support must satisfy 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")));
        }
        Ok(Self::SmoothBump { a, t_lo, t_hi })
    }

    /// Whether the family is non-increasing on `[0, ∞)`.
    pub fn is_monotone(&self) -> bool {
        !matches!(self, Self::SmoothBump { .. })
    }

    /// `λ(t)`; errors on negative or non-finite `t`.
    pub fn eval_lambda(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("λ is defined for t >= 0, got {t}")));
        }
        Ok(self.value(t))
    }

    /// Unchecked evaluation for `t >= 0`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Exponential { a, c } => a * (-c * t).exp(),
            Self::Power { a, s } => a * (1.0 + t).powf(-s),
            Self::SmoothBump { a, t_lo, t_hi } => {
                let w = 0.25 * (t_hi - t_lo);
                if t <= t_lo || t >= t_hi {
                    0.0
                } else if t < t_lo + w {
                    a * smoothstep((t - t_lo) / w)
                } else if t > t_hi - w {
                    a * smoothstep((t_hi - t) / w)
                } else {
                    a
                }
            }
        }
    }

    /// `b = ∫_0^∞ λ`.
    pub fn total_mass(&self) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Exponential { a, c } => a / c,
            Self::Power { a, s } => a / (s - 1.0),
            Self::SmoothBump { a, t_lo, t_hi } => a * 0.75 * (t_hi - t_lo),
        }
    }

    /// `∫_0^x λ` in closed form, for `x >= 0`.
    pub fn partial_mass(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match *self {
            Self::Zero => 0.0,
            Self::Exponential { a, c } => -a / c * (-c * x).exp_m1(),
            Self::Power { a, s } => a / (s - 1.0) * -((1.0 - s) * x.ln_1p()).exp_m1(),
            Self::SmoothBump { a, t_lo, t_hi } => {
                let w = 0.25 * (t_hi - t_lo);
                if x <= t_lo {
                    0.0
                } else if x < t_lo + w {
                    a * w * smoothstep_integral((x - t_lo) / w)
                } else if x <= t_hi - w {
                    a * (0.5 * w + (x - t_lo - w))
                } else if x < t_hi {
                    a * (0.5 * w + (t_hi - t_lo - 2.0 * w) + w * (0.5 - smoothstep_integral((t_hi - x) / w)))
                } else {
                    self.total_mass()
                }
            }
        }
    }

    /// `∫_0^∞ λ(|d0 - t|) dt = ∫_0^{d0} λ + b`, the mass seen along a unit-speed
    /// geodesic that passes at distance `d0` from the base point in the worst case.
    /// Bounded by `2b` for monotone profiles.
    pub fn mass_along_geodesic(&self, d0: f64) -> Result<f64> {
        if !self.is_monotone() {
            return Err(Error::UnsupportedProfile(format!(
                "{self} is not monotone; the geodesic mass bound needs a non-increasing profile"
            )));
        }
        if !(d0 >= 0.0) {
            return Err(Error::Domain(format!("distance must be >= 0, got {d0}")));
        }
        if d0.is_infinite() {
            return Ok(2.0 * self.total_mass());
        }
        Ok(self.partial_mass(d0) + self.total_mass())
    }

    /// `t ↦ λ(t)` as a coefficient function.
    pub fn radial(&self) -> impl Fn(f64) -> f64 + Copy + '_ {
        move |t| self.value(t.max(0.0))
    }

    /// `t ↦ λ(|d0 - t|)`, the worst-case coefficient along a geodesic starting at
    /// distance `d0` from the base point.
    pub fn along_geodesic(&self, d0: f64) -> impl Fn(f64) -> f64 + Copy + '_ {
        move |t| self.value((d0 - t).abs())
    }
}

impl fmt::Display for DecayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Zero => write!(f, "zero"),
            Self::Exponential { a, c } => write!(f, "exp(a={a};c={c})"),
            Self::Power { a, s } => write!(f, "power(a={a};s={s})"),
            Self::SmoothBump { a, t_lo, t_hi } => write!(f, "bump(a={a};{t_lo}..{t_hi})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        assert_eq!(DecayProfile::Zero.eval_lambda(5.0).unwrap(), 0.0);
        let e = DecayProfile::exponential(1.0, 1.0).unwrap();
        assert_eq!(e.eval_lambda(0.0).unwrap(), 1.0);
        let p = DecayProfile::power(1.0, 2.0).unwrap();
        assert_relative_eq!(p.eval_lambda(1.0).unwrap(), 0.25);
    }

    #[test]
    fn negative_time_is_a_domain_error() {
        let e = DecayProfile::exponential(1.0, 1.0).unwrap();
        assert!(matches!(e.eval_lambda(-0.1), Err(Error::Domain(_))));
        assert!(matches!(e.eval_lambda(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(DecayProfile::exponential(-1.0, 1.0).is_err());
        assert!(DecayProfile::exponential(1.0, 0.0).is_err());
        assert!(DecayProfile::power(1.0, 1.0).is_err());
        assert!(DecayProfile::smooth_bump(1.0, 2.0, 1.0).is_err());
        assert!(DecayProfile::smooth_bump(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn masses() {
        assert_eq!(DecayProfile::Zero.total_mass(), 0.0);
        assert_relative_eq!(DecayProfile::exponential(1.0, 1.0).unwrap().total_mass(), 1.0);
        assert_relative_eq!(DecayProfile::power(2.0, 3.0).unwrap().total_mass(), 1.0);
        // plateau of length 0.5 plus two ramps contributing half their width each
        assert_relative_eq!(DecayProfile::smooth_bump(1.0, 1.0, 2.0).unwrap().total_mass(), 0.75);
    }

    #[test]
    fn bump_is_continuous_at_ramp_joints() {
        let b = DecayProfile::smooth_bump(0.3, 1.0, 2.0).unwrap();
        for &x in &[1.0, 1.25, 1.75, 2.0] {
            let l = b.value(x - 1e-12);
            let r = b.value(x + 1e-12);
            assert!((l - r).abs() < 1e-9, "jump at {x}: {l} vs {r}");
            let pl = b.partial_mass(x - 1e-12);
            let pr = b.partial_mass(x + 1e-12);
            assert!((pl - pr).abs() < 1e-9);
        }
        assert!(!b.is_monotone());
    }

    #[test]
    fn geodesic_mass_examples() {
        let e = DecayProfile::exponential(1.0, 1.0).unwrap();
        assert_relative_eq!(e.mass_along_geodesic(0.0).unwrap(), 1.0);
        assert_relative_eq!(e.mass_along_geodesic(60.0).unwrap(), 2.0);
        assert_eq!(e.mass_along_geodesic(f64::INFINITY).unwrap(), 2.0);
        assert_eq!(DecayProfile::Zero.mass_along_geodesic(3.0).unwrap(), 0.0);
        let b = DecayProfile::smooth_bump(1.0, 1.0, 2.0).unwrap();
        assert!(matches!(b.mass_along_geodesic(1.0), Err(Error::UnsupportedProfile(_))));
    }

    #[test]
    fn config_round_trip_validates() {
        let p: DecayProfile = serde_json::from_str(r#"{"family":"exponential","a":0.5,"c":2}"#).unwrap();
        assert_eq!(p, DecayProfile::Exponential { a: 0.5, c: 2.0 });
        let bad = serde_json::from_str::<DecayProfile>(r#"{"family":"power","a":1,"s":0.5}"#);
        assert!(bad.is_err());
        let z: DecayProfile = serde_json::from_str(r#"{"family":"zero"}"#).unwrap();
        assert_eq!(z, DecayProfile::Zero);
        let back: DecayProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
