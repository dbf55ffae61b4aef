//! Relative volume ratio estimation and the two Willmore-type inequalities
//! for geodesic balls in rotationally symmetric models.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::Lemma31Params;
use crate::manifold::{sphere_volume_constant, GeodesicBallDomain};
use crate::numeric::{even_intervals, ln_sinh, log_simpson};
use crate::profiles::DecayProfile;
use crate::tube::{cnp_constant, lp_comparison_constant};

/// Default relative tolerance for pass/fail.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Largest curvature-bound violation accepted for a model to count as admissible.
pub const ADMISSIBILITY_TOL: f64 = 1e-7;
/// Largest relative spread of the raw volume ratios for a trusted estimate.
pub const RV_SPREAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Thm11,
    Thm12,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Thm11 => "thm11",
            Theorem::Thm12 => "thm12",
        })
    }
}

/// `RV(Ω)` from the derivative ratio, with raw volume ratios as diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RvEstimate {
    /// `(f(r0 + r)/sinh r)^n` at `r = r_eval`.
    pub rv: f64,
    /// Raw ratios `vol{d(·, Ω) ≤ r} / (ω_n ∫_0^r sinhⁿ)` at `r_eval/4`, `r_eval/2`, `r_eval`.
    pub raw: Vec<(f64, f64)>,
    /// Relative difference of the last two raw ratios.
    pub spread: f64,
    /// `(max − min)/|rv|` over all raw ratios.
    pub full_spread: f64,
    /// Relative difference between `rv` and the last raw ratio.
    pub agreement: f64,
}

impl RvEstimate {
    /// Whether the raw ratios have settled to within [`RV_SPREAD_TOL`].
    pub fn trusted(&self) -> bool {
        self.spread <= RV_SPREAD_TOL
    }
}

fn ln_sinh_power_integral(n: usize, r: f64, max_step: f64) -> f64 {
    let intervals = even_intervals(r, max_step);
    let h = r / intervals as f64;
    let nf = n as f64;
    let logs: Vec<f64> =
        (0..=intervals).map(|i| if i == 0 { f64::NEG_INFINITY } else { nf * ln_sinh(i as f64 * h) }).collect();
    log_simpson(&logs, h)
}

/// Estimates `RV(Ω)` at tube width `r_eval`; needs the warp solved out to `r0 + r_eval`.
pub fn estimate_rv(domain: &GeodesicBallDomain<'_>, r_eval: f64) -> Result<RvEstimate> {
    if !(r_eval > 0.0 && r_eval.is_finite()) {
        return Err(Error::Config(format!("r_eval must be positive, got {r_eval}")));
    }
    let manifold = domain.manifold();
    let n = domain.n();
    let nf = n as f64;
    let w = manifold.warp_at(domain.r0() + r_eval)?;
    let rv = (nf * (w.ln_f - ln_sinh(r_eval))).exp();
    let ln_omega = sphere_volume_constant(n)?.ln();
    let raw = [0.25, 0.5, 1.0]
        .iter()
        .map(|&s| {
            let r = s * r_eval;
            let ln_tube = domain.tube_volume_log(r)?;
            let ln_ball = ln_omega + ln_sinh_power_integral(n, r, manifold.step());
            Ok((r, (ln_tube - ln_ball).exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    let last = raw[2].1;
    let spread = (last - raw[1].1).abs() / last.abs();
    let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    Ok(RvEstimate { rv, full_spread: (hi - lo) / rv.abs(), spread, agreement: (rv - last).abs() / rv.abs(), raw })
}

/// Named constants entering a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportConstants {
    /// Mass of the profile (0 for the integral-curvature theorem).
    pub b: f64,
    /// `‖ρ‖_p` (0 for the asymptotic theorem).
    pub rho_norm: f64,
    pub cnp: Option<f64>,
    pub c_lemma: Option<f64>,
    pub lp_constant: Option<f64>,
    pub c_total: f64,
}

/// Both sides of one theorem's inequality on one domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WillmoreReport {
    pub theorem: Theorem,
    pub n: usize,
    pub p: Option<f64>,
    pub r0: f64,
    pub profile: String,
    /// `RV(Ω) · ω_n`
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    pub rv: RvEstimate,
    /// Minimum of `Ric + n + nλ` on the model (thm11), `+∞` when not applicable.
    pub admissibility: f64,
    pub constants: ReportConstants,
}

impl WillmoreReport {
    /// `margin ≥ −tol · max(1, |rhs|)`.
    pub fn passes(&self, tol: f64) -> bool {
        self.margin >= -tol * self.rhs.abs().max(1.0)
    }
}

fn require_monotone(profile: &DecayProfile) -> Result<()> {
    if profile.is_monotone() {
        Ok(())
    } else {
        Err(Error::UnsupportedProfile(format!("{profile} is not non-increasing")))
    }
}

/// `e^{2nb} ω_n f(r0)^n (1 + 2b + H/n)^n` when `H ≥ −n − 2nb`, else 0.
///
/// Errors with [`Error::Inadmissible`] when the model violates `Ric ≥ −n − nλ`
/// by more than [`ADMISSIBILITY_TOL`].
pub fn thm11_rhs(domain: &GeodesicBallDomain<'_>, profile: &DecayProfile) -> Result<f64> {
    require_monotone(profile)?;
    let margin = domain.manifold().verify_curvature_bound(profile).min();
    if margin < -ADMISSIBILITY_TOL {
        return Err(Error::Inadmissible { margin });
    }
    Ok(thm11_rhs_value(domain, profile.total_mass()))
}

fn thm11_rhs_value(domain: &GeodesicBallDomain<'_>, b: f64) -> f64 {
    let nf = domain.n() as f64;
    let h = domain.boundary_mean_curvature();
    if h < -nf - 2.0 * nf * b {
        return 0.0;
    }
    (2.0 * nf * b + domain.ln_boundary_area() + nf * (1.0 + 2.0 * b + h / nf).ln()).exp()
}

pub fn verify_thm11(domain: &GeodesicBallDomain<'_>, profile: &DecayProfile, r_eval: f64) -> Result<WillmoreReport> {
    let rhs = thm11_rhs(domain, profile)?;
    let admissibility = domain.manifold().verify_curvature_bound(profile).min();
    let rv = estimate_rv(domain, r_eval)?;
    let lhs = rv.rv * sphere_volume_constant(domain.n())?;
    Ok(WillmoreReport {
        theorem: Theorem::Thm11,
        n: domain.n(),
        p: None,
        r0: domain.r0(),
        profile: profile.to_string(),
        lhs,
        rhs,
        margin: rhs - lhs,
        rv,
        admissibility,
        constants: ReportConstants {
            b: profile.total_mass(),
            rho_norm: 0.0,
            cnp: None,
            c_lemma: None,
            lp_constant: None,
            c_total: 0.0,
        },
    })
}

/// Factors of the integral-curvature constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm12Constant {
    /// `C_lemma · C(n,p)^{2p} · K`
    pub c_total: f64,
    /// `C(2p, 2p, ‖ρ‖_p^{1/2})`; 0 when `‖ρ‖_p = 0`.
    pub c_lemma: f64,
    pub cnp: f64,
    /// `K = (n(2p − 1)/(2p − 1 − n))^p`
    pub lp_constant: f64,
}

/// Composes `C(n,p,‖ρ‖_p)` from the elementary-inequality constant at `ε = ‖ρ‖_p^{1/2}`,
/// `q = 2p`, the Jacobian constant `C(n,p)` and the `Lᵖ` comparison constant.
pub fn compose_thm12_constant(n: usize, p: f64, rho_norm: f64) -> Result<Thm12Constant> {
    if !(rho_norm >= 0.0 && rho_norm.is_finite()) {
        return Err(Error::Domain(format!("‖ρ‖_p must be finite and >= 0, got {rho_norm}")));
    }
    let cnp = cnp_constant(n, p)?;
    let lp_constant = lp_comparison_constant(n, p)?;
    if rho_norm == 0.0 {
        return Ok(Thm12Constant { c_total: 0.0, c_lemma: 0.0, cnp, lp_constant });
    }
    let c_lemma = Lemma31Params::new(2.0 * p, 2.0 * p, rho_norm.sqrt())?.constant_c();
    Ok(Thm12Constant { c_total: c_lemma * cnp.powf(2.0 * p) * lp_constant, c_lemma, cnp, lp_constant })
}

/// Integral-curvature inequality with `‖ρ‖_p` computed on `[0, r_cut]`.
///
/// The raw-ratio spread is reported in `rv`, not enforced; check
/// [`RvEstimate::trusted`] before relying on the left-hand side.
pub fn verify_thm12(domain: &GeodesicBallDomain<'_>, p: f64, r_eval: f64, r_cut: f64) -> Result<WillmoreReport> {
    let n = domain.n();
    let nf = n as f64;
    let h = domain.boundary_mean_curvature();
    if !(h >= 0.0) {
        return Err(Error::Precondition(format!("boundary must be mean-convex, H = {h}")));
    }
    let rho_norm = domain.manifold().lp_norm_rho(p, r_cut)?;
    let constant = compose_thm12_constant(n, p, rho_norm)?;
    let rv = estimate_rv(domain, r_eval)?;
    let lhs = rv.rv * sphere_volume_constant(n)?;
    // H is constant on a geodesic sphere, so the maximizer ξ can be any boundary point
    let willmore_factor = nf * (1.0 + h / nf).ln();
    let rhs = (1.0 + rho_norm.sqrt()) * (domain.ln_boundary_area() + willmore_factor).exp()
        + constant.c_total * willmore_factor.exp();
    Ok(WillmoreReport {
        theorem: Theorem::Thm12,
        n,
        p: Some(p),
        r0: domain.r0(),
        profile: domain.manifold().profile().to_string(),
        lhs,
        rhs,
        margin: rhs - lhs,
        rv,
        admissibility: f64::INFINITY,
        constants: ReportConstants {
            b: 0.0,
            rho_norm,
            cnp: Some(constant.cnp),
            c_lemma: Some(constant.c_lemma),
            lp_constant: Some(constant.lp_constant),
            c_total: constant.c_total,
        },
    })
}
