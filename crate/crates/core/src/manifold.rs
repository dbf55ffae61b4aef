//! Rotationally symmetric models `dr² + f(r)² g_{Sⁿ}` and geodesic balls about `r = 0`.
//!
//! For a warp generated by `f'' = (1 + λ)f`, `f(0) = 0`, `f'(0) = 1`, the
//! quantity `Q = f'² − f² − 1 = ∫_0^r 2 f f' λ` controls the tangential Ricci
//! curvature:
//!
//! ```text
//! Ric_rad = −n f''/f = −n(1 + λ)
//! Ric_tan = −f''/f + (n − 1)(1 − f'²)/f² = −n − λ − (n − 1) Q/f²
//! ```
//!
//! `Q/f²` is tabulated on the solver grid through a scaled recurrence, so no
//! cancellation between `f'²` and `f²` ever happens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{even_intervals, ln_sinh, log_simpson};
use crate::ode::{solve_linear, OdeSolution, MAX_STEP};
use crate::profiles::DecayProfile;

/// `ω_n`, the area of the unit sphere `Sⁿ ⊂ ℝ^{n+1}`.
pub fn sphere_volume_constant(n: usize) -> Result<f64> {
    use std::f64::consts::PI;
    match n {
        0 => Err(Error::Domain("sphere dimension must be >= 1".into())),
        _ => {
            let (mut w, mut k) = if n.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
            while k < n {
                k += 2;
                w *= 2.0 * PI / (k - 1) as f64;
            }
            Ok(w)
        }
    }
}

/// Warping function of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warp {
    /// `f = sinh`
    Hyperbolic,
    /// `f = ψ₁` for the profile, i.e. `f'' = (1 + λ(r)) f`.
    Psi1(DecayProfile),
}

impl Warp {
    /// The profile driving the warp; [`DecayProfile::Zero`] for hyperbolic space.
    pub fn profile(&self) -> DecayProfile {
        match self {
            Warp::Hyperbolic => DecayProfile::Zero,
            Warp::Psi1(p) => *p,
        }
    }
}

impl std::fmt::Display for Warp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warp::Hyperbolic => write!(f, "hyperbolic"),
            Warp::Psi1(p) => write!(f, "psi1[{p}]"),
        }
    }
}

/// Warp data at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpPoint {
    pub ln_f: f64,
    /// `f'/f`
    pub log_derivative: f64,
    /// `Q/f² = (f'² − f² − 1)/f²`
    pub q_ratio: f64,
    /// `λ(r)` of the generating profile
    pub lambda: f64,
}

/// Minimum of `Ric + n + nλ` over the solver grid, per direction class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureMargin {
    pub radial: f64,
    pub tangential: f64,
    /// Radius at which the overall minimum occurs.
    pub at_r: f64,
}

impl CurvatureMargin {
    pub fn min(&self) -> f64 {
        self.radial.min(self.tangential)
    }
}

#[derive(Debug, Clone)]
struct Psi1Table {
    sol: OdeSolution,
    q_ratio: Vec<f64>,
}

/// A warped product `([0, ∞) × Sⁿ, dr² + f(r)² g_{Sⁿ})` with base point `o` at `r = 0`.
#[derive(Debug, Clone)]
pub struct RotSymManifold {
    n: usize,
    warp: Warp,
    r_max: f64,
    step: f64,
    table: Option<Psi1Table>,
}

impl RotSymManifold {
    /// Builds the model on `[0, r_max]`. A ψ₁ warp is solved once here.
    pub fn new(n: usize, warp: Warp, r_max: f64, step: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be >= 1".into()));
        }
        let table = match warp {
            Warp::Hyperbolic => {
                if !(r_max.is_finite() && r_max > 0.0) {
                    return Err(Error::Config(format!("r_max must be positive and finite, got {r_max}")));
                }
                if !(step > 0.0 && step <= MAX_STEP) {
                    return Err(Error::Config(format!("step must lie in (0, {MAX_STEP}], got {step}")));
                }
                None
            }
            Warp::Psi1(profile) => {
                let sol = solve_linear(profile.radial(), 0.0, 1.0, r_max, step)?;
                let q_ratio = tabulate_q_ratio(&sol, &profile);
                Some(Psi1Table { sol, q_ratio })
            }
        };
        let step = table.as_ref().map_or(step, |t| t.sol.step());
        let m = Self { n, warp, r_max, step, table };
        m.check_positivity()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn warp(&self) -> Warp {
        self.warp
    }

    pub fn profile(&self) -> DecayProfile {
        self.warp.profile()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn check_positivity(&self) -> Result<()> {
        if let Some(t) = &self.table {
            for i in 1..t.sol.len() {
                if !(t.sol.log_derivative(i) > 0.0) || !(t.sol.psi(i) > 0.0) {
                    return Err(Error::Precondition(format!("warp is not increasing at r = {}", t.sol.grid()[i])));
                }
            }
        }
        Ok(())
    }

    fn check_range(&self, r: f64) -> Result<()> {
        if r > 0.0 && r <= self.r_max * (1.0 + 1e-14) {
            Ok(())
        } else {
            Err(Error::Range(format!("r = {r} outside (0, {}]", self.r_max)))
        }
    }

    /// `ln f`, `f'/f`, `Q/f²` and `λ` at `0 < r <= r_max`.
    pub fn warp_at(&self, r: f64) -> Result<WarpPoint> {
        self.check_range(r)?;
        match &self.table {
            None => Ok(WarpPoint { ln_f: ln_sinh(r), log_derivative: 1.0 / r.tanh(), q_ratio: 0.0, lambda: 0.0 }),
            Some(t) => {
                let profile = self.profile();
                let lambda = profile.radial();
                let (ln_f, log_derivative) = t.sol.log_state_at(&lambda, r)?;
                let (i, _) = t.sol.locate(r)?;
                let q_ratio = q_ratio_step(&t.sol, &profile, i, t.q_ratio[i], r, ln_f)?;
                Ok(WarpPoint { ln_f, log_derivative, q_ratio, lambda: profile.value(r) })
            }
        }
    }

    fn grid_point(&self, i: usize) -> (f64, WarpPoint) {
        let t = self.table.as_ref().expect("grid points exist only for solved warps");
        let r = t.sol.grid()[i];
        let point = WarpPoint {
            ln_f: t.sol.ln_abs_psi(i),
            log_derivative: t.sol.log_derivative(i),
            q_ratio: t.q_ratio[i],
            lambda: t.sol.lambda_samples()[i],
        };
        (r, point)
    }

    fn ricci_from(&self, w: &WarpPoint) -> (f64, f64) {
        let n = self.n as f64;
        let radial = -n * (1.0 + w.lambda);
        let tangential = -n - w.lambda - (n - 1.0) * w.q_ratio;
        (radial, tangential)
    }

    /// `(Ric(∂_r, ∂_r), Ric(e, e))` for a unit radial and a unit tangential direction.
    pub fn ricci_extremes(&self, r: f64) -> Result<(f64, f64)> {
        Ok(self.ricci_from(&self.warp_at(r)?))
    }

    /// Minimum of `Ric + n + nλ(r)` over the grid `r_i ∈ (0, r_max]`, per direction class.
    pub fn verify_curvature_bound(&self, profile: &DecayProfile) -> CurvatureMargin {
        let n = self.n as f64;
        let mut margin = CurvatureMargin { radial: f64::INFINITY, tangential: f64::INFINITY, at_r: f64::NAN };
        let mut best = f64::INFINITY;
        let mut visit = |r: f64, w: WarpPoint| {
            let (rad, tan) = self.ricci_from(&w);
            let allowance = n + n * profile.value(r);
            margin.radial = margin.radial.min(rad + allowance);
            margin.tangential = margin.tangential.min(tan + allowance);
            if margin.min() < best {
                best = margin.min();
                margin.at_r = r;
            }
        };
        match &self.table {
            Some(t) => {
                for i in 1..t.sol.len() {
                    let (r, w) = self.grid_point(i);
                    visit(r, w);
                }
            }
            None => {
                let count = (self.r_max / self.step).ceil() as usize;
                for i in 1..=count {
                    let r = self.r_max * i as f64 / count as f64;
                    visit(r, self.warp_at(r).expect("inside range"));
                }
            }
        }
        margin
    }

    /// `ρ(r) = max{−n − min(Ric_rad, Ric_tan), 0}`.
    pub fn rho_at(&self, r: f64) -> Result<f64> {
        let (rad, tan) = self.ricci_extremes(r)?;
        Ok((-(self.n as f64) - rad.min(tan)).max(0.0))
    }

    /// `‖ρ‖_p = (ω_n ∫_0^{r_cut} ρ^p f^n dr)^{1/p}` by composite Simpson.
    pub fn lp_norm_rho(&self, p: f64, r_cut: f64) -> Result<f64> {
        let n = self.n as f64;
        if !(p > (n + 1.0) / 2.0) {
            return Err(Error::Precondition(format!("p must exceed (n+1)/2 = {}, got {p}", (n + 1.0) / 2.0)));
        }
        self.check_range(r_cut)?;
        let intervals = even_intervals(r_cut, self.step);
        let h = r_cut / intervals as f64;
        let logs = (0..=intervals)
            .map(|i| {
                if i == 0 {
                    return Ok(f64::NEG_INFINITY);
                }
                let r = i as f64 * h;
                let w = self.warp_at(r)?;
                let (rad, tan) = self.ricci_from(&w);
                let rho = (-n - rad.min(tan)).max(0.0);
                Ok(p * rho.ln() + n * w.ln_f)
            })
            .collect::<Result<Vec<f64>>>()?;
        let ln_integral = log_simpson(&logs, h) + sphere_volume_constant(self.n)?.ln();
        Ok((ln_integral / p).exp())
    }

    /// `ln ∫_0^R f^n` by composite Simpson with spacing at most the solver step.
    pub fn ln_volume_integral(&self, big_r: f64) -> Result<f64> {
        self.check_range(big_r)?;
        let n = self.n as f64;
        let intervals = even_intervals(big_r, self.step);
        let h = big_r / intervals as f64;
        let logs = (0..=intervals)
            .map(|i| if i == 0 { Ok(f64::NEG_INFINITY) } else { Ok(n * self.warp_at(i as f64 * h)?.ln_f) })
            .collect::<Result<Vec<f64>>>()?;
        Ok(log_simpson(&logs, h))
    }
}

/// `Q/f²` on the solver grid via `S_{i+1} = S_i (f_i/f_{i+1})² + ∫ 2 (f/f_{i+1})² (f'/f) λ`.
fn tabulate_q_ratio(sol: &OdeSolution, profile: &DecayProfile) -> Vec<f64> {
    let mut out = Vec::with_capacity(sol.len());
    out.push(profile.value(0.0));
    for i in 0..sol.len() - 1 {
        let r = sol.grid()[i + 1];
        let next = q_ratio_step(sol, profile, i, out[i], r, sol.ln_abs_psi(i + 1)).expect("grid points are in range");
        out.push(next);
    }
    out
}

fn q_ratio_step(sol: &OdeSolution, profile: &DecayProfile, i: usize, s_i: f64, r: f64, ln_f_r: f64) -> Result<f64> {
    let r_i = sol.grid()[i];
    if r == r_i {
        return Ok(s_i);
    }
    let lambda = profile.radial();
    let integrand = |s: f64, ln_f: f64, g: f64| -> f64 {
        if s == 0.0 {
            0.0
        } else {
            2.0 * (2.0 * (ln_f - ln_f_r)).exp() * g * profile.value(s)
        }
    };
    let mid = 0.5 * (r_i + r);
    let (ln_m, g_m) = sol.log_state_at(&lambda, mid)?;
    let (ln_i, g_i) =
        if i == 0 { (f64::NEG_INFINITY, f64::INFINITY) } else { (sol.ln_abs_psi(i), sol.log_derivative(i)) };
    let (_, g_r) = sol.log_state_at(&lambda, r)?;
    let carried = if i == 0 { 0.0 } else { s_i * (2.0 * (ln_i - ln_f_r)).exp() };
    let quad =
        (r - r_i) / 6.0 * (integrand(r_i, ln_i, g_i) + 4.0 * integrand(mid, ln_m, g_m) + integrand(r, ln_f_r, g_r));
    Ok(carried + quad)
}

/// The geodesic ball `Ω = B(o, r0)` with boundary the geodesic sphere `Σ = {r = r0}`.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicBallDomain<'a> {
    manifold: &'a RotSymManifold,
    r0: f64,
}

impl<'a> GeodesicBallDomain<'a> {
    pub fn new(manifold: &'a RotSymManifold, r0: f64) -> Result<Self> {
        manifold.check_range(r0)?;
        Ok(Self { manifold, r0 })
    }

    pub fn manifold(&self) -> &'a RotSymManifold {
        self.manifold
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn n(&self) -> usize {
        self.manifold.n
    }

    /// `H = n f'(r0)/f(r0)` with respect to the outward normal; constant on `Σ`.
    pub fn boundary_mean_curvature(&self) -> f64 {
        let w = self.manifold.warp_at(self.r0).expect("r0 checked at construction");
        self.manifold.n as f64 * w.log_derivative
    }

    /// `ln |Σ| = ln(ω_n f(r0)^n)`.
    pub fn ln_boundary_area(&self) -> f64 {
        let w = self.manifold.warp_at(self.r0).expect("r0 checked at construction");
        sphere_volume_constant(self.manifold.n).expect("n >= 1").ln() + self.manifold.n as f64 * w.ln_f
    }

    /// `ln vol{x : d(x, Ω) <= r} = ln(ω_n ∫_0^{r0 + r} f^n)`.
    pub fn tube_volume_log(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("tube width must be >= 0, got {r}")));
        }
        let ln_omega = sphere_volume_constant(self.manifold.n)?.ln();
        Ok(ln_omega + self.manifold.ln_volume_integral(self.r0 + r)?)
    }
}
