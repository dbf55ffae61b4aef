//! Mean curvature and Jacobian along outward normal geodesics of a geodesic sphere.
//!
//! On a rotationally symmetric model every geodesic sphere is umbilic, so the
//! matrix Jacobi system along a normal geodesic collapses to the scalar pair
//! `m = tr Y` (mean curvature of the parallel hypersurface) and
//! `log J = log det X`, with `(log J)' = m`.

use crate::error::{Error, Result};
use crate::manifold::GeodesicBallDomain;
use crate::numeric::{even_intervals, ln_cosh, log_simpson, simpson};

/// Threshold below which the Riccati solution is treated as having blown up.
pub const BLOW_UP_THRESHOLD: f64 = -1e6;

/// Fourth-order central first-derivative weights for offsets -2..=2 (divide by h).
const CENTRAL_D1_ORDER4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];

/// Mean curvature, log-Jacobian and hyperbolic comparators along one normal geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeEvolution {
    pub n: usize,
    /// Initial mean curvature `H`.
    pub h0: f64,
    pub grid: Vec<f64>,
    pub m: Vec<f64>,
    pub log_j: Vec<f64>,
    /// `NaN` where the comparator has degenerated.
    pub m_hat: Vec<f64>,
    pub log_j_hat: Vec<f64>,
    /// `max{m − m̂, 0}`; `NaN` where `m̂` is undefined.
    pub phi: Vec<f64>,
    /// Time at which `m → −∞`, if it happens before the end of the grid.
    pub blow_up: Option<f64>,
}

impl TubeEvolution {
    fn from_series(n: usize, h0: f64, grid: Vec<f64>, m: Vec<f64>, log_j: Vec<f64>, blow_up: Option<f64>) -> Self {
        let (m_hat, log_j_hat): (Vec<f64>, Vec<f64>) =
            grid.iter().map(|&t| hyperbolic_comparators(h0, n, t).unwrap_or((f64::NAN, f64::NAN))).unzip();
        let phi = m.iter().zip(&m_hat).map(|(m, mh)| if mh.is_nan() { f64::NAN } else { (m - mh).max(0.0) }).collect();
        Self { n, h0, grid, m, log_j, m_hat, log_j_hat, phi, blow_up }
    }

    /// `max |D(log J) − m|` over interior points of a uniform grid, with `D`
    /// a fourth-order central difference.
    pub fn log_j_residual(&self) -> f64 {
        if self.grid.len() < 5 {
            return 0.0;
        }
        let h = self.grid[1] - self.grid[0];
        (2..self.grid.len() - 2)
            .map(|i| {
                let d: f64 = (0..5).map(|k| CENTRAL_D1_ORDER4[k] * self.log_j[i + k - 2]).sum::<f64>() / h;
                (d - self.m[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `m(t) = n f'/f(r0 + t)` and `log J(t) = n log(f(r0 + t)/f(r0))` on a uniform grid with an
/// even number of intervals no wider than `step`.
pub fn evolve_tube(domain: &GeodesicBallDomain<'_>, t_max: f64, step: f64) -> Result<TubeEvolution> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(step > 0.0) {
        return Err(Error::Config(format!("need t_max > 0 and step > 0, got {t_max}, {step}")));
    }
    let manifold = domain.manifold();
    let r0 = domain.r0();
    if r0 + t_max > manifold.r_max() * (1.0 + 1e-14) {
        return Err(Error::Range(format!(
            "tube reaches r = {} beyond the solved range {}",
            r0 + t_max,
            manifold.r_max()
        )));
    }
    let n = domain.n();
    let nf = n as f64;
    let intervals = even_intervals(t_max, step);
    let h = t_max / intervals as f64;
    let base = manifold.warp_at(r0)?;
    let mut grid = Vec::with_capacity(intervals + 1);
    let mut m = Vec::with_capacity(intervals + 1);
    let mut log_j = Vec::with_capacity(intervals + 1);
    for i in 0..=intervals {
        let t = i as f64 * h;
        let w = if i == 0 { base } else { manifold.warp_at((r0 + t).min(manifold.r_max()))? };
        grid.push(t);
        m.push(nf * w.log_derivative);
        log_j.push(nf * (w.ln_f - base.ln_f));
    }
    Ok(TubeEvolution::from_series(n, m[0], grid, m, log_j, None))
}

/// Integrates the borderline Riccati equation `m' = n(1 + Λ(t)) − m²/n`, `(log J)' = m`
/// from `m(0) = H0`.
///
/// Once `|m| h / n` exceeds 1/20 the step is halved, repeatedly, so the
/// integration stays resolved as `m → −∞`. When `m` falls below
/// [`BLOW_UP_THRESHOLD`] the blow-up time is extrapolated from the local
/// behaviour `m ≈ −n/(t_* − t)`.
pub fn evolve_riccati_free<F: Fn(f64) -> f64>(
    lambda: F,
    h0: f64,
    n: usize,
    t_max: f64,
    step: f64,
) -> Result<TubeEvolution> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(t_max > 0.0 && t_max.is_finite()) || !(step > 0.0) {
        return Err(Error::Config(format!("need t_max > 0 and step > 0, got {t_max}, {step}")));
    }
    let nf = n as f64;
    let intervals = (t_max / step - 1e-9).ceil().max(1.0) as usize;
    let h = t_max / intervals as f64;
    let rhs = |t: f64, y: &[f64; 2]| [nf * (1.0 + lambda(t)) - y[0] * y[0] / nf, y[0]];

    let mut grid = vec![0.0];
    let mut m = vec![h0];
    let mut log_j = vec![0.0];
    let mut y = [h0, 0.0];
    let mut t = 0.0;
    let mut blow_up = None;
    for i in 1..=intervals {
        let t_next = i as f64 * h;
        while t < t_next {
            let mut hh = t_next - t;
            while hh * y[0].abs() / nf > 0.05 {
                hh *= 0.5;
            }
            y = crate::numeric::rk4_step(&rhs, t, &y, hh);
            t = if hh == t_next - t { t_next } else { t + hh };
            if t < t_next {
                grid.push(t);
                m.push(y[0]);
                log_j.push(y[1]);
            }
            if y[0] < BLOW_UP_THRESHOLD {
                blow_up = Some(t + nf / y[0].abs());
                break;
            }
        }
        if blow_up.is_some() {
            break;
        }
        grid.push(t);
        m.push(y[0]);
        log_j.push(y[1]);
    }
    Ok(TubeEvolution::from_series(n, h0, grid, m, log_j, blow_up))
}

/// `n log(cosh t + (2b + H0/n) sinh t) + 2nb`, or `None` when the argument of the
/// logarithm is not positive (the bound is then vacuous).
pub fn det_upper_bound(b: f64, h0: f64, n: usize, t: f64) -> Option<f64> {
    let nf = n as f64;
    let k = 2.0 * b + h0 / nf;
    let factor = 1.0 + k * t.tanh();
    if factor > 0.0 {
        Some(nf * (ln_cosh(t) + factor.ln()) + 2.0 * nf * b)
    } else {
        None
    }
}

/// Mean curvature `m̂` and `log Ĵ` of the parallel hypersurfaces in hyperbolic space
/// starting with mean curvature `H0`.
pub fn hyperbolic_comparators(h0: f64, n: usize, t: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let k = h0 / nf;
    let th = t.tanh();
    let factor = 1.0 + k * th;
    if !(factor > 0.0) {
        return Err(Error::Domain(format!("cosh t + (H/n) sinh t <= 0 at t = {t}")));
    }
    Ok((nf * (th + k) / factor, nf * (ln_cosh(t) + factor.ln())))
}

/// `max |m̂' + m̂²/n − n|` and `max |(log Ĵ)' − m̂|` over interior points of a uniform grid
/// on `[0, t_max]`, with fourth-order central differences.
pub fn comparator_residuals(h0: f64, n: usize, t_max: f64, step: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let count = (t_max / step).ceil().max(4.0) as usize;
    let h = t_max / count as f64;
    let vals = (0..=count).map(|i| hyperbolic_comparators(h0, n, i as f64 * h)).collect::<Result<Vec<_>>>()?;
    let (mut riccati, mut log_deriv) = (0.0f64, 0.0f64);
    for i in 2..count - 1 {
        let dm: f64 = (0..5).map(|k| CENTRAL_D1_ORDER4[k] * vals[i + k - 2].0).sum::<f64>() / h;
        let dl: f64 = (0..5).map(|k| CENTRAL_D1_ORDER4[k] * vals[i + k - 2].1).sum::<f64>() / h;
        let (mh, _) = vals[i];
        riccati = riccati.max((dm + mh * mh / nf - nf).abs());
        log_deriv = log_deriv.max((dl - mh).abs());
    }
    Ok((riccati, log_deriv))
}

fn check_p(n: usize, p: f64) -> Result<()> {
    let lower = (n as f64 + 1.0) / 2.0;
    if p > lower && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("p must exceed (n+1)/2 = {lower}, got {p}")))
    }
}

fn check_mean_convex(h: f64) -> Result<()> {
    if h >= 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("boundary must be mean-convex, H = {h}")))
    }
}

/// `(n(2p − 1)/(2p − 1 − n))^p`, the constant of the `Lᵖ` mean-curvature comparison.
pub fn lp_comparison_constant(n: usize, p: f64) -> Result<f64> {
    check_p(n, p)?;
    let nf = n as f64;
    Ok((nf * (2.0 * p - 1.0) / (2.0 * p - 1.0 - nf)).powf(p))
}

/// Both sides of `∫ φ^{2p} J ≤ K ∫ ρ^p J` along one normal geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpComparison {
    /// `∫_0^{t_max} φ^{2p} J dt`
    pub lhs: f64,
    /// `K ∫_0^{t_max} ρ(γ(t))^p J dt`
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
}

fn log_integrals(tube: &TubeEvolution, log_a: impl Fn(usize) -> f64) -> f64 {
    let h = tube.grid[1] - tube.grid[0];
    let logs: Vec<f64> = (0..tube.grid.len()).map(|i| log_a(i) + tube.log_j[i]).collect();
    log_simpson(&logs, h)
}

/// `∫_0^{t_max} φ^{2p} J` and `∫_0^{t_max} ρ^p J` along the radial geodesic leaving `Σ`.
fn weighted_integrals(domain: &GeodesicBallDomain<'_>, tube: &TubeEvolution, p: f64) -> Result<(f64, f64)> {
    let manifold = domain.manifold();
    let rho = tube
        .grid
        .iter()
        .map(|&t| manifold.rho_at((domain.r0() + t).min(manifold.r_max())))
        .collect::<Result<Vec<f64>>>()?;
    let phi_int = log_integrals(tube, |i| 2.0 * p * tube.phi[i].ln()).exp();
    let rho_int = log_integrals(tube, |i| p * rho[i].ln()).exp();
    Ok((phi_int, rho_int))
}

/// Checks the `Lᵖ` mean-curvature comparison along the outward radial geodesic.
pub fn verify_lp_mean_comparison(
    domain: &GeodesicBallDomain<'_>,
    p: f64,
    t_max: f64,
    step: f64,
) -> Result<LpComparison> {
    let k = lp_comparison_constant(domain.n(), p)?;
    check_mean_convex(domain.boundary_mean_curvature())?;
    let tube = evolve_tube(domain, t_max, step)?;
    let (phi_int, rho_int) = weighted_integrals(domain, &tube, p)?;
    let rhs = k * rho_int;
    Ok(LpComparison { lhs: phi_int, rhs, margin: rhs - phi_int })
}

/// Both sides of `J(r) ≤ Ĵ(r)(1 + C(n,p) I^{1/2p})^{2p}` with `I = ∫_0^r φ^{2p} J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianComparison {
    pub log_lhs: f64,
    pub log_rhs: f64,
    /// `Ĵ(1 + C I^{1/2p})^{2p} − J`
    pub margin: f64,
    /// `margin / RHS`
    pub relative_margin: f64,
}

/// Checks the Jacobian comparison at distance `r` from `Σ`, integrating on the manifold's step.
pub fn verify_jacobian_comparison(domain: &GeodesicBallDomain<'_>, p: f64, r: f64) -> Result<JacobianComparison> {
    verify_jacobian_comparison_with_step(domain, p, r, domain.manifold().step())
}

pub fn verify_jacobian_comparison_with_step(
    domain: &GeodesicBallDomain<'_>,
    p: f64,
    r: f64,
    step: f64,
) -> Result<JacobianComparison> {
    let c = cnp_constant(domain.n(), p)?;
    check_mean_convex(domain.boundary_mean_curvature())?;
    let tube = evolve_tube(domain, r, step)?;
    let phi_int = log_integrals(&tube, |i| 2.0 * p * tube.phi[i].ln()).exp();
    let last = tube.grid.len() - 1;
    let log_lhs = tube.log_j[last];
    let log_rhs = tube.log_j_hat[last] + 2.0 * p * (c * phi_int.powf(1.0 / (2.0 * p))).ln_1p();
    let relative_margin = -(log_lhs - log_rhs).exp_m1();
    Ok(JacobianComparison { log_lhs, log_rhs, margin: log_rhs.exp() * relative_margin, relative_margin })
}

const CNP_SPLIT: f64 = 10.0;
const CNP_INTERVALS: usize = 4000;

/// `∫_0^∞ cosh^{−α} t dt`: Simpson on `[0, 10]` plus the convergent binomial series of the tail.
pub fn sech_power_integral(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("exponent must be positive, got {alpha}")));
    }
    let h = CNP_SPLIT / CNP_INTERVALS as f64;
    let values: Vec<f64> = (0..=CNP_INTERVALS).map(|i| (-alpha * ln_cosh(i as f64 * h)).exp()).collect();
    let body = simpson(&values, h);
    // cosh^{−α} t = 2^α e^{−αt} (1 + e^{−2t})^{−α} = 2^α Σ_k binom(−α, k) e^{−(α + 2k) t}
    let mut tail = 0.0;
    let mut binom = 1.0;
    for k in 0..64 {
        let kf = k as f64;
        let term = binom * (-(alpha + 2.0 * kf) * CNP_SPLIT).exp() / (alpha + 2.0 * kf);
        tail += term;
        if term.abs() < 1e-300 || term.abs() < 1e-18 * tail.abs() {
            break;
        }
        binom *= (-alpha - kf) / (kf + 1.0);
    }
    Ok(body + 2f64.powf(alpha) * tail)
}

/// `C(n,p) = (1/2p) (∫_0^∞ cosh^{−n/(2p−1)} t dt)^{1 − 1/2p}`, which bounds the
/// comparator integral uniformly for mean-convex boundaries since `Ĵ ≥ coshⁿ`.
pub fn cnp_constant(n: usize, p: f64) -> Result<f64> {
    check_p(n, p)?;
    let integral = sech_power_integral(n as f64 / (2.0 * p - 1.0))?;
    Ok(integral.powf(1.0 - 1.0 / (2.0 * p)) / (2.0 * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{RotSymManifold, Warp};
    use crate::ode::DEFAULT_STEP;
    use approx::assert_relative_eq;

    #[test]
    fn hyperbolic_tube_closed_forms() {
        let m = RotSymManifold::new(2, Warp::Hyperbolic, 12.0, DEFAULT_STEP).unwrap();
        let d = GeodesicBallDomain::new(&m, 1.0).unwrap();
        let tube = evolve_tube(&d, 10.0, DEFAULT_STEP).unwrap();
        assert_eq!(tube.log_j[0], 0.0);
        assert_eq!(tube.m[0], d.boundary_mean_curvature());
        for i in (0..tube.grid.len()).step_by(1000) {
            let t = tube.grid[i];
            assert_relative_eq!(tube.m[i], 2.0 / (1.0 + t).tanh(), max_relative = 1e-13);
            let expected = 2.0 * ((1.0 + t).sinh() / 1f64.sinh()).ln();
            assert!((tube.log_j[i] - expected).abs() < 1e-12);
            assert!(tube.phi[i].abs() <= 1e-9);
        }
        assert!(tube.log_j_residual() < 1e-6);
    }

    #[test]
    fn riccati_fixed_point_and_closed_form() {
        let e = evolve_riccati_free(|_| 0.0, 2.0, 2, 5.0, DEFAULT_STEP).unwrap();
        assert!(e.m.iter().all(|&m| (m - 2.0).abs() < 1e-12));
        let e = evolve_riccati_free(|_| 0.0, 3.0 / 0.5f64.tanh(), 3, 5.0, DEFAULT_STEP).unwrap();
        let last = e.grid.len() - 1;
        assert_relative_eq!(e.m[last], 3.0 / 5.5f64.tanh(), max_relative = 1e-10);
        assert!(e.blow_up.is_none());
    }

    #[test]
    fn riccati_blow_up_matches_cot_zero() {
        // Λ = 0, H0/n = −3: m/n = (sinh t − 3 cosh t)/(cosh t − 3 sinh t), blow-up at atanh(1/3)
        let e = evolve_riccati_free(|_| 0.0, -6.0, 2, 3.0, DEFAULT_STEP).unwrap();
        let t = e.blow_up.unwrap();
        assert!((t - (1.0f64 / 3.0).atanh()).abs() < 1e-6, "{t}");
    }

    #[test]
    fn det_bound_examples() {
        assert_relative_eq!(det_upper_bound(0.0, 0.0, 2, 1.0).unwrap(), 2.0 * 1f64.cosh().ln(), max_relative = 1e-14);
        let expected = 2.0 * (2f64.cosh() + 2.0 * 2f64.sinh()).ln() + 4.0;
        assert_relative_eq!(det_upper_bound(1.0, 0.0, 2, 2.0).unwrap(), expected, max_relative = 1e-14);
        let r0 = 0.7f64;
        let v = det_upper_bound(0.0, 2.0 / r0.tanh(), 2, 1.5).unwrap();
        assert_relative_eq!(v, 2.0 * ((r0 + 1.5).sinh() / r0.sinh()).ln(), max_relative = 1e-13);
        assert!(det_upper_bound(0.0, -4.0, 2, 3.0).is_none());
    }

    #[test]
    fn comparator_examples() {
        let (m, l) = hyperbolic_comparators(3.0, 3, 2.5).unwrap();
        assert_relative_eq!(m, 3.0, max_relative = 1e-15);
        assert_relative_eq!(l, 7.5, max_relative = 1e-14);
        let (m, _) = hyperbolic_comparators(0.0, 2, 1.0).unwrap();
        assert_relative_eq!(m, 2.0 * 1f64.tanh());
        assert!(matches!(hyperbolic_comparators(-4.0, 2, 3.0), Err(Error::Domain(_))));
        let (a, b) = comparator_residuals(1.0, 2, 10.0, DEFAULT_STEP).unwrap();
        assert!(a < 1e-6 && b < 1e-6);
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(cnp_constant(2, 1.5), Err(Error::Precondition(_))));
        assert!(matches!(lp_comparison_constant(3, 1.0), Err(Error::Precondition(_))));
        assert!(cnp_constant(2, 1.5 + 1e-9).unwrap().is_finite());
    }

    #[test]
    fn sech_integral_special_values() {
        // ∫ sech = π/2, ∫ sech² = 1
        assert_relative_eq!(sech_power_integral(1.0).unwrap(), std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
        assert_relative_eq!(sech_power_integral(2.0).unwrap(), 1.0, max_relative = 1e-12);
    }
}
