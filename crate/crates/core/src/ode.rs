//! The comparison equation `ψ'' = (1 + Λ(t)) ψ`.
//!
//! Solutions are integrated with fixed-step classical RK4. The state is
//! carried in double-double arithmetic with a separate binary exponent, so
//! quantities that are tiny differences of exponentially large terms (the
//! Wronskian, the decrease of `ψ₂/ψ₁`) stay resolvable over the whole grid and
//! nothing overflows before `t ≈ 10⁵`.

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numeric::{ln_cosh, ln_sinh, rk4_step, CENTRAL_D1_ORDER8};

/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Largest accepted integration step.
pub const MAX_STEP: f64 = 1e-2;
/// Absolute bisection tolerance for zero crossings.
pub const CROSSING_TOL: f64 = 1e-10;

const RESCALE_BITS: i32 = 512;

fn two(e: i32) -> f64 {
    2f64.powi(e)
}

/// A gridded solution of `ψ'' = (1 + Λ)ψ` on `[0, t_max]`.
///
/// Stored values are `scaled · 2^exponent`; use the accessor methods rather
/// than assuming the `f64` views are finite.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    step: f64,
    grid: Vec<f64>,
    value: Vec<TwoFloat>,
    deriv: Vec<TwoFloat>,
    exponent: Vec<i32>,
    lambda_samples: Vec<f64>,
}

impl OdeSolution {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().expect("solutions are never empty")
    }

    /// `Λ(t_i)` at every grid point.
    pub fn lambda_samples(&self) -> &[f64] {
        &self.lambda_samples
    }

    /// `ψ(t_i)`; may be infinite once `ψ` exceeds the `f64` range.
    pub fn psi(&self, i: usize) -> f64 {
        f64::from(self.value[i]) * two(self.exponent[i])
    }

    /// `ψ'(t_i)`.
    pub fn dpsi(&self, i: usize) -> f64 {
        f64::from(self.deriv[i]) * two(self.exponent[i])
    }

    pub fn psi_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.psi(i)).collect()
    }

    pub fn dpsi_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.dpsi(i)).collect()
    }

    /// `ln |ψ(t_i)|`, finite for every nonzero value regardless of magnitude.
    pub fn ln_abs_psi(&self, i: usize) -> f64 {
        f64::from(self.value[i]).abs().ln() + self.exponent[i] as f64 * std::f64::consts::LN_2
    }

    /// `ψ'(t_i) / ψ(t_i)`.
    pub fn log_derivative(&self, i: usize) -> f64 {
        f64::from(self.deriv[i] / self.value[i])
    }

    pub(crate) fn scaled(&self, i: usize) -> (TwoFloat, TwoFloat, i32) {
        (self.value[i], self.deriv[i], self.exponent[i])
    }

    /// Index of the grid interval containing `t`, with the offset into it.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let t_max = self.t_max();
        if !(t >= 0.0 && t <= t_max * (1.0 + 1e-14)) {
            return Err(Error::Range(format!("t = {t} outside solved range [0, {t_max}]")));
        }
        let last = self.len() - 1;
        let i = ((t / self.step).floor() as usize).min(last);
        let i = if i > 0 && self.grid[i] > t { i - 1 } else { i };
        Ok((i, (t - self.grid[i]).max(0.0)))
    }

    /// Value and derivative at an arbitrary `t` by a single RK4 sub-step from
    /// the grid point below it. `lambda` must be the coefficient used to solve.
    pub(crate) fn dense<F: Fn(f64) -> f64>(&self, lambda: &F, t: f64) -> Result<(TwoFloat, TwoFloat, i32)> {
        let (i, dt) = self.locate(t)?;
        let (v, d, e) = self.scaled(i);
        if dt == 0.0 {
            return Ok((v, d, e));
        }
        let (v, d) = rk4_dd(lambda, self.grid[i], dt, v, d);
        Ok((v, d, e))
    }

    /// `ln ψ(t)` and `ψ'(t)/ψ(t)` at arbitrary `t`.
    pub fn log_state_at<F: Fn(f64) -> f64>(&self, lambda: &F, t: f64) -> Result<(f64, f64)> {
        let (v, d, e) = self.dense(lambda, t)?;
        let lv = f64::from(v).abs().ln() + e as f64 * std::f64::consts::LN_2;
        Ok((lv, f64::from(d / v)))
    }
}

/// One RK4 step of `(y, y')` in double-double arithmetic.
fn rk4_dd<F: Fn(f64) -> f64>(lambda: &F, t: f64, h: f64, y: TwoFloat, dy: TwoFloat) -> (TwoFloat, TwoFloat) {
    let c0 = 1.0 + lambda(t);
    let cm = 1.0 + lambda(t + 0.5 * h);
    let c1 = 1.0 + lambda(t + h);
    let half = 0.5 * h;

    let k1y = dy;
    let k1d = y * c0;
    let k2y = dy + k1d * half;
    let k2d = (y + k1y * half) * cm;
    let k3y = dy + k2d * half;
    let k3d = (y + k2y * half) * cm;
    let k4y = dy + k3d * h;
    let k4d = (y + k3y * h) * c1;

    let sixth = TwoFloat::new_div(h, 6.0);
    let y_next = y + (k1y + (k2y + k3y) * 2.0 + k4y) * sixth;
    let dy_next = dy + (k1d + (k2d + k3d) * 2.0 + k4d) * sixth;
    (y_next, dy_next)
}

fn check_solver_params(t_max: f64, step: f64) -> Result<usize> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Config(format!("t_max must be positive and finite, got {t_max}")));
    }
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::Config(format!("step must lie in (0, {MAX_STEP}], got {step}")));
    }
    Ok((t_max / step - 1e-9).ceil().max(1.0) as usize)
}

/// Solves `ψ'' = (1 + Λ)ψ` with `ψ(0) = y0`, `ψ'(0) = dy0` on `[0, t_max]`.
///
/// The step actually used is `t_max / ⌈t_max / step⌉`, so `t_max` is a grid point.
pub fn solve_linear<F: Fn(f64) -> f64>(lambda: F, y0: f64, dy0: f64, t_max: f64, step: f64) -> Result<OdeSolution> {
    let intervals = check_solver_params(t_max, step)?;
    let h = t_max / intervals as f64;
    let len = intervals + 1;
    let mut sol = OdeSolution {
        step: h,
        grid: Vec::with_capacity(len),
        value: Vec::with_capacity(len),
        deriv: Vec::with_capacity(len),
        exponent: Vec::with_capacity(len),
        lambda_samples: Vec::with_capacity(len),
    };
    let (mut y, mut dy, mut e) = (TwoFloat::from(y0), TwoFloat::from(dy0), 0i32);
    for i in 0..len {
        let t = i as f64 * h;
        let lam = lambda(t);
        if !(lam >= 0.0) || !lam.is_finite() {
            return Err(Error::Precondition(format!("Λ must be finite and >= 0, got Λ({t}) = {lam}")));
        }
        sol.grid.push(t);
        sol.value.push(y);
        sol.deriv.push(dy);
        sol.exponent.push(e);
        sol.lambda_samples.push(lam);
        if i + 1 < len {
            (y, dy) = rk4_dd(&lambda, t, h, y, dy);
            if f64::from(y).abs().max(f64::from(dy).abs()) > two(RESCALE_BITS) {
                y *= two(-RESCALE_BITS);
                dy *= two(-RESCALE_BITS);
                e += RESCALE_BITS;
            }
        }
    }
    Ok(sol)
}

/// Solves for the pair `ψ₁` (`ψ₁(0) = 0, ψ₁'(0) = 1`) and `ψ₂` (`ψ₂(0) = 1, ψ₂'(0) = 0`).
pub fn solve_psi_pair<F: Fn(f64) -> f64>(lambda: F, t_max: f64, step: f64) -> Result<(OdeSolution, OdeSolution)> {
    let psi1 = solve_linear(&lambda, 0.0, 1.0, t_max, step)?;
    let psi2 = solve_linear(&lambda, 1.0, 0.0, t_max, step)?;
    Ok((psi1, psi2))
}

fn same_grid(a: &OdeSolution, b: &OdeSolution) -> bool {
    a.len() == b.len() && a.step == b.step
}

/// `ψ₂ψ₁' − ψ₁ψ₂'` at every grid point; identically 1 for the exact pair.
pub fn wronskian(psi1: &OdeSolution, psi2: &OdeSolution) -> Vec<f64> {
    assert!(same_grid(psi1, psi2), "solutions must share a grid");
    (0..psi1.len())
        .map(|i| {
            let (v1, d1, e1) = psi1.scaled(i);
            let (v2, d2, e2) = psi2.scaled(i);
            f64::from(v2 * d1 - v1 * d2) * two(e1 + e2)
        })
        .collect()
}

/// `ψ_a(t_i) / ψ_b(t_i)` in double-double.
fn ratio_dd(a: &OdeSolution, b: &OdeSolution, i: usize) -> TwoFloat {
    let (va, _, ea) = a.scaled(i);
    let (vb, _, eb) = b.scaled(i);
    va / vb * two(ea - eb)
}

/// `ψ₂(t_i) / ψ₁(t_i)` for `i >= 1`.
pub fn psi_ratio(psi1: &OdeSolution, psi2: &OdeSolution) -> Vec<f64> {
    assert!(same_grid(psi1, psi2), "solutions must share a grid");
    (1..psi1.len()).map(|i| f64::from(ratio_dd(psi2, psi1, i))).collect()
}

/// Slacks of the bounds on `ψ₁`. Every slack is relative to the bound it
/// tests; negative values are violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma21Report {
    /// `min (ψ₁ − sinh t) / sinh t`
    pub lower_psi: f64,
    /// `min (B − ψ₁) / B` with `B(t) = ∫_0^t e^{∫_0^s Λ} cosh s ds`
    pub upper_psi: f64,
    /// `min (ψ₁' − cosh t) / cosh t`
    pub lower_dpsi: f64,
    /// `min (e^{∫_0^t Λ} cosh t − ψ₁') / (e^{∫_0^t Λ} cosh t)`
    pub upper_dpsi: f64,
    /// `min` relative increment of `ψ₁ / sinh` between consecutive grid points.
    pub ratio_monotone: f64,
    /// `min (e^{mass} − ψ₁/sinh) / e^{mass}`, present when the mass of `Λ` is known.
    pub ratio_cap: Option<f64>,
    /// `ψ₁ / sinh` at the last grid point.
    pub final_ratio: f64,
}

impl Lemma21Report {
    pub fn min_slack(&self) -> f64 {
        [self.lower_psi, self.upper_psi, self.lower_dpsi, self.upper_dpsi, self.ratio_monotone]
            .into_iter()
            .chain(self.ratio_cap)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Checks the two-sided bounds on `ψ₁` and `ψ₁'`, the monotonicity of
/// `ψ₁ / sinh`, and (when `mass = ∫_0^∞ Λ` is known) its cap `e^{mass}`, at
/// grid points with `t >= t_min > 0`.
pub fn check_lemma21<F: Fn(f64) -> f64>(psi1: &OdeSolution, lambda: F, mass: Option<f64>, t_min: f64) -> Lemma21Report {
    let h = psi1.step();
    // A = ∫Λ, and B̃ = e^{-t} ∫_0^t e^{A} cosh, integrated alongside on the same grid.
    let rhs = |t: f64, y: &[f64; 2]| [lambda(t), 0.5 * y[0].exp() * (1.0 + (-2.0 * t).exp()) - y[1]];
    let mut acc = [0.0, 0.0];
    let mut report = Lemma21Report {
        lower_psi: f64::INFINITY,
        upper_psi: f64::INFINITY,
        lower_dpsi: f64::INFINITY,
        upper_dpsi: f64::INFINITY,
        ratio_monotone: f64::INFINITY,
        ratio_cap: mass.map(|_| f64::INFINITY),
        final_ratio: f64::NAN,
    };
    let mut prev_log_ratio: Option<f64> = None;
    for i in 0..psi1.len() {
        let t = psi1.grid()[i];
        if i > 0 {
            acc = rk4_step(&rhs, psi1.grid()[i - 1], &acc, h);
        }
        if t <= 0.0 || t < t_min {
            continue;
        }
        let ln_psi = psi1.ln_abs_psi(i);
        let ln_dpsi = psi1.ln_abs_psi(i) + psi1.log_derivative(i).ln();
        let log_ratio = ln_psi - ln_sinh(t);
        let ln_upper_psi = acc[1].ln() + t;
        let ln_upper_dpsi = acc[0] + ln_cosh(t);

        report.lower_psi = report.lower_psi.min(log_ratio.exp_m1());
        report.upper_psi = report.upper_psi.min(-(ln_psi - ln_upper_psi).exp_m1());
        report.lower_dpsi = report.lower_dpsi.min((ln_dpsi - ln_cosh(t)).exp_m1());
        report.upper_dpsi = report.upper_dpsi.min(-(ln_dpsi - ln_upper_dpsi).exp_m1());
        if let Some(prev) = prev_log_ratio {
            report.ratio_monotone = report.ratio_monotone.min((log_ratio - prev).exp_m1());
        }
        if let (Some(cap), Some(m)) = (report.ratio_cap.as_mut(), mass) {
            *cap = cap.min(-(log_ratio - m).exp_m1());
        }
        report.final_ratio = log_ratio.exp();
        prev_log_ratio = Some(log_ratio);
    }
    report
}

/// Slacks of the bounds on `ψ₂/ψ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma22Report {
    /// `min (U − ψ₂/ψ₁) / U` with `U = coth t + ∫_0^t Λ / cosh²`
    pub ratio_bound: f64,
    /// `min` relative decrease of `ψ₂/ψ₁` between consecutive grid points
    /// (nonnegative when the ratio is non-increasing).
    pub ratio_monotone: f64,
    /// `max |D(ψ₂/ψ₁) + 1/ψ₁²|` with `D` an eighth-order central difference.
    pub derivative_residual: f64,
    /// `max (D(ψ₂/ψ₁) + 1/ψ₁²)`, the one-sided version of the residual.
    pub derivative_excess: f64,
    /// `(1 + ∫_0^{T} Λ/cosh² − ψ₂/ψ₁(T)) / (1 + ∫_0^{T} Λ/cosh²)` at the last grid
    /// point `T`. Since the ratio decreases to its limit and the integral
    /// increases with `T`, a nonnegative value certifies the limit bound.
    pub limit_bound: f64,
    /// `ψ₂/ψ₁` at the last grid point.
    pub final_ratio: f64,
}

impl Lemma22Report {
    pub fn min_slack(&self) -> f64 {
        self.ratio_bound.min(self.ratio_monotone).min(self.limit_bound)
    }
}

/// Checks the upper bound on `ψ₂/ψ₁`, its monotone decrease, the identity
/// `(ψ₂/ψ₁)' = −1/ψ₁²` and the bound on its limit, at grid points with `t >= t_min > 0`.
pub fn check_lemma22<F: Fn(f64) -> f64>(
    psi1: &OdeSolution,
    psi2: &OdeSolution,
    lambda: F,
    t_min: f64,
) -> Lemma22Report {
    assert!(same_grid(psi1, psi2), "solutions must share a grid");
    let h = psi1.step();
    let len = psi1.len();
    let sech2 = |t: f64| (-2.0 * ln_cosh(t)).exp();
    let rhs = |t: f64, _: &[f64; 1]| [lambda(t) * sech2(t)];

    let ratios: Vec<TwoFloat> =
        (0..len).map(|i| if i == 0 { TwoFloat::from(f64::INFINITY) } else { ratio_dd(psi2, psi1, i) }).collect();

    let mut report = Lemma22Report {
        ratio_bound: f64::INFINITY,
        ratio_monotone: f64::INFINITY,
        derivative_residual: 0.0,
        derivative_excess: f64::NEG_INFINITY,
        limit_bound: f64::NAN,
        final_ratio: f64::from(ratios[len - 1]),
    };
    let mut integral = [0.0];
    let mut prev: Option<TwoFloat> = None;
    for i in 0..len {
        let t = psi1.grid()[i];
        if i > 0 {
            integral = rk4_step(&rhs, psi1.grid()[i - 1], &integral, h);
        }
        if t <= 0.0 || t < t_min {
            continue;
        }
        let r = ratios[i];
        let upper = 1.0 / t.tanh() + integral[0];
        report.ratio_bound = report.ratio_bound.min((upper - f64::from(r)) / upper);
        if let Some(p) = prev {
            report.ratio_monotone = report.ratio_monotone.min(f64::from((p - r) / p));
        }
        prev = Some(r);

        if i >= 5 && i + 4 < len {
            let mut d = TwoFloat::from(0.0);
            for (k, c) in CENTRAL_D1_ORDER8.iter().enumerate() {
                if *c != 0.0 {
                    d += ratios[i + k - 4] * *c;
                }
            }
            let (v1, _, e1) = psi1.scaled(i);
            let inv_sq = (v1 * v1).recip() * two(-2 * e1);
            let res = f64::from(d / h + inv_sq);
            report.derivative_residual = report.derivative_residual.max(res.abs());
            report.derivative_excess = report.derivative_excess.max(res);
        }
    }
    let cap = 1.0 + integral[0];
    report.limit_bound = (cap - report.final_ratio) / cap;
    report
}

/// First zero of `ψ = ψ₂ + (H/n) ψ₁` on `(0, t_max]`, refined by bisection to
/// [`CROSSING_TOL`]; `None` when `ψ > 0` on the whole grid.
pub fn psi_zero_crossing<F: Fn(f64) -> f64>(lambda: F, h_over_n: f64, t_max: f64, step: f64) -> Result<Option<f64>> {
    let (psi1, psi2) = solve_psi_pair(&lambda, t_max, step)?;
    let combine = |(v1, _, e1): (TwoFloat, TwoFloat, i32), (v2, _, e2): (TwoFloat, TwoFloat, i32)| -> f64 {
        let e = e1.max(e2);
        f64::from(v2 * two(e2 - e) + v1 * (h_over_n * two(e1 - e)))
    };
    let Some(i) = (1..psi1.len()).find(|&i| combine(psi1.scaled(i), psi2.scaled(i)) <= 0.0) else {
        return Ok(None);
    };
    let t_left = psi1.grid()[i - 1];
    let at = |dt: f64| -> f64 {
        let (a1, b1, e1) = psi1.scaled(i - 1);
        let (a2, b2, e2) = psi2.scaled(i - 1);
        let (v1, d1) = rk4_dd(&lambda, t_left, dt, a1, b1);
        let (v2, d2) = rk4_dd(&lambda, t_left, dt, a2, b2);
        combine((v1, d1, e1), (v2, d2, e2))
    };
    let (mut lo, mut hi) = (0.0, psi1.step());
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(t_left + 0.5 * (lo + hi)))
}

/// Smallest grid time `t₀ = k · step` with `coth t₀ + 2b + H/n < 0`.
///
/// Requires `H/n < −1 − 2b`; otherwise no such time exists.
pub fn focal_bound_check(two_b: f64, h_over_n: f64, step: f64) -> Result<f64> {
    if !(two_b >= 0.0 && two_b.is_finite()) {
        return Err(Error::Domain(format!("2b must be finite and >= 0, got {two_b}")));
    }
    if !(h_over_n < -1.0 - two_b) {
        return Err(Error::Precondition(format!("focal bound needs H/n < -1 - 2b = {}, got {h_over_n}", -1.0 - two_b)));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let holds = |t: f64| t > 0.0 && 1.0 / t.tanh() + two_b + h_over_n < 0.0;
    let k_of = |t: f64| t / step;
    let threshold = (-1.0 / (two_b + h_over_n)).atanh();
    let mut k = k_of(threshold).floor().max(0.0) as u64 + 1;
    while !holds(k as f64 * step) {
        k += 1;
    }
    while k > 1 && holds((k - 1) as f64 * step) {
        k -= 1;
    }
    Ok(k as f64 * step)
}
