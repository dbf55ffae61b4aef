//! Small numerical kernels shared by the verifiers: log-domain helpers,
//! composite Simpson quadrature, a fixed-size RK4 step and golden-section
//! search.

use std::f64::consts::LN_2;

/// `ln(sinh x)` for `x > 0`, accurate for large and small arguments.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    x - LN_2 + (-(-2.0 * x).exp_m1()).ln()
}

/// `ln(cosh x)`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - LN_2 + (-2.0 * a).exp().ln_1p()
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln Σ w_i e^{l_i}` for nonnegative weights, shifting by the maximum exponent.
pub fn log_weighted_sum(weights: impl IntoIterator<Item = f64>, logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = weights.into_iter().zip(logs).map(|(w, &l)| w * (l - m).exp()).sum();
    m + s.ln()
}

fn simpson_weight(i: usize, len: usize) -> f64 {
    if i == 0 || i + 1 == len {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Composite Simpson rule over equally spaced samples.
///
/// `values.len()` must be odd and at least 3.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let len = values.len();
    assert!(len >= 3 && len % 2 == 1, "simpson needs an odd sample count >= 3");
    let s: f64 = values.iter().enumerate().map(|(i, v)| simpson_weight(i, len) * v).sum();
    s * h / 3.0
}

/// Composite Simpson rule applied to `exp(log_values)`, returning the log of
/// the integral. Entries equal to `-inf` denote zero integrand values.
pub fn log_simpson(log_values: &[f64], h: f64) -> f64 {
    let len = log_values.len();
    assert!(len >= 3 && len % 2 == 1, "log_simpson needs an odd sample count >= 3");
    log_weighted_sum((0..len).map(|i| simpson_weight(i, len)), log_values) + (h / 3.0).ln()
}

/// Even interval count whose spacing does not exceed `max_step` on `[0, length]`.
pub fn even_intervals(length: f64, max_step: f64) -> usize {
    let n = (length / max_step - 1e-9).ceil().max(2.0) as usize;
    n + n % 2
}

/// One classical fourth-order Runge-Kutta step for a small autonomous-in-shape system.
pub fn rk4_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let axpy = |a: &[f64; N], s: f64, k: &[f64; N]| -> [f64; N] {
        let mut out = *a;
        for (o, k) in out.iter_mut().zip(k) {
            *o += s * k;
        }
        out
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Eighth-order central first-derivative weights for offsets -4..=4 (divide by h).
pub(crate) const CENTRAL_D1_ORDER8: [f64; 9] =
    [1.0 / 280.0, -4.0 / 105.0, 1.0 / 5.0, -4.0 / 5.0, 0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `x_tol * max(1, |x|)` or after
/// `max_iter` reductions. Returns `(argmax, max)`.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a) <= x_tol * c.abs().max(x_tol) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
