//! The elementary inequality `(1 + b)^p ≤ 1 + ε + C(p,q,ε) ε^{−q} b^p` for `b ≥ 0`.
//!
//! `C(p,q,ε)` is the supremum over `b > 0` of
//! `F(b) = ε^q ((1 + b)^p − 1 − ε) / b^p`, attained at `b̃ = (1 + ε)^{1/(p−1)} − 1`.
//! All powers go through `exp`/`ln` so relative accuracy is uniform in `b`.

use crate::error::{Error, Result};
use crate::numeric::{golden_section_max, log_add_exp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma31Params {
    p: f64,
    q: f64,
    eps: f64,
}

impl Lemma31Params {
    /// Requires `p > 1`, `q > p − 1` and `ε > 0`.
    pub fn new(p: f64, q: f64, eps: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Precondition(format!("p must be > 1, got {p}")));
        }
        if !(q > p - 1.0 && q.is_finite()) {
            return Err(Error::Precondition(format!("q must be > p - 1 = {}, got {q}", p - 1.0)));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Precondition(format!("eps must be > 0, got {eps}")));
        }
        Ok(Self { p, q, eps })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `b̃ = (1 + ε)^{1/(p−1)} − 1`.
    pub fn critical_point(&self) -> f64 {
        (self.eps.ln_1p() / (self.p - 1.0)).exp_m1()
    }

    /// `F(b)` for `b > 0`.
    pub fn f_value(&self, b: f64) -> f64 {
        let numer = (self.p * b.ln_1p()).exp_m1() - self.eps;
        numer * (self.q * self.eps.ln() - self.p * b.ln()).exp()
    }

    /// `F(b̃) = (ε^{q/(p−1)} / b̃ + ε^{q/(p−1)})^{p−1}`.
    pub fn critical_value(&self) -> f64 {
        let bt = self.critical_point();
        (self.q * self.eps.ln() + (self.p - 1.0) * (bt.ln_1p() - bt.ln())).exp()
    }

    /// `C(p,q,ε) = max{F(b̃), ε^q}`.
    pub fn constant_c(&self) -> f64 {
        self.critical_value().max(self.eps.powf(self.q))
    }

    /// Numerical supremum of `F` over `(0, 10 b̃ + 10]` together with the limit `ε^q`
    /// at infinity; returns `(argmax, sup)`.
    pub fn sup_by_golden_section(&self) -> (f64, f64) {
        let hi = 10.0 * self.critical_point() + 10.0;
        let (b, fb) = golden_section_max(|b| self.f_value(b), 0.0, hi, 1e-13, 2000);
        let tail = self.eps.powf(self.q);
        if fb >= tail {
            (b, fb)
        } else {
            (f64::INFINITY, tail)
        }
    }

    /// `ln(1 + ε + C ε^{−q} b^p)`.
    fn ln_rhs(&self, b: f64) -> f64 {
        let ln_coef = self.constant_c().ln() - self.q * self.eps.ln();
        if b == 0.0 {
            return self.eps.ln_1p();
        }
        log_add_exp(self.eps.ln_1p(), ln_coef + self.p * b.ln())
    }
}

/// Result of checking the inequality on a grid of `b` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseCheck {
    /// `min (RHS − LHS) / max(1, RHS)`
    pub min_relative_margin: f64,
    /// Grid value attaining the minimum.
    pub at_b: f64,
}

/// Evaluates `(RHS − LHS)/max(1, RHS)` at each `b >= 0` of the grid and returns the minimum.
pub fn verify_pointwise(params: &Lemma31Params, b_grid: &[f64]) -> Result<PointwiseCheck> {
    let mut out = PointwiseCheck { min_relative_margin: f64::INFINITY, at_b: f64::NAN };
    for &b in b_grid {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("b must be finite and >= 0, got {b}")));
        }
        let ln_rhs = params.ln_rhs(b);
        let ln_lhs = params.p * b.ln_1p();
        let rel = if ln_rhs >= 0.0 { -(ln_lhs - ln_rhs).exp_m1() } else { ln_rhs.exp() - ln_lhs.exp() };
        if rel < out.min_relative_margin {
            out = PointwiseCheck { min_relative_margin: rel, at_b: b };
        }
    }
    Ok(out)
}

/// `C(p,q,ε)` along a grid of `ε` values; requires `q > p − 1`.
pub fn vanishing_limit(p: f64, q: f64, eps_grid: &[f64]) -> Result<Vec<f64>> {
    eps_grid.iter().map(|&eps| Lemma31Params::new(p, q, eps).map(|prm| prm.constant_c())).collect()
}
