//! One function per verification command, each producing report rows and
//! optional plot series.

use rayon::prelude::*;
use willmore_core::inequality::{verify_pointwise, Lemma31Params};
use willmore_core::numeric::ln_sinh;
use willmore_core::ode::{
    check_lemma21, check_lemma22, focal_bound_check, psi_ratio, psi_zero_crossing, solve_psi_pair, wronskian,
};
use willmore_core::tube::{evolve_riccati_free, evolve_tube};
use willmore_core::willmore::{verify_thm11, verify_thm12};
use willmore_core::{DecayProfile, GeodesicBallDomain, RotSymManifold, Theorem, Warp, WillmoreReport};

use crate::config::{Command, RunConfig, TheoremSpec};
use crate::error::CliError;
use crate::output::{CheckRow, Rows, Series, ThmRow};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "WILLMORE_THREADS";

const DEFAULT_EPS_GRID: [f64; 5] = [1.0, 0.1, 0.01, 1e-4, 1e-6];
const PLOT_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rows: Rows,
    pub plots: Vec<Series>,
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Lemma21 => lemma21(cfg),
        Command::Lemma22 => lemma22(cfg),
        Command::Lemma31 => lemma31(cfg),
        Command::RiccatiBlowup => riccati_blowup(cfg),
        Command::Thm11 => theorem(cfg, Theorem::Thm11),
        Command::Thm12 => theorem(cfg, Theorem::Thm12),
        Command::Sweep => sweep(cfg),
    }
}

/// At most [`PLOT_POINTS`] evenly strided points, always keeping the last one.
fn thin(points: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let all: Vec<_> = points.into_iter().filter(|(_, y)| y.is_finite()).collect();
    let stride = all.len().div_ceil(PLOT_POINTS).max(1);
    let mut out: Vec<_> = all.iter().copied().step_by(stride).collect();
    if let (Some(&last), Some(&kept)) = (all.last(), out.last()) {
        if last != kept {
            out.push(last);
        }
    }
    out
}

fn wronskian_drift(
    cfg: &RunConfig,
    p: &DecayProfile,
) -> Result<(f64, willmore_core::OdeSolution, willmore_core::OdeSolution), CliError> {
    let (s1, s2) = solve_psi_pair(p.radial(), cfg.t_max.unwrap_or(20.0), cfg.step)?;
    let drift = wronskian(&s1, &s2).iter().map(|w| (w - 1.0).abs()).fold(0.0, f64::max);
    Ok((drift, s1, s2))
}

fn lemma21(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (mut rows, mut plots) = (Vec::new(), Vec::new());
    for (i, p) in cfg.profiles().iter().enumerate() {
        let case = p.to_string();
        let (drift, s1, _) = wronskian_drift(cfg, p)?;
        let r = check_lemma21(&s1, p.radial(), Some(p.total_mass()), cfg.t_min);
        let row = |check: &str, value: f64, margin: f64| CheckRow::new("lemma21", &case, check, value, margin, cfg.tol);
        rows.push(row("lower_psi", r.lower_psi, r.lower_psi));
        rows.push(row("upper_psi", r.upper_psi, r.upper_psi));
        rows.push(row("lower_dpsi", r.lower_dpsi, r.lower_dpsi));
        rows.push(row("upper_dpsi", r.upper_dpsi, r.upper_dpsi));
        rows.push(row("ratio_monotone", r.final_ratio, r.ratio_monotone));
        if let Some(cap) = r.ratio_cap {
            rows.push(row("ratio_cap", r.final_ratio, cap));
        }
        rows.push(row("wronskian", drift, -drift));
        if cfg.plot {
            let grid = s1.grid();
            plots.push(Series::new(
                format!("lemma21_{i}_psi1"),
                "t",
                &format!("psi1 {case}"),
                thin((0..s1.len()).map(|k| (grid[k], s1.psi(k)))),
            ));
            plots.push(Series::new(
                format!("lemma21_{i}_psi1_over_sinh"),
                "t",
                &format!("psi1/sinh {case}"),
                thin((1..s1.len()).map(|k| (grid[k], (s1.ln_abs_psi(k) - ln_sinh(grid[k])).exp()))),
            ));
        }
    }
    Ok(Outcome { rows: Rows::Check(rows), plots })
}

fn lemma22(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (mut rows, mut plots) = (Vec::new(), Vec::new());
    for (i, p) in cfg.profiles().iter().enumerate() {
        let case = p.to_string();
        let (drift, s1, s2) = wronskian_drift(cfg, p)?;
        let r = check_lemma22(&s1, &s2, p.radial(), cfg.t_min);
        let row = |check: &str, value: f64, margin: f64| CheckRow::new("lemma22", &case, check, value, margin, cfg.tol);
        rows.push(row("ratio_bound", r.ratio_bound, r.ratio_bound));
        rows.push(row("ratio_monotone", r.final_ratio, r.ratio_monotone));
        rows.push(row("derivative_excess", r.derivative_excess, -r.derivative_excess));
        rows.push(row("derivative_residual", r.derivative_residual, -r.derivative_residual));
        rows.push(row("limit_bound", r.final_ratio, r.limit_bound));
        rows.push(row("wronskian", drift, -drift));
        if cfg.plot {
            let grid = s2.grid();
            let ratio = psi_ratio(&s1, &s2);
            plots.push(Series::new(
                format!("lemma22_{i}_psi2"),
                "t",
                &format!("psi2 {case}"),
                thin((0..s2.len()).map(|k| (grid[k], s2.psi(k)))),
            ));
            plots.push(Series::new(
                format!("lemma22_{i}_psi2_over_psi1"),
                "t",
                &format!("psi2/psi1 {case}"),
                thin(ratio.iter().enumerate().map(|(k, &r)| (grid[k + 1], r))),
            ));
        }
    }
    Ok(Outcome { rows: Rows::Check(rows), plots })
}

/// 60 points log-spaced over `[1e-8, 1e8]`.
pub fn default_b_grid() -> Vec<f64> {
    (0..60).map(|i| 10f64.powf(-8.0 + 16.0 * i as f64 / 59.0)).collect()
}

fn require(value: Option<f64>, key: &str, command: Command) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{command} needs `{key}`")))
}

fn lemma31(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = require(cfg.p, "p", Command::Lemma31)?;
    let q = require(cfg.q, "q", Command::Lemma31)?;
    let eps_grid = cfg.eps_grid.clone().unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec());
    let b_grid = cfg.b_grid.clone().unwrap_or_else(default_b_grid);
    let (mut rows, mut plots) = (Vec::new(), Vec::new());
    let mut constants = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let prm = Lemma31Params::new(p, q, eps)?;
        let case = format!("p={p};q={q};eps={eps}");
        let c = prm.constant_c();
        let pointwise = verify_pointwise(&prm, &b_grid)?;
        let (_, sup) = prm.sup_by_golden_section();
        rows.push(CheckRow::new("lemma31", &case, "pointwise", c, pointwise.min_relative_margin, cfg.tol));
        rows.push(CheckRow::new("lemma31", &case, "supremum", sup, -((c - sup) / c).abs(), cfg.tol));
        constants.push((eps, c));
        if cfg.plot {
            plots.push(Series::new(
                format!("lemma31_{i}_f"),
                "b",
                &format!("F(b) {case}"),
                b_grid.iter().map(|&b| (b, prm.f_value(b))).collect(),
            ));
        }
    }
    if constants.len() > 1 {
        constants.sort_by(|a, b| b.0.total_cmp(&a.0));
        let decrease = constants.windows(2).map(|w| (w[0].1 - w[1].1) / w[0].1).fold(f64::INFINITY, f64::min);
        let ratio = constants[constants.len() - 1].1 / constants[0].1;
        rows.push(CheckRow::new("lemma31", &format!("p={p};q={q}"), "vanishing", ratio, decrease, cfg.tol));
    }
    Ok(Outcome { rows: Rows::Check(rows), plots })
}

fn riccati_blowup(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let profile = cfg.profile();
    let n = cfg.n;
    let two_b = 2.0 * profile.total_mass();
    let h_grid = cfg.h_over_n.clone().unwrap_or_else(|| vec![-1.5 - two_b, -3.0 - two_b]);
    let lambda = profile.along_geodesic(cfg.d0);
    let (mut rows, mut plots) = (Vec::new(), Vec::new());
    for (i, &k) in h_grid.iter().enumerate() {
        let case = format!("{profile};n={n};d0={};h/n={k}", cfg.d0);
        let t0 = focal_bound_check(two_b, k, cfg.step)?;
        let horizon = cfg.t_max.unwrap_or(t0 + 1.0);
        let ev = evolve_riccati_free(lambda, n as f64 * k, n, horizon, cfg.step)?;
        let crossing = psi_zero_crossing(lambda, k, horizon, cfg.step)?;
        let blow = ev.blow_up.unwrap_or(f64::INFINITY);
        let zero = crossing.unwrap_or(f64::INFINITY);
        rows.push(CheckRow::new("riccati-blowup", &case, "focal_bound", t0, 0.0, cfg.tol));
        rows.push(CheckRow::new("riccati-blowup", &case, "blow_up", blow, t0 - blow, cfg.tol));
        rows.push(CheckRow::new("riccati-blowup", &case, "zero_crossing", zero, t0 - zero, cfg.tol));
        rows.push(CheckRow::new("riccati-blowup", &case, "blow_up_before_crossing", blow, zero - blow, cfg.tol));
        if cfg.plot {
            plots.push(Series::new(
                format!("riccati_{i}_m"),
                "t",
                &format!("m {case}"),
                thin(ev.grid.iter().copied().zip(ev.m.iter().copied())),
            ));
        }
    }
    Ok(Outcome { rows: Rows::Check(rows), plots })
}

fn build(cfg: &RunConfig, n: usize, warp: Warp, r0: f64) -> Result<RotSymManifold, CliError> {
    Ok(RotSymManifold::new(n, warp, cfg.r_max_for(r0), cfg.step)?)
}

fn verify(
    cfg: &RunConfig,
    theorem: Theorem,
    domain: &GeodesicBallDomain<'_>,
    p: Option<f64>,
) -> Result<WillmoreReport, CliError> {
    Ok(match theorem {
        Theorem::Thm11 => verify_thm11(domain, &cfg.profile(), cfg.r_eval)?,
        Theorem::Thm12 => verify_thm12(domain, require(p, "p", Command::Thm12)?, cfg.r_eval, cfg.r_cut)?,
    })
}

fn theorem(cfg: &RunConfig, theorem: Theorem) -> Result<Outcome, CliError> {
    let manifold = build(cfg, cfg.n, cfg.warp, cfg.r0)?;
    let domain = GeodesicBallDomain::new(&manifold, cfg.r0)?;
    let report = verify(cfg, theorem, &domain, cfg.p)?;
    let mut plots = Vec::new();
    if cfg.plot {
        let tube = evolve_tube(&domain, cfg.t_max.unwrap_or(10.0), cfg.step)?;
        let pts = |ys: &[f64]| thin(tube.grid.iter().copied().zip(ys.iter().copied()));
        plots.push(Series::new(format!("{theorem}_m"), "t", "m", pts(&tube.m)));
        plots.push(Series::new(format!("{theorem}_log_j"), "t", "logJ", pts(&tube.log_j)));
        plots.push(Series::new(format!("{theorem}_rv_raw"), "r", "raw volume ratio", report.rv.raw.clone()));
    }
    Ok(Outcome { rows: Rows::Theorem(vec![ThmRow::new(&report, cfg.tol)]), plots })
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let theorem: Theorem = cfg.theorem.unwrap_or(TheoremSpec::Thm11).into();
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![cfg.n]);
    let r0s = cfg.r0s.clone().unwrap_or_else(|| vec![cfg.r0]);
    let ps: Vec<Option<f64>> = match (&cfg.ps, theorem) {
        (Some(ps), Theorem::Thm12) => ps.iter().copied().map(Some).collect(),
        _ => vec![cfg.p],
    };
    let mut cases = Vec::with_capacity(ns.len() * r0s.len() * ps.len());
    for &n in &ns {
        for &r0 in &r0s {
            cases.extend(ps.iter().map(|&p| (n, r0, p)));
        }
    }
    let run_case = |&(n, r0, p): &(usize, f64, Option<f64>)| -> Result<ThmRow, CliError> {
        let manifold = build(cfg, n, cfg.warp, r0)?;
        let domain = GeodesicBallDomain::new(&manifold, r0)?;
        Ok(ThmRow::new(&verify(cfg, theorem, &domain, p)?, cfg.tol))
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<ThmRow, CliError>> = pool.install(|| cases.par_iter().map(run_case).collect());
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome { rows: Rows::Theorem(rows), plots: Vec::new() })
}
