//! JSON run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use willmore_core::willmore::DEFAULT_TOL;
use willmore_core::{DecayProfile, Theorem, Warp, DEFAULT_STEP, MAX_STEP};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Lemma21,
    Lemma22,
    Lemma31,
    RiccatiBlowup,
    Thm11,
    Thm12,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Named {
    Zero,
}

/// A profile given either as a full object or by the name `"zero"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(Named),
    Full(DecayProfile),
}

impl From<ProfileSpec> for DecayProfile {
    fn from(spec: ProfileSpec) -> Self {
        match spec {
            ProfileSpec::Named(Named::Zero) => DecayProfile::Zero,
            ProfileSpec::Full(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremSpec {
    Thm11,
    Thm12,
}

impl From<TheoremSpec> for Theorem {
    fn from(t: TheoremSpec) -> Self {
        match t {
            TheoremSpec::Thm11 => Theorem::Thm11,
            TheoremSpec::Thm12 => Theorem::Thm12,
        }
    }
}

/// Flat run configuration. Every key is optional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_warp", alias = "manifold")]
    pub warp: Warp,
    pub profile: Option<ProfileSpec>,
    /// Several profiles for the comparison-equation commands.
    pub profiles: Option<Vec<ProfileSpec>>,
    #[serde(default = "default_r0")]
    pub r0: f64,
    pub r_max: Option<f64>,
    #[serde(default = "default_step")]
    pub step: f64,
    pub t_max: Option<f64>,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_r_eval")]
    pub r_eval: f64,
    #[serde(default = "default_r_cut")]
    pub r_cut: f64,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub b_grid: Option<Vec<f64>>,
    /// Initial `H/n` values for `riccati-blowup`.
    pub h_over_n: Option<Vec<f64>>,
    /// Distance of the hypersurface from the profile's base point.
    #[serde(default = "default_d0")]
    pub d0: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub theorem: Option<TheoremSpec>,
    pub ns: Option<Vec<usize>>,
    pub r0s: Option<Vec<f64>>,
    pub ps: Option<Vec<f64>>,
    #[serde(default)]
    pub plot: bool,
    pub out: Option<PathBuf>,
}

fn default_n() -> usize {
    2
}
fn default_warp() -> Warp {
    Warp::Hyperbolic
}
fn default_r0() -> f64 {
    1.0
}
fn default_step() -> f64 {
    DEFAULT_STEP
}
fn default_t_min() -> f64 {
    0.05
}
fn default_r_eval() -> f64 {
    40.0
}
fn default_r_cut() -> f64 {
    20.0
}
fn default_d0() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let at = text.find(&format!("\"{key}\""))?;
    Some(text[..at].matches('\n').count() + 1)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates `text`; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config {
            origin: origin.to_owned(),
            line: e.line(),
            message: e.to_string(),
        })?;
        config.validate().map_err(|(key, message)| CliError::Config {
            origin: origin.to_owned(),
            line: key_line(text, key).unwrap_or(1),
            message: format!("`{key}`: {message}"),
        })?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((key, format!("must be positive and finite, got {v}")))
            }
        };
        if self.n == 0 {
            return Err(("n", "must be at least 1".into()));
        }
        positive("r0", self.r0)?;
        positive("step", self.step)?;
        if self.step > MAX_STEP {
            return Err(("step", format!("must not exceed {MAX_STEP}, got {}", self.step)));
        }
        positive("t_min", self.t_min)?;
        positive("r_eval", self.r_eval)?;
        positive("r_cut", self.r_cut)?;
        positive("d0", self.d0)?;
        positive("tol", self.tol)?;
        for (key, v) in [("r_max", self.r_max), ("t_max", self.t_max), ("p", self.p), ("q", self.q)] {
            if let Some(v) = v {
                positive(key, v)?;
            }
        }
        for (key, grid) in
            [("eps_grid", &self.eps_grid), ("b_grid", &self.b_grid), ("r0s", &self.r0s), ("ps", &self.ps)]
        {
            if let Some(grid) = grid {
                if grid.is_empty() {
                    return Err((key, "must not be empty".into()));
                }
                grid.iter().try_for_each(|&v| positive(key, v))?;
            }
        }
        if let Some(h) = &self.h_over_n {
            if h.is_empty() || h.iter().any(|v| !v.is_finite()) {
                return Err(("h_over_n", "must be a non-empty list of finite values".into()));
            }
        }
        if let Some(ns) = &self.ns {
            if ns.is_empty() || ns.contains(&0) {
                return Err(("ns", "must be a non-empty list of dimensions >= 1".into()));
            }
        }
        if matches!(&self.profiles, Some(p) if p.is_empty()) {
            return Err(("profiles", "must not be empty".into()));
        }
        Ok(())
    }

    /// The explicit profile, or the one generating the warp.
    pub fn profile(&self) -> DecayProfile {
        self.profile.map(Into::into).unwrap_or_else(|| self.warp.profile())
    }

    pub fn profiles(&self) -> Vec<DecayProfile> {
        match &self.profiles {
            Some(list) => list.iter().copied().map(Into::into).collect(),
            None => vec![self.profile()],
        }
    }

    /// Radius the warp is solved to: `r_max` if given, else enough for a tube of
    /// width `r_eval` around the ball of radius `r0`.
    pub fn r_max_for(&self, r0: f64) -> f64 {
        self.r_max.unwrap_or(r0 + self.r_eval + 1.0)
    }
}
