//! Experiment plans and their flat `key = value` file format.
//!
//! ```text
//! # ZF ratio against M
//! sweep   = M
//! values  = 60, 90, 120, 150
//! K       = 10
//! c       = 0.5
//! rho     = 10
//! schemes = INS, ICNS, OrderedICNS, ZF
//! metrics = zf_ratio
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::NormMode;
use crate::preconditioners::KindTag;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoUnit {
    Linear,
    Db,
}

impl RhoUnit {
    pub fn to_linear(self, value: f64) -> f64 {
        match self {
            RhoUnit::Linear => value,
            RhoUnit::Db => 10f64.powf(value / 10.0),
        }
    }
}

impl fmt::Display for RhoUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoUnit::Linear => "linear",
            RhoUnit::Db => "dB",
        })
    }
}

impl FromStr for RhoUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(RhoUnit::Linear),
            "db" => Ok(RhoUnit::Db),
            _ => Err(Error::Plan(format!("unknown rho unit `{s}`"))),
        }
    }
}

pub fn parse_norm_mode(s: &str) -> Result<NormMode> {
    match s.to_ascii_lowercase().as_str() {
        "per" | "perrealization" | "per-realization" => Ok(NormMode::PerRealization),
        "stat" | "statistical" => Ok(NormMode::Statistical),
        _ => Err(Error::Plan(format!("unknown normalization mode `{s}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    M,
    K,
    /// Loading factor `K/M`; `K` follows from the fixed `M`, or `M` from the
    /// fixed `K` when `M` is not given.
    R,
    Omega,
    Rho,
}

impl FromStr for SweepVar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(SweepVar::M),
            "K" | "k" => Ok(SweepVar::K),
            "r" | "R" => Ok(SweepVar::R),
            "omega" => Ok(SweepVar::Omega),
            "rho" => Ok(SweepVar::Rho),
            _ => Err(Error::Plan(format!("unknown sweep variable `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSel {
    Zf,
    Mrt,
    Ns(KindTag),
}

impl SchemeSel {
    pub fn name(self) -> &'static str {
        match self {
            SchemeSel::Zf => "ZF",
            SchemeSel::Mrt => "MRT",
            SchemeSel::Ns(tag) => tag.name(),
        }
    }
}

impl FromStr for SchemeSel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(SchemeSel::Zf),
            "mrt" => Ok(SchemeSel::Mrt),
            _ => s
                .parse::<KindTag>()
                .map(SchemeSel::Ns)
                .map_err(|_| Error::Plan(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ErgodicSumRate,
    SimuApprox,
    TheoApprox,
    /// Ergodic sum-rate over the ergodic ZF sum-rate on the same draws.
    ZfRatio,
    SimuApproxZfRatio,
    TheoApproxZfRatio,
    /// Large-system INS-to-ZF SINR ratio at `r = K/M`.
    InsZfRatio,
    /// Loading factor where the INS and ZF SINRs meet; one row per plan.
    RStar,
    SigGapUser1,
    IntGapUser1,
    SigGapOthers,
    IntGapOthers,
    Mults,
    Divs,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::ErgodicSumRate,
        Metric::SimuApprox,
        Metric::TheoApprox,
        Metric::ZfRatio,
        Metric::SimuApproxZfRatio,
        Metric::TheoApproxZfRatio,
        Metric::InsZfRatio,
        Metric::RStar,
        Metric::SigGapUser1,
        Metric::IntGapUser1,
        Metric::SigGapOthers,
        Metric::IntGapOthers,
        Metric::Mults,
        Metric::Divs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ErgodicSumRate => "ergodic_sum_rate",
            Metric::SimuApprox => "simu_approx",
            Metric::TheoApprox => "theo_approx",
            Metric::ZfRatio => "zf_ratio",
            Metric::SimuApproxZfRatio => "simu_approx_zf_ratio",
            Metric::TheoApproxZfRatio => "theo_approx_zf_ratio",
            Metric::InsZfRatio => "ins_zf_ratio",
            Metric::RStar => "r_star",
            Metric::SigGapUser1 => "sig_gap_user1",
            Metric::IntGapUser1 => "int_gap_user1",
            Metric::SigGapOthers => "sig_gap_others",
            Metric::IntGapOthers => "int_gap_others",
            Metric::Mults => "mults",
            Metric::Divs => "divs",
        }
    }

    /// Whether the metric needs Monte Carlo draws.
    pub fn simulated(self) -> bool {
        matches!(
            self,
            Metric::ErgodicSumRate | Metric::SimuApprox | Metric::ZfRatio | Metric::SimuApproxZfRatio
        )
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Plan(format!("unknown metric `{s}`")))
    }
}

/// Relaxation parameter selection for ω-using schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaRule {
    /// `1 + K/(cM)` at every sweep point.
    Star,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub sweep: SweepVar,
    /// Sweep values; for `rho` in `rho_unit`.
    pub values: Vec<f64>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    /// Fixed loading `K/M`, used to derive whichever of `M`, `K` is unset.
    pub r: Option<f64>,
    pub c: f64,
    /// Fixed SNR in `rho_unit`.
    pub rho: f64,
    pub rho_unit: RhoUnit,
    pub omega: OmegaRule,
    pub schemes: Vec<SchemeSel>,
    pub metrics: Vec<Metric>,
    pub trials: usize,
    pub seed: u64,
    pub norm_mode: NormMode,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            sweep: SweepVar::M,
            values: Vec::new(),
            m: None,
            k: None,
            r: None,
            c: 1.0,
            rho: 10.0,
            rho_unit: RhoUnit::Linear,
            omega: OmegaRule::Star,
            schemes: Vec::new(),
            metrics: vec![Metric::ErgodicSumRate],
            trials: 10_000,
            seed: 1,
            norm_mode: NormMode::PerRealization,
            out: None,
        }
    }
}

/// One fully resolved sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub m: usize,
    pub k: usize,
    pub c: f64,
    /// SNR as written in the plan (its unit is the plan's `rho_unit`).
    pub rho_display: f64,
    pub rho_linear: f64,
    /// Fixed ω when the plan sweeps or pins it, else `None` for ω★.
    pub omega: Option<f64>,
}

fn to_count(name: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && (v - v.round()).abs() < 1e-9 {
        Ok(v.round() as usize)
    } else {
        Err(Error::Plan(format!("{name} = {v} is not a positive integer")))
    }
}

impl ExperimentPlan {
    /// Expands the plan into sweep points; SNR conversion to linear happens
    /// here and nowhere else.
    pub fn points(&self) -> Result<Vec<Point>> {
        if self.values.is_empty() {
            return Err(Error::Plan("`values` is empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Plan("`schemes` is empty".into()));
        }
        let fixed_omega = match self.omega {
            OmegaRule::Star => None,
            OmegaRule::Fixed(w) => Some(w),
        };
        self.values
            .iter()
            .map(|&v| {
                let (m, k) = match self.sweep {
                    SweepVar::M => resolve(Some(to_count("M", v)?), self.k, self.r)?,
                    SweepVar::K => resolve(self.m, Some(to_count("K", v)?), self.r)?,
                    SweepVar::R => resolve(self.m, self.k.filter(|_| self.m.is_none()), Some(v))?,
                    SweepVar::Omega | SweepVar::Rho => resolve(self.m, self.k, self.r)?,
                };
                let rho = if self.sweep == SweepVar::Rho { v } else { self.rho };
                let omega = if self.sweep == SweepVar::Omega { Some(v) } else { fixed_omega };
                Ok(Point {
                    m,
                    k,
                    c: self.c,
                    rho_display: rho,
                    rho_linear: self.rho_unit.to_linear(rho),
                    omega,
                })
            })
            .collect()
    }
}

/// Completes `(M, K)` from a loading factor when one of them is missing.
fn resolve(m: Option<usize>, k: Option<usize>, r: Option<f64>) -> Result<(usize, usize)> {
    match (m, k, r) {
        (Some(m), Some(k), _) => Ok((m, k)),
        (Some(m), None, Some(r)) => Ok((m, to_count("K", r * m as f64)?)),
        (None, Some(k), Some(r)) => Ok((to_count("M", k as f64 / r)?, k)),
        _ => Err(Error::Plan("need two of `M`, `K`, `r`".into())),
    }
}

fn list<T: FromStr<Err = Error>>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Plan(format!("`{key}`: cannot parse `{value}`")))
}

/// Parses the `key = value` plan format. Unknown keys are rejected.
pub fn parse_plan(text: &str) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::default();
    let mut saw_sweep = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Plan(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "sweep" => {
                if saw_sweep {
                    return Err(Error::Plan("exactly one `sweep` variable is allowed".into()));
                }
                saw_sweep = true;
                plan.sweep = value.parse()?;
            }
            "values" => {
                plan.values = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| number::<f64>(key, s))
                    .collect::<Result<_>>()?
            }
            "M" => plan.m = Some(number(key, value)?),
            "K" => plan.k = Some(number(key, value)?),
            "r" => plan.r = Some(number(key, value)?),
            "c" => plan.c = number(key, value)?,
            "rho" => plan.rho = number(key, value)?,
            "rho_unit" => plan.rho_unit = value.parse()?,
            "omega" => {
                plan.omega = if value == "star" {
                    OmegaRule::Star
                } else {
                    OmegaRule::Fixed(number(key, value)?)
                }
            }
            "schemes" => plan.schemes = list(value)?,
            "metrics" => plan.metrics = list(value)?,
            "trials" => plan.trials = number(key, value)?,
            "seed" => plan.seed = number(key, value)?,
            "norm_mode" => plan.norm_mode = parse_norm_mode(value)?,
            "out" => plan.out = Some(PathBuf::from(value)),
            _ => return Err(Error::Plan(format!("line {}: unknown key `{key}`", lineno + 1))),
        }
    }
    if !saw_sweep {
        return Err(Error::Plan("missing `sweep`".into()));
    }
    Ok(plan)
}
