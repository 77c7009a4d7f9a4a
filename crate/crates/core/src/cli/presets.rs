//! Built-in figure presets.

use std::fmt;
use std::str::FromStr;

use crate::channel::NormMode;
use crate::preconditioners::KindTag;
use crate::{Error, Result};

use super::plan::{ExperimentPlan, Metric, OmegaRule, RhoUnit, SchemeSel, SweepVar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1Left,
    Fig1Right,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Fig1Left,
        Preset::Fig1Right,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1Left => "fig1-left",
            Preset::Fig1Right => "fig1-right",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Plan(format!("unknown preset `{s}`")))
    }
}

/// Overrides shared by every preset.
#[derive(Debug, Clone, Copy)]
pub struct PresetOptions {
    pub trials: usize,
    pub seed: u64,
    pub norm_mode: NormMode,
    /// Unit of the nominal `ρ = 10` used by every preset except `fig3`.
    pub rho_unit: RhoUnit,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            trials: 10_000,
            seed: 1,
            norm_mode: NormMode::PerRealization,
            rho_unit: RhoUnit::Linear,
        }
    }
}

fn ns(tags: &[KindTag]) -> Vec<SchemeSel> {
    tags.iter().copied().map(SchemeSel::Ns).collect()
}

fn range(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}

const ALL_NS: [KindTag; 6] = [
    KindTag::Ins,
    KindTag::Dns,
    KindTag::Tns,
    KindTag::Cns,
    KindTag::Icns,
    KindTag::OrderedIcns,
];

/// Plans making up a preset; their rows are concatenated into one CSV.
pub fn preset_plans(preset: Preset, opts: &PresetOptions) -> Vec<ExperimentPlan> {
    let base = ExperimentPlan {
        c: 0.5,
        rho: 10.0,
        rho_unit: opts.rho_unit,
        trials: opts.trials,
        seed: opts.seed,
        norm_mode: opts.norm_mode,
        ..ExperimentPlan::default()
    };
    let omega_scan = |m: usize| ExperimentPlan {
        sweep: SweepVar::Omega,
        values: range(1.0, 0.05, 13),
        m: Some(m),
        k: Some(10),
        schemes: ns(&[KindTag::Ins, KindTag::Icns, KindTag::OrderedIcns]),
        metrics: vec![Metric::ErgodicSumRate, Metric::SimuApprox, Metric::TheoApprox],
        ..base.clone()
    };
    let ratio_vs_m = |k: Option<usize>, r: Option<f64>, values: Vec<f64>| ExperimentPlan {
        sweep: SweepVar::M,
        values,
        k,
        r,
        omega: OmegaRule::Star,
        schemes: {
            let mut s = ns(&ALL_NS);
            s.push(SchemeSel::Zf);
            s
        },
        metrics: vec![Metric::ZfRatio],
        ..base.clone()
    };
    let validation = |plan: ExperimentPlan| ExperimentPlan {
        schemes: vec![SchemeSel::Ns(KindTag::Ins), SchemeSel::Ns(KindTag::Icns), SchemeSel::Zf],
        metrics: vec![
            Metric::ErgodicSumRate,
            Metric::SimuApprox,
            Metric::TheoApprox,
            Metric::ZfRatio,
            Metric::SimuApproxZfRatio,
            Metric::TheoApproxZfRatio,
        ],
        ..plan
    };
    let fixed_k_ms = range(60.0, 10.0, 10);
    // multiples of 20 keep cM and rM integral for r ∈ {0.1, 0.2}
    let growing_ms = range(60.0, 40.0, 7);

    match preset {
        Preset::Fig1Left => vec![omega_scan(60)],
        Preset::Fig1Right => vec![omega_scan(100)],
        Preset::Fig2 => vec![ExperimentPlan {
            sweep: SweepVar::R,
            // r/c from 0.05 to 1
            values: range(0.025, 0.025, 20),
            m: Some(1000),
            schemes: ns(&[KindTag::Icns]),
            metrics: vec![
                Metric::SigGapUser1,
                Metric::IntGapUser1,
                Metric::SigGapOthers,
                Metric::IntGapOthers,
            ],
            ..base.clone()
        }],
        Preset::Fig3 => [10.0, 13.0, 16.0, 20.0]
            .into_iter()
            .map(|db| ExperimentPlan {
                sweep: SweepVar::R,
                values: range(0.005, 0.005, 99),
                m: Some(1000),
                rho: db,
                rho_unit: RhoUnit::Db,
                schemes: ns(&[KindTag::Ins]),
                metrics: vec![Metric::InsZfRatio, Metric::RStar],
                ..base.clone()
            })
            .collect(),
        Preset::Fig4 => vec![ratio_vs_m(Some(10), None, fixed_k_ms)],
        Preset::Fig5 => vec![ratio_vs_m(None, Some(0.1), growing_ms)],
        Preset::Fig6 => vec![ratio_vs_m(None, Some(0.2), growing_ms)],
        Preset::Fig7 => vec![validation(ratio_vs_m(Some(10), None, fixed_k_ms))],
        Preset::Fig8 => vec![validation(ratio_vs_m(None, Some(0.2), growing_ms))],
    }
}
