//! Oracle suites behind `nsmimo check`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::dual_code_discrepancy;
use crate::channel::{draw_gram, trial_seed, SystemConfig};
use crate::linalg::{frobenius_diff, identity};
use crate::preconditioners::{build_precondition, omega_star, KindTag};
use crate::simulate::{eigen_edge_report, lemma2_moments, MonteCarloPlan};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSuite {
    Moments,
    Edges,
    Inverses,
    DualCode,
}

impl CheckSuite {
    pub const ALL: [CheckSuite; 4] = [
        CheckSuite::Moments,
        CheckSuite::Edges,
        CheckSuite::Inverses,
        CheckSuite::DualCode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckSuite::Moments => "moments",
            CheckSuite::Edges => "edges",
            CheckSuite::Inverses => "inverses",
            CheckSuite::DualCode => "dualcode",
        }
    }
}

impl FromStr for CheckSuite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckSuite::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Plan(format!("unknown check `{s}`")))
    }
}

/// One measured quantity and the bound it must stay under.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub suite: &'static str,
    pub label: String,
    pub measured: f64,
    pub bound: f64,
}

impl CheckLine {
    pub fn pass(&self) -> bool {
        self.measured < self.bound
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {:.3e} (bound {:.0e})",
            if self.pass() { "PASS" } else { "FAIL" },
            self.suite,
            self.label,
            self.measured,
            self.bound
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Overrides each suite's default trial count.
    pub trials: Option<usize>,
    pub seed: u64,
    pub width: usize,
}

pub fn run_check(suite: CheckSuite, opts: &CheckOptions) -> Result<Vec<CheckLine>> {
    let plan = |default: usize| MonteCarloPlan::new(opts.trials.unwrap_or(default), opts.seed).with_width(opts.width);
    let mut lines = Vec::new();
    match suite {
        CheckSuite::Moments => {
            for cm in [2, 4, 8] {
                for r in lemma2_moments(cm, &plan(200_000))?.into_iter().filter(|r| r.exact) {
                    lines.push(CheckLine {
                        suite: "moments",
                        label: format!("cM={cm} {} (empirical {:.6}, target {})", r.name, r.empirical, r.target),
                        measured: r.rel_err,
                        bound: 0.03,
                    });
                }
            }
            for r in lemma2_moments(64, &plan(200_000))?.into_iter().filter(|r| !r.exact) {
                lines.push(CheckLine {
                    suite: "moments",
                    label: format!("cM=64 {} (empirical {:.6}, target {})", r.name, r.empirical, r.target),
                    measured: r.rel_err,
                    bound: 0.10,
                });
            }
        }
        CheckSuite::Edges => {
            for c in [0.5, 1.0] {
                let cfg = SystemConfig::new(400, 40, c, 1.0)?;
                let (lo, hi) = eigen_edge_report(&cfg, &plan(500))?;
                for r in [lo, hi] {
                    lines.push(CheckLine {
                        suite: "edges",
                        label: format!(
                            "M=400 K=40 c={c} {} (empirical {:.5}, target {:.5})",
                            r.name, r.empirical, r.target
                        ),
                        measured: r.rel_err,
                        bound: 0.05,
                    });
                }
            }
        }
        CheckSuite::Inverses => {
            for k in [2, 8, 16, 32] {
                let draws = opts.trials.unwrap_or(100);
                let worst = inverse_residuals(k, draws, opts.seed)?;
                for (tag, err) in KindTag::ALL.iter().zip(worst) {
                    lines.push(CheckLine {
                        suite: "inverses",
                        label: format!("K={k} {} max |D D^-1 - I|_F over {draws} draws", tag.name()),
                        measured: err,
                        bound: 1e-10,
                    });
                }
            }
        }
        CheckSuite::DualCode => {
            let points = opts.trials.unwrap_or(1000);
            lines.push(CheckLine {
                suite: "dualcode",
                label: format!("max coefficient discrepancy over {points} points"),
                measured: dual_code_grid(points, opts.seed),
                bound: 1e-12,
            });
        }
    }
    Ok(lines)
}

/// Worst `‖D·D⁻¹ − I‖_F` per precondition kind (in `KindTag::ALL` order)
/// over `draws` Gram matrices with `K = k`, `c = 0.5`, `M = 4K`.
pub fn inverse_residuals(k: usize, draws: usize, seed: u64) -> Result<Vec<f64>> {
    let cfg = SystemConfig::new(4 * k, k, 0.5, 1.0)?;
    let mut worst = vec![0.0_f64; KindTag::ALL.len()];
    for t in 0..draws {
        let (_, g) = draw_gram(&cfg, trial_seed(seed, t as u64))?;
        for (slot, tag) in worst.iter_mut().zip(KindTag::ALL) {
            let p = build_precondition(tag.with_omega(omega_star(4 * k, k, 0.5)), &g)?;
            *slot = slot.max(frobenius_diff(&(&p.d * &p.d_inv), &identity(k)));
        }
    }
    Ok(worst)
}

/// Largest dual-coding discrepancy over a seeded random grid of
/// `(M, K, c, ω)`.
pub fn dual_code_grid(points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..points)
        .map(|_| {
            let m = rng.random_range(20.0..2000.0_f64);
            let c = rng.random_range(0.05..=1.0_f64);
            let k = (rng.random_range(0.0..1.0_f64) * c * m).max(1.0);
            let omega = rng.random_range(0.5..3.0_f64);
            dual_code_discrepancy(m, k, c, omega)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        let opts = CheckOptions {
            trials: None,
            seed: 3,
            width: 2,
        };
        for suite in [CheckSuite::Inverses, CheckSuite::DualCode] {
            let lines = run_check(suite, &opts).unwrap();
            assert!(!lines.is_empty());
            assert!(lines.iter().all(CheckLine::pass), "{lines:?}");
        }
    }

    #[test]
    fn line_format() {
        let line = CheckLine {
            suite: "dualcode",
            label: "x".into(),
            measured: 2.0,
            bound: 1.0,
        };
        assert!(line.to_string().starts_with("FAIL dualcode x"));
        assert!("nope".parse::<CheckSuite>().is_err());
    }
}
