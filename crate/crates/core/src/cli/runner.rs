//! Executes experiment plans point by point.

use crate::analysis::{
    case1_gaps, icns_sum_rate, ins_sum_rate, ins_zf_ratio, mrt_sum_rate_lb, r_star, zf_sum_rate,
};
use crate::channel::{validate_config, SystemConfig};
use crate::complexity::op_counts;
use crate::precoders::PrecoderSpec;
use crate::preconditioners::{omega_star, KindTag};
use crate::simulate::{collect_powers, MonteCarloPlan, PowerSamples, SumRateEstimate};
use crate::{Error, Result};

use super::output::Row;
use super::plan::{ExperimentPlan, Metric, Point, SchemeSel};

/// Checks every point of `plan` before any simulation starts.
pub fn validate_plan(plan: &ExperimentPlan) -> Result<Vec<(Point, SystemConfig)>> {
    if plan.trials == 0 {
        return Err(Error::Plan("`trials` must be positive".into()));
    }
    plan.points()?
        .into_iter()
        .map(|p| {
            let cfg = validate_config(SystemConfig {
                m: p.m,
                k: p.k,
                c: p.c,
                rho_t: p.rho_linear,
                norm_mode: plan.norm_mode,
            })?;
            if let Some(w) = p.omega {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::range("omega", w, "omega > 0"));
                }
            }
            Ok((p, cfg))
        })
        .collect()
}

fn spec_for(sel: SchemeSel, omega: f64) -> PrecoderSpec {
    match sel {
        SchemeSel::Zf => PrecoderSpec::zf(),
        SchemeSel::Mrt => PrecoderSpec::mrt(),
        SchemeSel::Ns(tag) => PrecoderSpec::ns(tag.with_omega(omega)),
    }
}

fn ratio(a: &SumRateEstimate, b: &SumRateEstimate) -> (f64, f64) {
    let q = a.mean / b.mean;
    let rel = ((a.std_error / a.mean).powi(2) + (b.std_error / b.mean).powi(2)).sqrt();
    (q, q * rel)
}

/// Runs every point of a validated plan and returns its CSV rows.
pub fn run_plan(plan: &ExperimentPlan, width: usize) -> Result<Vec<Row>> {
    let points = validate_plan(plan)?;
    let mc = MonteCarloPlan::new(plan.trials, plan.seed).with_width(width);
    let simulate = plan.metrics.iter().any(|m| m.simulated());
    let needs_zf = plan
        .metrics
        .iter()
        .any(|m| matches!(m, Metric::ZfRatio | Metric::SimuApproxZfRatio));
    let mut rows = Vec::new();
    let mut last_r_star: Option<(f64, f64)> = None;

    for (point, cfg) in points {
        log::info!(
            "M={} K={} c={} rho={} {}",
            point.m,
            point.k,
            point.c,
            point.rho_display,
            plan.rho_unit
        );
        let omega = point.omega.unwrap_or_else(|| omega_star(point.m, point.k, point.c));
        let (m, k, c, rho) = (point.m as f64, point.k as f64, point.c, point.rho_linear);

        let zf = if simulate && (needs_zf || plan.schemes.contains(&SchemeSel::Zf)) {
            let s = collect_powers(&cfg, &PrecoderSpec::zf(), &mc)?;
            Some((s.ergodic(rho, plan.norm_mode), s.simu_approx(rho)))
        } else {
            None
        };
        let zf_theo = zf_sum_rate(m, k, c, rho).ok();

        for &sel in &plan.schemes {
            let uses_omega = matches!(sel, SchemeSel::Ns(tag) if tag.uses_omega());
            let base = Row {
                scheme: sel.name().to_string(),
                m: Some(point.m),
                k: Some(point.k),
                c,
                rho: point.rho_display,
                rho_unit: plan.rho_unit,
                omega: uses_omega.then_some(omega),
                trials: None,
                seed: None,
                metric: "",
                value: 0.0,
                std_error: None,
                extrapolated: false,
            };
            let estimates = if !simulate {
                None
            } else if sel == SchemeSel::Zf {
                zf.clone()
            } else {
                let s: PowerSamples = collect_powers(&cfg, &spec_for(sel, omega), &mc)?;
                Some((s.ergodic(rho, plan.norm_mode), s.simu_approx(rho)))
            };
            let theo = match sel {
                SchemeSel::Ns(KindTag::Ins) => Some(ins_sum_rate(m, k, c, omega, rho)),
                SchemeSel::Ns(KindTag::Icns) => Some(icns_sum_rate(m, k, c, omega, rho)),
                SchemeSel::Zf => zf_theo,
                SchemeSel::Mrt => Some(mrt_sum_rate_lb(m, k, c, rho)),
                _ => None,
            };

            for &metric in &plan.metrics {
                let mut row = base.clone();
                row.metric = metric.name();
                let simulated = |row: &mut Row, (v, se): (f64, f64)| {
                    row.trials = Some(plan.trials);
                    row.seed = Some(plan.seed);
                    row.value = v;
                    row.std_error = Some(se);
                };
                match metric {
                    Metric::ErgodicSumRate => {
                        let e = &estimates.as_ref().expect("simulated").0;
                        simulated(&mut row, (e.mean, e.std_error));
                    }
                    Metric::SimuApprox => {
                        let e = &estimates.as_ref().expect("simulated").1;
                        simulated(&mut row, (e.mean, e.std_error));
                    }
                    Metric::ZfRatio => {
                        let e = &estimates.as_ref().expect("simulated").0;
                        simulated(&mut row, ratio(e, &zf.as_ref().expect("zf").0));
                    }
                    Metric::SimuApproxZfRatio => {
                        let e = &estimates.as_ref().expect("simulated").1;
                        simulated(&mut row, ratio(e, &zf.as_ref().expect("zf").1));
                    }
                    Metric::TheoApprox => match theo {
                        Some(v) => row.value = v,
                        None => continue,
                    },
                    Metric::TheoApproxZfRatio => match (theo, zf_theo) {
                        (Some(v), Some(z)) => row.value = v / z,
                        _ => continue,
                    },
                    Metric::InsZfRatio => {
                        if sel != SchemeSel::Ns(KindTag::Ins) {
                            continue;
                        }
                        match ins_zf_ratio(k / m, c, rho) {
                            Ok(v) => row.value = v,
                            Err(e) => {
                                log::warn!("skipping ins_zf_ratio at K={} M={}: {e}", point.k, point.m);
                                continue;
                            }
                        }
                    }
                    Metric::RStar => {
                        if sel != SchemeSel::Ns(KindTag::Ins) || last_r_star == Some((c, rho)) {
                            continue;
                        }
                        row.m = None;
                        row.k = None;
                        row.value = r_star(c, rho);
                    }
                    Metric::SigGapUser1 | Metric::IntGapUser1 | Metric::SigGapOthers | Metric::IntGapOthers => {
                        if sel != SchemeSel::Ns(KindTag::Icns) {
                            continue;
                        }
                        let g = case1_gaps(k / (c * m));
                        row.scheme = "ICNS-INS".into();
                        row.omega = Some(1.0 + k / (c * m));
                        row.value = match metric {
                            Metric::SigGapUser1 => g.sig_gap_user1,
                            Metric::IntGapUser1 => g.int_gap_user1,
                            Metric::SigGapOthers => g.sig_gap_others,
                            _ => g.int_gap_others,
                        };
                    }
                    Metric::Mults | Metric::Divs => {
                        let SchemeSel::Ns(tag) = sel else { continue };
                        let Ok(report) = op_counts(tag, point.k as u64) else { continue };
                        row.value = if metric == Metric::Mults {
                            report.mults as f64
                        } else {
                            report.divs as f64
                        };
                        row.extrapolated = report.extrapolated;
                    }
                }
                rows.push(row);
            }
        }
        if plan.metrics.contains(&Metric::RStar) && plan.schemes.contains(&SchemeSel::Ns(KindTag::Ins)) {
            last_r_star = Some((c, rho));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::plan::parse_plan;

    #[test]
    fn rows_per_scheme_and_metric() {
        let plan = parse_plan(
            "sweep = M\nvalues = 40, 60\nK = 4\nc = 0.5\nschemes = INS, ZF, DNS\n\
             metrics = ergodic_sum_rate, theo_approx, zf_ratio, mults\ntrials = 50",
        )
        .unwrap();
        let rows = run_plan(&plan, 2).unwrap();
        // INS: 4 metrics, ZF: 3 (no op counts), DNS: 3 (no closed form)
        assert_eq!(rows.len(), 2 * (4 + 3 + 3));
        let zf_ratio = rows.iter().find(|r| r.scheme == "ZF" && r.metric == "zf_ratio").unwrap();
        assert_eq!(zf_ratio.value, 1.0);
        let dns = rows.iter().find(|r| r.scheme == "DNS" && r.metric == "mults").unwrap();
        assert!(dns.extrapolated && dns.omega.is_none());
        let ins = rows.iter().find(|r| r.scheme == "INS").unwrap();
        assert!((ins.omega.unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_points_fail_before_running() {
        let plan = parse_plan("sweep = M\nvalues = 60, 7\nK = 2\nc = 0.5\nschemes = ZF").unwrap();
        assert!(matches!(run_plan(&plan, 1), Err(Error::NonIntegerEffectiveDimension { .. })));
    }

    #[test]
    fn r_star_emitted_once_per_snr() {
        let plan = parse_plan(
            "sweep = r\nvalues = 0.1, 0.2, 0.3\nM = 100\nc = 0.5\nschemes = INS\nmetrics = ins_zf_ratio, r_star",
        )
        .unwrap();
        let rows = run_plan(&plan, 1).unwrap();
        assert_eq!(rows.iter().filter(|r| r.metric == "r_star").count(), 1);
        assert_eq!(rows.iter().filter(|r| r.metric == "ins_zf_ratio").count(), 3);
    }
}
