//! Closed-form sum-rate approximations and comparison formulas.
//!
//! Dimensions are taken as `f64` so curves can be evaluated on continuous
//! grids. `ρ_t` is always linear here.

pub mod expanded;

use crate::{Error, Result};

/// Normalised signal (`c1`), noise-scale (`c2`) and per-interferer (`c3`)
/// terms of the INS SINR approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// ICNS terms: `c4`/`c6` for user 1 (the column folded into `D`), `c7`/`c8`
/// for users 2..K and the shared noise scale `c5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcnsCoefficients {
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
}

pub fn ins_coefficients(m: f64, k: f64, c: f64, omega: f64) -> InsCoefficients {
    let n = c * m;
    let u = 1.0 / omega;
    let w = omega;
    let c1 = (2.0 - u).powi(2) + 4.0 / n * (1.0 - u).powi(2) - 2.0 * k / (n * w) * (2.0 - u)
        + k / (n * n * w) * (-4.0 + 5.0 * u)
        + k * k / (n * n * w * w)
        + k * k / (n.powi(3) * w * w);
    let c2 = (2.0 - u).powi(2) + k / (n * w) * (-4.0 + 3.0 * u) + k * k / (n * n * w * w);
    let c3 = 4.0 / n * (1.0 - u).powi(2) + k / (n * n * w) * (-4.0 + 5.0 * u) + k * k / (n.powi(3) * w * w);
    InsCoefficients { c1, c2, c3 }
}

/// `K·log₂(1 + C1 / ((1/ρ_t)(K/M)C2 + (K−1)C3))`.
pub fn ins_sum_rate(m: f64, k: f64, c: f64, omega: f64, rho_t: f64) -> f64 {
    let InsCoefficients { c1, c2, c3 } = ins_coefficients(m, k, c, omega);
    k * (c1 / (k / (m * rho_t) * c2 + (k - 1.0) * c3)).ln_1p() / std::f64::consts::LN_2
}

pub fn icns_coefficients(m: f64, k: f64, c: f64, omega: f64) -> IcnsCoefficients {
    let n = c * m;
    let u = 1.0 / omega;
    let w = omega;
    let (n2, n3, n4, n5) = (n * n, n.powi(3), n.powi(4), n.powi(5));
    let (k2, k3, k4) = (k * k, k.powi(3), k.powi(4));
    let c2 = (2.0 - u).powi(2) + k / (n * w) * (-4.0 + 3.0 * u) + k2 / (n2 * w * w);

    let c4 = (2.0 - u + 3.0 * k / (n * w) * (-1.0 + u) + k2 / (n2 * w * w) * (1.0 - u)).powi(2);
    let c5 = c2
        + 2.0 / (n * w) * (-4.0 + 14.0 * u - 11.0 * u * u + 2.0 * u.powi(3))
        + k / (n2 * w * w) * (16.0 - 44.0 * u + 27.0 * u * u - 4.0 * u.powi(3))
        + k2 / (n3 * w.powi(3)) * (-4.0 + 13.0 * u - 8.0 * u * u + u.powi(3))
        + k3 / (n4 * w.powi(4)) * (1.0 - u).powi(2);
    let c6 = 4.0 * k / n * (1.0 - u).powi(2) - k2 / (n2 * w) * (4.0 * (1.0 - u).powi(2) - u)
        + k3 / (n3 * w * w) * (1.0 - u).powi(2);
    let c7 = (2.0 - u).powi(2) - 2.0 * k / (n * w) * (2.0 - u)
        + k2 / (n2 * w * w)
        + 2.0 / n * (2.0 - 4.0 * u + 4.0 * u * u - u.powi(3))
        + k / (n2 * w) * (-4.0 + 9.0 * u - 4.0 * u * u)
        + k2 / (n3 * w * w) * (1.0 - 2.0 * u);
    let c8 = 4.0 * k / n * (1.0 - u).powi(2)
        + k2 / (n2 * w) * (-4.0 + 5.0 * u)
        + k3 / (n3 * w * w)
        + 1.0 / n * (4.0 * u * u * (-2.0 + u).powi(2) - 4.0)
        + k / (n2 * w) * (-4.0 + 51.0 * u - 84.0 * u * u + 38.0 * u.powi(3) - 4.0 * u.powi(4))
        + k2 / (n3 * w * w) * (15.0 - 66.0 * u + 65.0 * u * u - 20.0 * u.powi(3) + u.powi(4))
        + k3 / (n4 * w.powi(3)) * (-8.0 + 21.0 * u - 16.0 * u * u + 3.0 * u.powi(3))
        + k4 / (n5 * w.powi(4)) * (1.0 - u).powi(2);
    IcnsCoefficients { c4, c5, c6, c7, c8 }
}

/// User 1 term plus `K − 1` identical terms for the remaining users.
pub fn icns_sum_rate(m: f64, k: f64, c: f64, omega: f64, rho_t: f64) -> f64 {
    let IcnsCoefficients { c4, c5, c6, c7, c8 } = icns_coefficients(m, k, c, omega);
    let noise = k / (m * rho_t) * c5;
    log2_1p(c4 / (noise + c6)) + (k - 1.0) * log2_1p(c7 / (noise + c8))
}

fn log2_1p(v: f64) -> f64 {
    v.ln_1p() / std::f64::consts::LN_2
}

/// `K·log₂(1 + ρ_t(M/K − 1/c))`, the large-system ZF sum-rate.
pub fn zf_sum_rate(m: f64, k: f64, c: f64, rho_t: f64) -> Result<f64> {
    if c * m <= k {
        return Err(Error::DegenerateZf {
            load: k,
            capacity: c * m,
        });
    }
    Ok(k * log2_1p(rho_t * (m / k - 1.0 / c)))
}

/// `K·log₂(1 + M/((K−1)/c + K/ρ_t))`.
pub fn mrt_sum_rate_lb(m: f64, k: f64, c: f64, rho_t: f64) -> f64 {
    k * log2_1p(m / ((k - 1.0) / c + k / rho_t))
}

/// Loading factor at which the asymptotic INS SINR meets the ZF SINR.
pub fn r_star(c: f64, rho_t: f64) -> f64 {
    c * ((9.0 * c * c + 4.0 * c * rho_t + 4.0 * rho_t * rho_t).sqrt() - 3.0 * c) / (2.0 * (c + rho_t))
}

/// SNR above which INS beats MRT: `rc/(r+c)`.
pub fn mrt_cross_threshold(r: f64, c: f64) -> f64 {
    r * c / (r + c)
}

/// Large-system INS SINR at `ω = 1 + r/c`.
pub fn ins_sinr_asymptotic(r: f64, c: f64, rho_t: f64) -> f64 {
    let s = r + c;
    (rho_t / r) / (1.0 + r * c / (s * s) + rho_t * (r / c) / s)
}

/// INS SINR over the ZF SINR `ρ_t(1/r − 1/c)`.
pub fn ins_zf_ratio(r: f64, c: f64, rho_t: f64) -> Result<f64> {
    if r >= c {
        return Err(Error::DegenerateZf { load: r, capacity: c });
    }
    Ok(ins_sinr_asymptotic(r, c, rho_t) / (rho_t * (1.0 / r - 1.0 / c)))
}

/// Leading-order ICNS-minus-INS gaps at `ω = 1 + r/c`.
///
/// User 1 gaps are `M`-independent; the users-2..K gaps are scaled by `cM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Gaps {
    pub sig_gap_user1: f64,
    pub int_gap_user1: f64,
    pub sig_gap_others: f64,
    pub int_gap_others: f64,
}

pub fn case1_gaps(r_over_c: f64) -> Case1Gaps {
    let x = r_over_c;
    let u = 1.0 / (1.0 + x);
    let p = |e: i32| u.powi(e);
    let (x2, x3, x4) = (x * x, x.powi(3), x.powi(4));
    let sq = (1.0 - u).powi(2);
    Case1Gaps {
        sig_gap_user1: x * (-8.0 * u + 16.0 * p(2) - 6.0 * p(3))
            + x2 * (12.0 * p(2) - 24.0 * p(3) + 11.0 * p(4))
            + (-6.0 * x3 * p(3) + x4 * p(4)) * sq,
        int_gap_user1: 4.0 * x2 * p(2) * (1.0 - u) + x3 * p(3) * (u - 2.0),
        sig_gap_others: 2.0 * p(2) * (2.0 - u + 2.0 * x * (1.0 - u) - x2 * u),
        int_gap_others: 4.0 * u * sq * (-2.0 + u)
            + u * (-8.0 + 56.0 * u - 84.0 * p(2) + 38.0 * p(3) - 4.0 * p(4)) * x
            + p(2) * (16.0 - 66.0 * u + 65.0 * p(2) - 20.0 * p(3) + p(4)) * x2
            + p(3) * (-8.0 + 21.0 * u - 16.0 * p(2) + 3.0 * p(3)) * x3
            + p(4) * sq * x4,
    }
}

/// The same four gaps from the full coefficients at finite `M`, with
/// `K = (r/c)·cM` and matching normalisation.
pub fn case1_full_differences(m: f64, c: f64, r_over_c: f64) -> Case1Gaps {
    let n = c * m;
    let k = r_over_c * n;
    let omega = 1.0 + r_over_c;
    let ins = ins_coefficients(m, k, c, omega);
    let icns = icns_coefficients(m, k, c, omega);
    Case1Gaps {
        sig_gap_user1: icns.c4 - ins.c1,
        int_gap_user1: icns.c6 - (k - 1.0) * ins.c3,
        sig_gap_others: n * (icns.c7 - ins.c1),
        int_gap_others: n * (icns.c8 - (k - 1.0) * ins.c3),
    }
}

/// Largest difference between the grouped and expanded coefficient
/// transcriptions at one point, relative to `max(1, |coefficient|)`.
pub fn dual_code_discrepancy(m: f64, k: f64, c: f64, omega: f64) -> f64 {
    let ins = ins_coefficients(m, k, c, omega);
    let icns = icns_coefficients(m, k, c, omega);
    let grouped = [ins.c1, ins.c2, ins.c3, icns.c4, icns.c5, icns.c6, icns.c7, icns.c8];
    let mut other = expanded::ins(m, k, c, omega).to_vec();
    other.extend(expanded::icns(m, k, c, omega));
    grouped
        .iter()
        .zip(&other)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn hand_checked_ins_point() {
        let co = ins_coefficients(100.0, 10.0, 0.5, 1.0);
        assert!((co.c1 - 0.6448).abs() < 1e-12);
        assert!((co.c2 - 0.84).abs() < 1e-12);
        assert!((co.c3 - 0.0048).abs() < 1e-12);
        let rate = ins_sum_rate(100.0, 10.0, 0.5, 1.0, 10.0);
        assert!((rate - 10.0 * (1.0 + 0.6448 / 0.0516_f64).log2()).abs() < 1e-10);
        assert!((rate - 37.55).abs() < 0.05);
    }

    #[test]
    fn vanishing_load_limits() {
        let co = ins_coefficients(1e9, 1.0, 1.0, 1.0);
        assert!((co.c1 - 1.0).abs() < 1e-6 && (co.c2 - 1.0).abs() < 1e-6 && co.c3.abs() < 1e-6);
        let (m, k, rho) = (1e7, 10.0, 10.0);
        let omega = 1.0 + k / (0.5 * m);
        let c = ins_coefficients(m, k, 0.5, omega);
        let sinr = c.c1 / (k / (m * rho) * c.c2 + (k - 1.0) * c.c3);
        assert!((sinr * k / (rho * m) - 1.0).abs() < 1e-4);
        let zf = zf_sum_rate(m, k, 0.5, rho).unwrap();
        assert!((icns_sum_rate(m, k, 0.5, omega, rho) - zf).abs() / zf < 1e-4);
    }

    #[test]
    fn zf_and_mrt_reference_values() {
        assert!((zf_sum_rate(60.0, 10.0, 0.5, 10.0).unwrap() - 10.0 * 41f64.log2()).abs() < 1e-12);
        assert!((zf_sum_rate(100.0, 10.0, 0.5, 10.0).unwrap() - 10.0 * 81f64.log2()).abs() < 1e-12);
        assert!(matches!(zf_sum_rate(20.0, 10.0, 0.5, 10.0), Err(Error::DegenerateZf { .. })));
        assert!((mrt_sum_rate_lb(60.0, 10.0, 0.5, 10.0) - 20.56).abs() < 0.01);
        assert_eq!(mrt_sum_rate_lb(30.0, 1.0, 0.5, 10.0), 301f64.log2());
    }

    #[test]
    fn r_star_and_threshold() {
        assert!((r_star(0.5, 10.0) / 0.5 - 0.9071).abs() < 1e-3);
        assert!((mrt_cross_threshold(0.25, 0.5) - 1.0 / 6.0).abs() < 1e-15);
        let mut prev = 0.0;
        for rho in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let r = r_star(0.5, rho);
            assert!(r > prev);
            prev = r;
            assert!((ins_zf_ratio(r, 0.5, rho).unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(ins_zf_ratio(0.5, 0.5, 10.0).is_err());
        assert!((ins_zf_ratio(1e-9, 0.5, 10.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gap_zero_crossings() {
        let sig = bisect(|x| case1_gaps(x).sig_gap_user1, 0.3, 0.9);
        let int = bisect(|x| case1_gaps(x).int_gap_others, 0.5, 1.0);
        assert!((sig - 0.61).abs() < 0.02, "{sig}");
        assert!((int - 0.80).abs() < 0.02, "{int}");
        for i in 0..=95 {
            let x = 0.05 + 0.01 * i as f64;
            assert!(case1_gaps(x).int_gap_user1 > 0.0, "{x}");
        }
    }

    #[test]
    fn full_differences_share_gap_signs() {
        for m in [1000.0, 4000.0] {
            for i in 0..39 {
                let x = 0.05 + 0.025 * i as f64;
                let lead = case1_gaps(x);
                let full = case1_full_differences(m, 0.5, x);
                for (a, b) in [
                    (lead.sig_gap_user1, full.sig_gap_user1),
                    (lead.int_gap_user1, full.int_gap_user1),
                    (lead.sig_gap_others, full.sig_gap_others),
                    (lead.int_gap_others, full.int_gap_others),
                ] {
                    assert_eq!(a > 0.0, b > 0.0, "M={m} r/c={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn icns_beats_ins_on_middle_loads() {
        let (m, c, rho) = (1000.0, 0.5, 100.0);
        for i in 0..=58 {
            let x = 0.22 + 0.01 * i as f64;
            let k = x * c * m;
            let omega = 1.0 + x;
            assert!(icns_sum_rate(m, k, c, omega, rho) >= ins_sum_rate(m, k, c, omega, rho), "{x}");
        }
    }

    #[test]
    fn ins_collapses_to_zf() {
        let (m, k, c) = (5000.0, 10.0, 0.5);
        let omega = 1.0 + k / (c * m);
        let zf = zf_sum_rate(m, k, c, 10.0).unwrap();
        assert!((ins_sum_rate(m, k, c, omega, 10.0) - zf).abs() / zf <= 0.02);
    }

    #[test]
    fn icns_noise_excess_halves_with_m() {
        let (r, c, rho) = (0.1, 0.5, 10.0);
        let excess = |m: f64| {
            let k = r * m;
            let omega = 1.0 + k / (c * m);
            let a = icns_coefficients(m, k, c, omega).c5;
            let b = ins_coefficients(m, k, c, omega).c2;
            k / (m * rho) * (a - b)
        };
        for m in [100.0, 200.0, 400.0] {
            let ratio = excess(m) / excess(2.0 * m);
            assert!((ratio - 2.0).abs() < 0.4, "{m}: {ratio}");
        }
    }

    #[test]
    fn closed_forms_increase_with_m_and_snr() {
        for (lo, hi) in [(60.0, 61.0), (100.0, 200.0)] {
            assert!(zf_sum_rate(hi, 10.0, 0.5, 10.0).unwrap() > zf_sum_rate(lo, 10.0, 0.5, 10.0).unwrap());
            assert!(mrt_sum_rate_lb(hi, 10.0, 0.5, 10.0) > mrt_sum_rate_lb(lo, 10.0, 0.5, 10.0));
        }
        assert!(zf_sum_rate(60.0, 10.0, 0.5, 11.0).unwrap() > zf_sum_rate(60.0, 10.0, 0.5, 10.0).unwrap());
        assert!(mrt_sum_rate_lb(60.0, 10.0, 0.5, 11.0) > mrt_sum_rate_lb(60.0, 10.0, 0.5, 10.0));
    }

    proptest! {
        #[test]
        fn transcriptions_agree(m in 20.0f64..2000.0, load in 0.01f64..1.0, c in 0.05f64..=1.0, omega in 0.5f64..3.0) {
            let k = (load * c * m).max(1.0);
            prop_assert!(dual_code_discrepancy(m, k, c, omega) < 1e-12);
        }

        #[test]
        fn ins_coefficients_positive(m in 50.0f64..2000.0, load in 0.01f64..1.0, c in 0.1f64..=1.0, t in 0.0f64..1.0) {
            let k = (load * c * m).max(1.0);
            let x = k / (c * m);
            let omega = 1.0 + t * ((1.0 + x.sqrt()).powi(2) - 1.0);
            let co = ins_coefficients(m, k, c, omega);
            prop_assert!(co.c1 > 0.0 && co.c2 > 0.0 && co.c3 > -1e-9);
        }

        #[test]
        fn r_star_separates_ratio_sides(c in 0.1f64..=1.0, rho in 0.5f64..200.0, t in 0.05f64..0.95) {
            let rs = r_star(c, rho);
            prop_assert!(ins_zf_ratio(t * rs, c, rho).unwrap() < 1.0);
            prop_assert!(ins_zf_ratio(rs + t * (c - rs), c, rho).unwrap() > 1.0);
        }
    }
}
