//! Seeded Monte Carlo estimators.
//!
//! Trials are split into fixed-size chunks whose size depends only on the
//! trial count. Chunks run on a dedicated rayon pool, each folds its trials
//! in index order, and the chunk accumulators are merged in chunk order. The
//! result is therefore bit-identical for every `parallel_width`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{complex_gaussian, draw_gram, trial_seed, NormMode, SystemConfig};
use crate::linalg::{c64, C64, CMat};
use crate::precoders::{gram_precoder, sinr_from_powers, user_powers, PrecoderSpec};
use crate::preconditioners::mp_edges;
use crate::{Error, Result};

/// Fraction of trials that may be skipped as numerically degenerate.
pub const DEGENERATE_BUDGET: f64 = 1e-3;

/// Number of batches used for the batch-means error of ratio estimators.
const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloPlan {
    pub trials: usize,
    pub master_seed: u64,
    pub parallel_width: usize,
}

impl MonteCarloPlan {
    /// Plan using every available core.
    pub fn new(trials: usize, master_seed: u64) -> Self {
        let width = std::thread::available_parallelism().map_or(1, |n| n.get());
        MonteCarloPlan {
            trials,
            master_seed,
            parallel_width: width,
        }
    }

    pub fn with_width(mut self, parallel_width: usize) -> Self {
        self.parallel_width = parallel_width;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::range("trials", 0.0, "trials ≥ 1"));
        }
        if self.parallel_width == 0 {
            return Err(Error::range("parallel_width", 0.0, "parallel_width ≥ 1"));
        }
        Ok(())
    }

    fn chunk_size(&self) -> usize {
        (self.trials / 256).max(64)
    }
}

/// Runs `step` over every trial index and merges the per-chunk accumulators
/// in a fixed order.
fn fold_trials<A, I, S, M>(plan: &MonteCarloPlan, init: I, step: S, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, u64) -> Result<()> + Sync,
    M: Fn(&mut A, A),
{
    plan.validate()?;
    let chunk = plan.chunk_size();
    let n_chunks = plan.trials.div_ceil(chunk);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.parallel_width)
        .build()
        .map_err(|e| Error::Plan(e.to_string()))?;
    let partials: Vec<Result<A>> = pool.install(|| {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let end = ((c + 1) * chunk).min(plan.trials);
                for t in c * chunk..end {
                    step(&mut acc, t as u64)?;
                }
                Ok(acc)
            })
            .collect()
    });
    let mut total = init();
    for p in partials {
        merge(&mut total, p?);
    }
    Ok(total)
}

fn std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateEstimate {
    /// Sum-rate in bits/s/Hz.
    pub mean: f64,
    pub std_error: f64,
    /// Trials that contributed (excludes skipped ones).
    pub trials: usize,
    pub per_user_means: Vec<f64>,
    pub skipped: usize,
}

/// Unnormalised Gram-domain powers of one trial.
#[derive(Debug, Clone)]
pub struct TrialPowers {
    pub signal: Vec<f64>,
    pub interference: Vec<f64>,
    /// `tr(W₀W₀ᴴ)` for `β = 1`.
    pub raw_power: f64,
}

/// Per-trial powers of one (config, precoder) pair over a whole plan.
#[derive(Debug, Clone)]
pub struct PowerSamples {
    pub k: usize,
    pub samples: Vec<TrialPowers>,
    pub skipped: usize,
}

/// Draws every trial of `plan` and records its unnormalised powers.
///
/// Draws on which the Gram matrix or a precondition pivot is numerically
/// singular are skipped with a warning, up to [`DEGENERATE_BUDGET`].
pub fn collect_powers(cfg: &SystemConfig, spec: &PrecoderSpec, plan: &MonteCarloPlan) -> Result<PowerSamples> {
    let samples = fold_trials(
        plan,
        Vec::new,
        |acc: &mut Vec<Option<TrialPowers>>, t| {
            let (_, g) = draw_gram(cfg, trial_seed(plan.master_seed, t))?;
            match gram_precoder(spec, &g, cfg.m) {
                Ok(core) => {
                    let (signal, interference) = user_powers(&core.effective);
                    acc.push(Some(TrialPowers {
                        signal,
                        interference,
                        raw_power: core.raw_power,
                    }));
                    Ok(())
                }
                Err(Error::SingularGram) | Err(Error::SingularPrecondition { .. }) => {
                    acc.push(None);
                    Ok(())
                }
                Err(e) => Err(e),
            }
        },
        |total, part| total.extend(part),
    )?;
    let skipped = samples.iter().filter(|s| s.is_none()).count();
    if skipped as f64 > DEGENERATE_BUDGET * plan.trials as f64 {
        return Err(Error::DegenerateBudgetExceeded {
            skipped,
            trials: plan.trials,
        });
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} degenerate draws of {}", plan.trials);
    }
    Ok(PowerSamples {
        k: cfg.k,
        samples: samples.into_iter().flatten().collect(),
        skipped,
    })
}

impl PowerSamples {
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|s| s.raw_power).sum::<f64>() / self.samples.len() as f64
    }

    /// Mean of `Σ_k log₂(1 + SINR_k)` with SINR as seen by the terminals.
    pub fn ergodic(&self, rho_t: f64, mode: NormMode) -> SumRateEstimate {
        let shared = match mode {
            NormMode::PerRealization => None,
            NormMode::Statistical => Some(self.mean_power()),
        };
        let mut per_user = vec![0.0; self.k];
        let mut sums = Vec::with_capacity(self.samples.len());
        for s in &self.samples {
            let power = shared.unwrap_or(s.raw_power);
            let sinr = sinr_from_powers(&s.signal, &s.interference, power, rho_t);
            let mut total = 0.0;
            for (acc, v) in per_user.iter_mut().zip(&sinr) {
                let rate = v.log2_1p();
                *acc += rate;
                total += rate;
            }
            sums.push(total);
        }
        let n = self.samples.len() as f64;
        per_user.iter_mut().for_each(|v| *v /= n);
        SumRateEstimate {
            mean: sums.iter().sum::<f64>() / n,
            std_error: std_error(&sums),
            trials: self.samples.len(),
            per_user_means: per_user,
            skipped: self.skipped,
        }
    }

    /// Ratio-of-expectations ("simu-approx") sum-rate.
    ///
    /// `std_error` comes from batch means over contiguous trial batches.
    pub fn simu_approx(&self, rho_t: f64) -> SumRateEstimate {
        let per_user = simu_approx_rates(&self.samples, self.k, rho_t);
        let n = self.samples.len();
        let batch = n / BATCHES;
        let std_error = if batch >= 1 {
            let vals: Vec<f64> = (0..BATCHES)
                .map(|b| simu_approx_rates(&self.samples[b * batch..(b + 1) * batch], self.k, rho_t).iter().sum())
                .collect();
            std_error(&vals)
        } else {
            f64::NAN
        };
        SumRateEstimate {
            mean: per_user.iter().sum(),
            std_error,
            trials: n,
            per_user_means: per_user,
            skipped: self.skipped,
        }
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

fn simu_approx_rates(samples: &[TrialPowers], k: usize, rho_t: f64) -> Vec<f64> {
    let n = samples.len() as f64;
    let mut s = vec![0.0; k];
    let mut i = vec![0.0; k];
    let mut p = 0.0;
    for t in samples {
        for u in 0..k {
            s[u] += t.signal[u];
            i[u] += t.interference[u];
        }
        p += t.raw_power;
    }
    let p = p / n;
    s.iter()
        .zip(&i)
        .map(|(s, i)| {
            let (s, i) = (s / n / p, i / n / p);
            (s / (1.0 / rho_t + i)).log2_1p()
        })
        .collect()
}

/// Ergodic sum-rate under `cfg.norm_mode`.
pub fn ergodic_sum_rate(cfg: &SystemConfig, spec: &PrecoderSpec, plan: &MonteCarloPlan) -> Result<SumRateEstimate> {
    Ok(collect_powers(cfg, spec, plan)?.ergodic(cfg.rho_t, cfg.norm_mode))
}

/// Sum-rate of the ratio-of-expectations SINR, with the power scale
/// estimated from the same batch.
pub fn sum_rate_simu_approx(cfg: &SystemConfig, spec: &PrecoderSpec, plan: &MonteCarloPlan) -> Result<SumRateEstimate> {
    Ok(collect_powers(cfg, spec, plan)?.simu_approx(cfg.rho_t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub name: String,
    pub empirical: f64,
    pub target: f64,
    /// `|empirical − target| / |target|`; for zero targets the deviation is
    /// divided by the root mean square of the averaged quantity instead.
    pub rel_err: f64,
    /// False for targets that only hold as `cM → ∞`.
    pub exact: bool,
}

impl MomentReport {
    fn new(name: &str, empirical: f64, target: f64, exact: bool) -> Self {
        MomentReport {
            name: name.to_string(),
            empirical,
            target,
            rel_err: (empirical - target).abs() / target.abs(),
            exact,
        }
    }

    fn zero(name: &str, deviation: f64, rms: f64) -> Self {
        MomentReport {
            name: name.to_string(),
            empirical: deviation,
            target: 0.0,
            rel_err: deviation / rms,
            exact: true,
        }
    }
}

#[derive(Clone)]
struct MomentAcc {
    x2: f64,
    x2x: C64,
    x6: f64,
    x4: f64,
    q2: f64,
    q3: f64,
    q4: f64,
    qz: DVector<C64>,
    qz_sq: f64,
    qzz: CMat,
}

impl MomentAcc {
    fn new(n: usize) -> Self {
        MomentAcc {
            x2: 0.0,
            x2x: c64(0.0, 0.0),
            x6: 0.0,
            x4: 0.0,
            q2: 0.0,
            q3: 0.0,
            q4: 0.0,
            qz: DVector::zeros(n),
            qz_sq: 0.0,
            qzz: CMat::zeros(n, n),
        }
    }

    fn merge(&mut self, o: MomentAcc) {
        self.x2 += o.x2;
        self.x2x += o.x2x;
        self.x6 += o.x6;
        self.x4 += o.x4;
        self.q2 += o.q2;
        self.q3 += o.q3;
        self.q4 += o.q4;
        self.qz += o.qz;
        self.qz_sq += o.qz_sq;
        self.qzz += o.qzz;
    }
}

/// Empirical moments of independent `z_i, z_j ~ CN(0, I_{cM})` against their
/// exact or limiting values, with `x = z_iᴴz_j` and `q = z_iᴴz_i`.
///
/// The limiting cross moments are reported normalised by `cM`:
/// `E|x|⁴/(cM)² → 2` and `E|x|⁶/(cM)³ → 6`.
pub fn lemma2_moments(cm: usize, plan: &MonteCarloPlan) -> Result<Vec<MomentReport>> {
    if cm == 0 {
        return Err(Error::range("cM", 0.0, "cM ≥ 1"));
    }
    let acc = fold_trials(
        plan,
        || MomentAcc::new(cm),
        |acc, t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(plan.master_seed, t));
            let z = complex_gaussian(&mut rng, cm, 2);
            let (zi, zj) = (z.column(0), z.column(1));
            let x = zi.dotc(&zj);
            let q = zi.norm_squared();
            let ax2 = x.norm_sqr();
            acc.x2 += ax2;
            acc.x2x += x * ax2;
            acc.x4 += ax2 * ax2;
            acc.x6 += ax2 * ax2 * ax2;
            acc.q2 += q * q;
            acc.q3 += q * q * q;
            acc.q4 += q * q * q * q;
            acc.qz += zi * c64(q, 0.0);
            acc.qz_sq += q * q * q;
            acc.qzz += (zi * zi.adjoint()) * c64(q, 0.0);
            Ok(())
        },
        |a, b| a.merge(b),
    )?;
    let t = plan.trials as f64;
    let n = cm as f64;
    let target_mat = CMat::identity(cm, cm) * c64(n + 1.0, 0.0);
    let mat_err = crate::linalg::frobenius_diff(&(acc.qzz / c64(t, 0.0)), &target_mat);
    Ok(vec![
        MomentReport::new("E|zi^H zj|^2", acc.x2 / t, n, true),
        MomentReport::zero("E{|zi^H zj|^2 zi^H zj}", (acc.x2x / t).norm(), (acc.x6 / t).sqrt()),
        MomentReport::new("E|zi^H zj|^4/(cM)^2", acc.x4 / t / (n * n), 2.0, false),
        MomentReport::new("E|zi^H zj|^6/(cM)^3", acc.x6 / t / (n * n * n), 6.0, false),
        MomentReport::new("E|zi^H zi|^2", acc.q2 / t, n * n + n, true),
        MomentReport::new("E|zi^H zi|^3", acc.q3 / t, n.powi(3) + 3.0 * n * n + 2.0 * n, true),
        MomentReport::new(
            "E|zi^H zi|^4",
            acc.q4 / t,
            n.powi(4) + 6.0 * n.powi(3) + 11.0 * n * n + 6.0 * n,
            true,
        ),
        MomentReport {
            name: "E{zi zi^H zi zi^H} = (cM+1)I".to_string(),
            empirical: mat_err,
            target: 0.0,
            rel_err: mat_err / crate::linalg::frobenius(&target_mat),
            exact: true,
        },
        MomentReport::zero("E{zi zi^H zi}", (acc.qz / c64(t, 0.0)).norm(), (acc.qz_sq / t).sqrt()),
    ])
}

/// Trial-averaged smallest and largest eigenvalue of `G` against the
/// Marchenko–Pastur edges `(1 ∓ √(K/(cM)))²`.
pub fn eigen_edge_report(cfg: &SystemConfig, plan: &MonteCarloPlan) -> Result<(MomentReport, MomentReport)> {
    let edges = mp_edges(cfg.effective_loading())?;
    let (lo, hi) = fold_trials(
        plan,
        || (0.0, 0.0),
        |acc, t| {
            let (_, g) = draw_gram(cfg, trial_seed(plan.master_seed, t))?;
            let ev = g.symmetric_eigenvalues();
            acc.0 += ev.min();
            acc.1 += ev.max();
            Ok(())
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
        },
    )?;
    let t = plan.trials as f64;
    Ok((
        MomentReport::new("min eigenvalue", lo / t, edges.a_bar, false),
        MomentReport::new("max eigenvalue", hi / t, edges.b_bar, false),
    ))
}
