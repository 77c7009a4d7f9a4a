//! Correlated Rayleigh channel generation.
//!
//! Every user shares the covariance `R = (1/c)·A·Aᴴ` with `A` an `M × cM`
//! semi-unitary direction matrix, so a channel draw is `H = (1/√c)·A·Z̃` with
//! `Z̃` an `cM × K` matrix of i.i.d. `CN(0, 1)` entries. The normalised Gram
//! matrix `G = HᴴH/M = Z̃ᴴZ̃/(cM)` depends on `Z̃` alone.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, hermitize, CMat, C64};
use crate::{Error, Result};

/// How the precoder power constraint `E{tr(WWᴴ)} = 1` is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMode {
    /// `tr(WWᴴ) = 1` on every draw.
    #[default]
    PerRealization,
    /// One scale for the whole trial batch, estimated from the batch itself.
    Statistical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// BS antenna count.
    pub m: usize,
    /// User count.
    pub k: usize,
    /// Correlation level in `(0, 1]`; `c = 1` is i.i.d. Rayleigh.
    pub c: f64,
    /// Linear transmit SNR.
    pub rho_t: f64,
    pub norm_mode: NormMode,
}

const DIM_TOL: f64 = 1e-9;

impl SystemConfig {
    /// Builds and validates a configuration with per-realization normalisation.
    pub fn new(m: usize, k: usize, c: f64, rho_t: f64) -> Result<Self> {
        validate_config(SystemConfig {
            m,
            k,
            c,
            rho_t,
            norm_mode: NormMode::PerRealization,
        })
    }

    pub fn with_norm_mode(mut self, norm_mode: NormMode) -> Self {
        self.norm_mode = norm_mode;
        self
    }

    /// Effective channel dimension `cM`.
    pub fn effective_dim(&self) -> usize {
        (self.c * self.m as f64).round() as usize
    }

    /// Loading factor `r = K/M`.
    pub fn loading(&self) -> f64 {
        self.k as f64 / self.m as f64
    }

    /// Effective loading `r/c = K/(cM)`.
    pub fn effective_loading(&self) -> f64 {
        self.k as f64 / self.effective_dim() as f64
    }
}

pub fn validate_config(cfg: SystemConfig) -> Result<SystemConfig> {
    if !(cfg.c > 0.0 && cfg.c <= 1.0) {
        return Err(Error::range("c", cfg.c, "0 < c <= 1"));
    }
    if !(cfg.rho_t > 0.0 && cfg.rho_t.is_finite()) {
        return Err(Error::range("rho_t", cfg.rho_t, "rho_t > 0"));
    }
    if cfg.k == 0 {
        return Err(Error::range("K", 0.0, "K >= 1"));
    }
    let cm = cfg.c * cfg.m as f64;
    if (cm - cm.round()).abs() > DIM_TOL * cm.max(1.0) || cm.round() < 1.0 {
        return Err(Error::NonIntegerEffectiveDimension { value: cm });
    }
    let effective_dim = cm.round() as usize;
    if cfg.k > effective_dim {
        return Err(Error::OverloadedSystem {
            k: cfg.k,
            effective_dim,
        });
    }
    Ok(cfg)
}

/// One channel draw.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// `M × cM` semi-unitary direction matrix.
    pub a: CMat,
    /// `cM × K` i.i.d. `CN(0, 1)` matrix.
    pub ztilde: CMat,
    /// `M × K` channel, column `k` is `h_k`.
    pub h: CMat,
    /// `K × K` normalised Gram matrix.
    pub g: CMat,
}

/// Derives the seed of trial `index` from a master seed.
///
/// Stateless, so trial `i` sees the same channel whatever order or thread it
/// runs on.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws an `rows × cols` matrix of i.i.d. `CN(0, 1)` entries, column-major.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data: Vec<C64> = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c64(s * re, s * im)
        })
        .collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Orthonormal-column factor of a Gaussian `M × cM` matrix.
///
/// Householder QR with the phases of `diag(R)` folded back into `Q`, which
/// makes `A` Haar distributed on the Stiefel manifold.
pub fn draw_direction<R: Rng + ?Sized>(rng: &mut R, m: usize, cm: usize) -> CMat {
    let gauss = complex_gaussian(rng, m, cm);
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cm {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..m {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

fn gram_from_ztilde(ztilde: &CMat) -> CMat {
    let cm = ztilde.nrows() as f64;
    let mut g = ztilde.ad_mul(ztilde) / c64(cm, 0.0);
    hermitize(&mut g);
    g
}

/// Draws `Z̃` and `G` only.
///
/// Uses the same random stream as [`draw_realization`], so the returned `G`
/// is bit-identical to `draw_realization(cfg, seed).g`.
pub fn draw_gram(cfg: &SystemConfig, seed: u64) -> Result<(CMat, CMat)> {
    validate_config(*cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ztilde = complex_gaussian(&mut rng, cfg.effective_dim(), cfg.k);
    let g = gram_from_ztilde(&ztilde);
    Ok((ztilde, g))
}

/// Draws a full realization with a fresh direction matrix.
pub fn draw_realization(cfg: &SystemConfig, seed: u64) -> Result<ChannelRealization> {
    validate_config(*cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ztilde = complex_gaussian(&mut rng, cfg.effective_dim(), cfg.k);
    let a = draw_direction(&mut rng, cfg.m, cfg.effective_dim());
    Ok(assemble(cfg, a, ztilde))
}

/// Draws a realization sharing a fixed direction matrix `a`.
pub fn draw_with_direction(cfg: &SystemConfig, seed: u64, a: &CMat) -> Result<ChannelRealization> {
    validate_config(*cfg)?;
    if a.nrows() != cfg.m || a.ncols() != cfg.effective_dim() {
        return Err(Error::Plan(format!(
            "direction matrix is {}x{}, expected {}x{}",
            a.nrows(),
            a.ncols(),
            cfg.m,
            cfg.effective_dim()
        )));
    }
    let (ztilde, _) = draw_gram(cfg, seed)?;
    Ok(assemble(cfg, a.clone(), ztilde))
}

fn assemble(cfg: &SystemConfig, a: CMat, ztilde: CMat) -> ChannelRealization {
    let h = (&a * &ztilde) / c64(cfg.c.sqrt(), 0.0);
    let g = gram_from_ztilde(&ztilde);
    ChannelRealization { a, ztilde, h, g }
}

/// Off-diagonal energy of every column of `G`: `Σ_{i≠j} |G_ij|²`.
pub fn gram_offdiag(g: &CMat) -> Vec<f64> {
    (0..g.ncols())
        .map(|j| {
            g.column(j)
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, z)| z.norm_sqr())
                .sum()
        })
        .collect()
}
