//! Linear precoders and per-user SINR.
//!
//! Every precoder is written as `W = β·(1/M)·H·X` for a `K × K` matrix `X`:
//! ZF uses `X = G⁻¹`, MRT `X = I`, and an NS scheme the first-order
//! approximation `X = 2D⁻¹ − D⁻¹GD⁻¹`. The effective channel is then
//! `HᴴW = β·G·X` and `tr(WWᴴ) = β²·Re tr(XᴴGX)/M`, so SINR only needs the
//! Gram matrix. [`sinr_per_user`] evaluates the same quantity from the full
//! `M × K` matrices.

use nalgebra::Cholesky;

use crate::channel::ChannelRealization;
use crate::linalg::{c64, real_inner, CMat};
use crate::preconditioners::{build_precondition, PreconditionKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Zf,
    Mrt,
    Ns(PreconditionKind),
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Zf => "ZF",
            Scheme::Mrt => "MRT",
            Scheme::Ns(kind) => kind.tag().name(),
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match self {
            Scheme::Ns(kind) => kind.omega(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecoderSpec {
    pub scheme: Scheme,
    /// Neumann-series order. Only first order is a supported precoder.
    pub ns_order: usize,
}

impl PrecoderSpec {
    pub fn new(scheme: Scheme) -> Self {
        PrecoderSpec { scheme, ns_order: 1 }
    }

    pub fn zf() -> Self {
        Self::new(Scheme::Zf)
    }

    pub fn mrt() -> Self {
        Self::new(Scheme::Mrt)
    }

    pub fn ns(kind: PreconditionKind) -> Self {
        Self::new(Scheme::Ns(kind))
    }
}

/// Power scaling applied to the unnormalised precoder `W₀ = (1/M)·H·X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `β = 1/√tr(W₀W₀ᴴ)` on each draw.
    PerRealization,
    /// `β = 1/√P` with `P` an externally estimated `E{tr(W₀W₀ᴴ)}`.
    Statistical { mean_power: f64 },
}

impl Normalization {
    pub fn beta(&self, raw_power: f64) -> f64 {
        match *self {
            Normalization::PerRealization => 1.0 / raw_power.sqrt(),
            Normalization::Statistical { mean_power } => 1.0 / mean_power.sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrecodingOutput {
    /// `M × K` normalised precoding matrix.
    pub w: CMat,
    pub beta: f64,
}

impl PrecodingOutput {
    /// Effective channel `HᴴW`.
    pub fn heff(&self, real: &ChannelRealization) -> CMat {
        real.h.ad_mul(&self.w)
    }
}

/// `Σ_{n=0}^{L} (−D⁻¹E)ⁿ·D⁻¹` with `E = G − D`, using `−D⁻¹E = I − D⁻¹G`.
pub fn ns_approx_inverse(d_inv: &CMat, g: &CMat, order: usize) -> CMat {
    let k = g.nrows();
    let iteration = CMat::identity(k, k) - d_inv * g;
    let mut term = d_inv.clone();
    let mut sum = d_inv.clone();
    for _ in 0..order {
        term = &iteration * &term;
        sum += &term;
    }
    sum
}

/// First-order approximation in its split form `D⁻¹ − D⁻¹·E·D⁻¹`.
pub fn first_order_split(d: &CMat, d_inv: &CMat, g: &CMat) -> CMat {
    let e = g - d;
    d_inv - d_inv * e * d_inv
}

/// Gram-domain form of a precoder: `X`, the unnormalised effective channel
/// `F = G·X` and the unnormalised power `tr(W₀W₀ᴴ)`.
#[derive(Debug, Clone)]
pub struct GramPrecoder {
    pub x: CMat,
    pub effective: CMat,
    pub raw_power: f64,
    pub selected_column: Option<usize>,
}

/// Builds the `K × K` core of a precoder from `G` alone.
pub fn gram_precoder(spec: &PrecoderSpec, g: &CMat, m: usize) -> Result<GramPrecoder> {
    if spec.ns_order != 1 {
        return Err(Error::range("ns_order", spec.ns_order as f64, "ns_order = 1"));
    }
    let k = g.nrows();
    let mut selected_column = None;
    let x = match spec.scheme {
        Scheme::Zf => {
            let chol = Cholesky::new(g.clone()).ok_or(Error::SingularGram)?;
            chol.solve(&CMat::identity(k, k))
        }
        Scheme::Mrt => CMat::identity(k, k),
        Scheme::Ns(kind) => {
            let p = build_precondition(kind, g)?;
            selected_column = p.selected_column;
            ns_approx_inverse(&p.d_inv, g, 1)
        }
    };
    let effective = g * &x;
    let raw_power = real_inner(&x, &effective) / m as f64;
    if !(raw_power > 0.0 && raw_power.is_finite()) {
        return Err(Error::SingularGram);
    }
    Ok(GramPrecoder {
        x,
        effective,
        raw_power,
        selected_column,
    })
}

/// Builds the full `M × K` precoder for one draw.
///
/// ZF solves `G·Y = Hᴴ` through a Cholesky factorisation instead of forming
/// `G⁻¹` explicitly.
pub fn build_precoder(
    spec: &PrecoderSpec,
    real: &ChannelRealization,
    norm: Normalization,
) -> Result<PrecodingOutput> {
    if spec.ns_order != 1 {
        return Err(Error::range("ns_order", spec.ns_order as f64, "ns_order = 1"));
    }
    let m = real.h.nrows();
    let inv_m = c64(1.0 / m as f64, 0.0);
    let w0 = match spec.scheme {
        Scheme::Zf => {
            let chol = Cholesky::new(real.g.clone()).ok_or(Error::SingularGram)?;
            chol.solve(&real.h.adjoint()).adjoint() * inv_m
        }
        Scheme::Mrt => &real.h * inv_m,
        Scheme::Ns(kind) => {
            let p = build_precondition(kind, &real.g)?;
            let x = ns_approx_inverse(&p.d_inv, &real.g, 1);
            (&real.h * x) * inv_m
        }
    };
    let raw_power: f64 = w0.iter().map(|z| z.norm_sqr()).sum();
    if !(raw_power > 0.0 && raw_power.is_finite()) {
        return Err(Error::SingularGram);
    }
    let beta = norm.beta(raw_power);
    Ok(PrecodingOutput {
        w: w0 * c64(beta, 0.0),
        beta,
    })
}

/// Per-user signal `|F_kk|²` and interference `Σ_{j≠k} |F_kj|²` of an
/// effective channel `F`, row `k` belonging to user `k`.
pub fn user_powers(effective: &CMat) -> (Vec<f64>, Vec<f64>) {
    let k = effective.nrows();
    let mut signal = Vec::with_capacity(k);
    let mut interference = Vec::with_capacity(k);
    for i in 0..k {
        let mut s = 0.0;
        let mut tot = 0.0;
        for j in 0..effective.ncols() {
            let p = effective[(i, j)].norm_sqr();
            if i == j {
                s = p;
            } else {
                tot += p;
            }
        }
        signal.push(s);
        interference.push(tot);
    }
    (signal, interference)
}

/// `SINR_k = |[HᴴW]_kk|² / (Σ_{j≠k} |[HᴴW]_kj|² + 1/ρ_t)`.
pub fn sinr_per_user(real: &ChannelRealization, out: &PrecodingOutput, rho_t: f64) -> Vec<f64> {
    sinr_from_effective(&out.heff(real), rho_t)
}

pub fn sinr_from_effective(heff: &CMat, rho_t: f64) -> Vec<f64> {
    let (signal, interference) = user_powers(heff);
    signal
        .iter()
        .zip(&interference)
        .map(|(s, i)| s / (i + 1.0 / rho_t))
        .collect()
}

/// SINR from unnormalised Gram-domain powers and a power scale `P`
/// (`β² = 1/P`): `s / (i + P/ρ_t)`.
pub fn sinr_from_powers(signal: &[f64], interference: &[f64], power: f64, rho_t: f64) -> Vec<f64> {
    signal
        .iter()
        .zip(interference)
        .map(|(s, i)| s / (i + power / rho_t))
        .collect()
}
