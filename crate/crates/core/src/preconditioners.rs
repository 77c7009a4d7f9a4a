//! Precondition matrices for the first-order Neumann series.
//!
//! The Gram matrix is split as `G = D + E` with `D` cheap to invert. Every
//! kind here has a closed-form (or linear-time) inverse:
//!
//! | kind          | `D`                          | `D⁻¹`                               |
//! |---------------|------------------------------|-------------------------------------|
//! | INS           | `ωI`                         | `(1/ω)I`                            |
//! | DNS           | `diag₀(G)`                   | entrywise reciprocal                |
//! | TNS           | `diag₀(G) + diag₁(G)`        | tridiagonal elimination             |
//! | CNS           | `diag₀(G) + G_c`             | `(I − G̃_c)·diag₀(G)⁻¹`              |
//! | ICNS          | `ωI + G_c`                   | `(1/ω)I − (1/ω²)G_c`                |
//! | ordered ICNS  | `ωI + G̃_{j★}`                | `(1/ω)I − (1/ω²)G̃_{j★}`             |
//!
//! `G_c` keeps the strictly-lower part of column 0; `G̃_{j★}` keeps the
//! off-diagonal part of the column with the largest off-diagonal energy.
//! Both square to zero, which is what makes the two-term inverses exact.

use std::fmt;

use crate::channel::gram_offdiag;
use crate::linalg::{c64, identity, spectral_norm, CMat, C64};
use crate::{Error, Result};

/// Pivots below this magnitude are treated as singular.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreconditionKind {
    Ins { omega: f64 },
    Dns,
    Tns,
    Cns,
    Icns { omega: f64 },
    OrderedIcns { omega: f64 },
}

/// Scheme tags without parameters, used for labelling and complexity tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KindTag {
    Ins,
    Dns,
    Tns,
    Cns,
    Icns,
    OrderedIcns,
}

impl KindTag {
    pub const ALL: [KindTag; 6] = [
        KindTag::Ins,
        KindTag::Dns,
        KindTag::Tns,
        KindTag::Cns,
        KindTag::Icns,
        KindTag::OrderedIcns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KindTag::Ins => "INS",
            KindTag::Dns => "DNS",
            KindTag::Tns => "TNS",
            KindTag::Cns => "CNS",
            KindTag::Icns => "ICNS",
            KindTag::OrderedIcns => "OrderedICNS",
        }
    }

    pub fn uses_omega(self) -> bool {
        matches!(self, KindTag::Ins | KindTag::Icns | KindTag::OrderedIcns)
    }

    /// Builds the kind, attaching `omega` where the scheme has one.
    pub fn with_omega(self, omega: f64) -> PreconditionKind {
        match self {
            KindTag::Ins => PreconditionKind::Ins { omega },
            KindTag::Dns => PreconditionKind::Dns,
            KindTag::Tns => PreconditionKind::Tns,
            KindTag::Cns => PreconditionKind::Cns,
            KindTag::Icns => PreconditionKind::Icns { omega },
            KindTag::OrderedIcns => PreconditionKind::OrderedIcns { omega },
        }
    }
}

impl fmt::Display for KindTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KindTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ins" => Ok(KindTag::Ins),
            "dns" => Ok(KindTag::Dns),
            "tns" => Ok(KindTag::Tns),
            "cns" => Ok(KindTag::Cns),
            "icns" => Ok(KindTag::Icns),
            "orderedicns" | "ordered-icns" | "oicns" => Ok(KindTag::OrderedIcns),
            other => Err(Error::Plan(format!("unknown precondition kind `{other}`"))),
        }
    }
}

impl PreconditionKind {
    pub fn tag(&self) -> KindTag {
        match self {
            PreconditionKind::Ins { .. } => KindTag::Ins,
            PreconditionKind::Dns => KindTag::Dns,
            PreconditionKind::Tns => KindTag::Tns,
            PreconditionKind::Cns => KindTag::Cns,
            PreconditionKind::Icns { .. } => KindTag::Icns,
            PreconditionKind::OrderedIcns { .. } => KindTag::OrderedIcns,
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match *self {
            PreconditionKind::Ins { omega }
            | PreconditionKind::Icns { omega }
            | PreconditionKind::OrderedIcns { omega } => Some(omega),
            _ => None,
        }
    }

    fn checked_omega(&self) -> Result<Option<f64>> {
        match self.omega() {
            Some(w) if !(w > 0.0 && w.is_finite()) => Err(Error::range("omega", w, "omega > 0")),
            w => Ok(w),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PreconditionMatrix {
    pub d: CMat,
    pub d_inv: CMat,
    pub kind: PreconditionKind,
    /// Column folded into `D` by ordered ICNS.
    pub selected_column: Option<usize>,
}

/// Asymptotic extreme eigenvalues of `G` (Marchenko–Pastur edges).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpEdges {
    pub a_bar: f64,
    pub b_bar: f64,
}

/// Edges `(1 ∓ √(r/c))²` for effective loading `r_eff = K/(cM)`.
pub fn mp_edges(r_eff: f64) -> Result<MpEdges> {
    if !(r_eff > 0.0 && r_eff <= 1.0) {
        return Err(Error::range("r/c", r_eff, "0 < r/c <= 1"));
    }
    let s = r_eff.sqrt();
    Ok(MpEdges {
        a_bar: (1.0 - s) * (1.0 - s),
        b_bar: (1.0 + s) * (1.0 + s),
    })
}

/// Asymptotically optimal INS relaxation `(ā + b̄)/2 = 1 + K/(cM)`.
pub fn omega_star(m: usize, k: usize, c: f64) -> f64 {
    let r_eff = k as f64 / (c * m as f64);
    let s = r_eff.sqrt();
    ((1.0 - s) * (1.0 - s) + (1.0 + s) * (1.0 + s)) / 2.0
}

/// Index of the column with the largest off-diagonal energy; ties go to the
/// smallest index.
pub fn strongest_column(g: &CMat) -> usize {
    let energy = gram_offdiag(g);
    let mut best = 0;
    for (j, &e) in energy.iter().enumerate().skip(1) {
        if e > energy[best] {
            best = j;
        }
    }
    best
}

pub fn build_precondition(kind: PreconditionKind, g: &CMat) -> Result<PreconditionMatrix> {
    let k = g.nrows();
    let omega = kind.checked_omega()?;
    let mut selected_column = None;
    let d = match kind {
        PreconditionKind::Ins { .. } => identity(k) * c64(omega.unwrap(), 0.0),
        PreconditionKind::Dns => CMat::from_fn(k, k, |i, j| if i == j { g[(i, i)] } else { C64::default() }),
        PreconditionKind::Tns => CMat::from_fn(k, k, |i, j| {
            if i.abs_diff(j) <= 1 {
                g[(i, j)]
            } else {
                C64::default()
            }
        }),
        PreconditionKind::Cns => CMat::from_fn(k, k, |i, j| {
            if i == j || (j == 0 && i > 0) {
                g[(i, j)]
            } else {
                C64::default()
            }
        }),
        PreconditionKind::Icns { omega } => column_preconditioner(g, 0, omega),
        PreconditionKind::OrderedIcns { omega } => {
            let j = strongest_column(g);
            selected_column = Some(j);
            column_preconditioner(g, j, omega)
        }
    };
    let d_inv = invert_precondition(kind, &d)?;
    Ok(PreconditionMatrix {
        d,
        d_inv,
        kind,
        selected_column,
    })
}

/// `ωI` plus the off-diagonal part of column `col` of `g`.
///
/// For `col = 0` this is exactly the ICNS matrix `ωI + G_c`.
fn column_preconditioner(g: &CMat, col: usize, omega: f64) -> CMat {
    let k = g.nrows();
    let mut d = identity(k) * c64(omega, 0.0);
    for i in 0..k {
        if i != col {
            d[(i, col)] = g[(i, col)];
        }
    }
    d
}

/// Inverts a precondition matrix using the closed form of its kind.
pub fn invert_precondition(kind: PreconditionKind, d: &CMat) -> Result<CMat> {
    let k = d.nrows();
    match kind {
        PreconditionKind::Ins { omega } => {
            check_pivot(0, c64(omega, 0.0))?;
            Ok(identity(k) * c64(1.0 / omega, 0.0))
        }
        PreconditionKind::Dns => {
            let mut inv = CMat::zeros(k, k);
            for i in 0..k {
                check_pivot(i, d[(i, i)])?;
                inv[(i, i)] = d[(i, i)].inv();
            }
            Ok(inv)
        }
        PreconditionKind::Tns => tridiagonal_inverse(d),
        PreconditionKind::Cns => {
            // D = diag₀(G)(I + G̃_c) ⇒ D⁻¹ = (I − G̃_c)·diag₀(G)⁻¹
            let mut recip = Vec::with_capacity(k);
            for i in 0..k {
                check_pivot(i, d[(i, i)])?;
                recip.push(d[(i, i)].inv());
            }
            let mut inv = CMat::zeros(k, k);
            for i in 0..k {
                inv[(i, i)] = recip[i];
            }
            for i in 1..k {
                let scaled = recip[i] * d[(i, 0)];
                inv[(i, 0)] = -scaled * recip[0];
            }
            Ok(inv)
        }
        PreconditionKind::Icns { omega } | PreconditionKind::OrderedIcns { omega } => {
            // D = ωI + N with N² = 0 ⇒ D⁻¹ = (1/ω)I − N/ω²
            check_pivot(0, c64(omega, 0.0))?;
            let n = d - identity(k) * c64(omega, 0.0);
            Ok(identity(k) * c64(1.0 / omega, 0.0) - n * c64(1.0 / (omega * omega), 0.0))
        }
    }
}

fn check_pivot(index: usize, pivot: C64) -> Result<()> {
    let magnitude = pivot.norm();
    if magnitude < PIVOT_TOL || !magnitude.is_finite() {
        return Err(Error::SingularPrecondition { index, magnitude });
    }
    Ok(())
}

/// Inverse of a tridiagonal matrix by non-pivoting forward elimination and
/// back substitution against every unit vector.
///
/// Only the three central diagonals of `d` are read.
pub fn tridiagonal_inverse(d: &CMat) -> Result<CMat> {
    let k = d.nrows();
    if k == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let sub: Vec<C64> = (1..k).map(|i| d[(i, i - 1)]).collect();
    let sup: Vec<C64> = (0..k - 1).map(|i| d[(i, i + 1)]).collect();

    // LU factors: U has pivots on the diagonal and `sup` above, L has `mult` below.
    let mut pivots = Vec::with_capacity(k);
    let mut mult = Vec::with_capacity(k.saturating_sub(1));
    check_pivot(0, d[(0, 0)])?;
    pivots.push(d[(0, 0)]);
    for i in 1..k {
        let l = sub[i - 1] / pivots[i - 1];
        let p = d[(i, i)] - l * sup[i - 1];
        check_pivot(i, p)?;
        mult.push(l);
        pivots.push(p);
    }

    let mut inv = CMat::zeros(k, k);
    let mut y = vec![C64::default(); k];
    for col in 0..k {
        for (i, slot) in y.iter_mut().enumerate() {
            let e = if i == col { c64(1.0, 0.0) } else { C64::default() };
            *slot = e;
        }
        for i in 1..k {
            let prev = y[i - 1];
            y[i] -= mult[i - 1] * prev;
        }
        y[k - 1] /= pivots[k - 1];
        for i in (0..k - 1).rev() {
            let next = y[i + 1];
            y[i] = (y[i] - sup[i] * next) / pivots[i];
        }
        for i in 0..k {
            inv[(i, col)] = y[i];
        }
    }
    Ok(inv)
}

/// Spectral norm of the NS iteration matrix `−D⁻¹E = I − D⁻¹G`.
///
/// Values below one mean the Neumann series converges.
pub fn spectral_check(d_inv: &CMat, g: &CMat) -> f64 {
    let k = g.nrows();
    let iteration = identity(k) - d_inv * g;
    spectral_norm(&iteration, 1e-8, 10_000)
}
