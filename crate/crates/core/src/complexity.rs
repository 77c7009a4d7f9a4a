//! Leading-order operation counts of the NS precoders.
//!
//! Only the highest-order terms in `K` are kept and the `H·(·)` product
//! shared by every scheme is not counted.

use crate::preconditioners::KindTag;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub scheme: KindTag,
    /// Complex multiplications.
    pub mults: u64,
    /// Real or complex divisions.
    pub divs: u64,
    /// True when the count is not one of the tabulated reference rows.
    pub extrapolated: bool,
}

/// Counts for `scheme` at `k` users.
///
/// DNS is not a reference row: its diagonal inverse takes `K` divisions and
/// `D⁻¹GD⁻¹` two row/column scalings. The TNS division count is exactly `K`
/// pivots.
pub fn op_counts(scheme: KindTag, k: u64) -> Result<ComplexityReport> {
    if k < 2 {
        return Err(Error::range("K", k as f64, "K ≥ 2"));
    }
    let k2 = k * k;
    let (mults, divs) = match scheme {
        KindTag::Ins => (k2, 0),
        KindTag::Dns => (k2, k),
        KindTag::Tns => (6 * k2, k),
        KindTag::Cns => (4 * k2, k),
        KindTag::Icns => (4 * k2, 0),
        KindTag::OrderedIcns => (5 * k2, 0),
    };
    Ok(ComplexityReport {
        scheme,
        mults,
        divs,
        extrapolated: scheme == KindTag::Dns,
    })
}
