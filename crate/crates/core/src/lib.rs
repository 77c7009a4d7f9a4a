//! Low-complexity approximate zero-forcing precoding for the massive MIMO
//! downlink.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: correlated channel draws `H = A·Z̃/√c` and Gram matrices.
//! - [`preconditioners`]: the precondition matrices of the first-order
//!   Neumann-series (NS) family (INS, DNS, TNS, CNS, ICNS, ordered ICNS) and
//!   their closed-form inverses.
//! - [`precoders`]: ZF, MRT and NS precoders, power normalisation and SINR.
//! - [`simulate`]: seeded, parallel Monte Carlo estimators of the ergodic and
//!   "simu-approx" sum-rates plus moment and eigenvalue-edge oracles.
//! - [`analysis`]: closed-form sum-rate approximations for INS and ICNS and
//!   the surrounding comparison formulas.
//! - [`complexity`]: multiplication/division counts of each scheme.
//! - [`cli`]: batch sweep runner and figure presets emitting CSV.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod complexity;
mod error;
pub mod linalg;
pub mod precoders;
pub mod preconditioners;
pub mod simulate;

pub use channel::{ChannelRealization, NormMode, SystemConfig};
pub use error::{Error, Result};
pub use precoders::{PrecoderSpec, PrecodingOutput, Scheme};
pub use preconditioners::{PreconditionKind, PreconditionMatrix};
pub use simulate::{MonteCarloPlan, SumRateEstimate};
