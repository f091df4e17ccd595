//! Reed-Muller code workbench.
//!
//! Exact weight distributions of RM(n, v), bit-MAP and block-MAP decoding
//! (deterministic and randomized) over binary memoryless symmetric channels,
//! and the analytic pipeline that turns a bit-error decay rate into a
//! block-error bound.
//!
//! Module map:
//! - [`boolfn`]: truth tables, algebraic normal form, discrete derivatives.
//! - [`rmcode`]: RM(n, v) construction, encoder and codeword enumeration.
//! - [`channels`]: BEC, BSC and tabulated symmetric channels.
//! - [`decoders`]: posteriors, the four MAP decoders, exact and Monte-Carlo
//!   error-probability engines.
//! - [`spectrum`]: exact weight distributions and weight-distribution bounds.
//! - [`bounds`]: entropy bounds, rate windows, union bounds and the
//!   low/high distance decomposition of the randomized block error.

pub mod bounds;
pub mod boolfn;
pub mod channels;
pub mod decoders;
mod error;
pub mod extreal;
pub mod gf2;
pub mod rational;
pub mod rmcode;
pub mod spectrum;

pub use error::{Error, Result};
