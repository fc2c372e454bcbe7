//! Sharp lower and upper bounds for non-negative matrices acting on
//! non-increasing sequences in `l^p`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod families;
pub mod oracle;
pub mod report;
pub mod series;
pub mod specfun;
pub mod sum;
pub mod types;

pub use error::{Error, Result};
pub use specfun::SpecialValue;
pub use types::*;
