//! Domain types shared by every other module: the matrix, the exponent
//! regime, cone vectors and the bound result.

mod bound;
mod matrix;
mod regime;
pub(crate) mod vector;

pub use bound::BoundResult;
pub use matrix::{NonNegativeMatrix, RowSource};
pub use regime::{validate_regime, ExponentPair, Regime};
pub use vector::{pnorm, step_vector, MonotoneVector};
