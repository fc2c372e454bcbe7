use serde::Serialize;

use super::{MonotoneVector, Regime};

/// Best constant of `||Ax||_q >= λ ||x||_p` (or `<=` in the upper regime)
/// over the monotone cone, together with its witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub lambda: f64,
    pub lambda_pow_q: f64,
    /// 1-based index attaining the extremum; the smallest such index.
    pub optimal_r: usize,
    /// `s_r` for `r = 1..n` (index `r - 1`).
    pub s_values: Vec<f64>,
    /// `step_vector(optimal_r, n)`.
    #[serde(skip)]
    pub extremal: MonotoneVector,
    pub p: f64,
    pub q: f64,
    pub regime: Regime,
    /// Estimated absolute error of every `s_r` coming from analytic row tails
    /// (zero for finite matrices).
    pub row_tail_error: f64,
}

impl BoundResult {
    /// `λ^p`, the quantity the classical inequalities display as the constant
    /// in front of `||x||_p^p`.
    pub fn lambda_pow_p(&self) -> f64 {
        if self.p == self.q {
            self.lambda_pow_q
        } else {
            self.lambda.powf(self.p)
        }
    }

    pub fn n(&self) -> usize {
        self.s_values.len()
    }
}
