//! Numerical probes of the monotonicity claims behind the power-weight
//! families and of the scalar inequalities used to prove them.

mod bennett;
mod convexity;
mod probes;

pub use bennett::{
    bennett_claim, bennett_sequence, increment_condition, monotonicity_verdict, Claim, MonotonicityReport, Trend,
    DEFAULT_MONOTONE_TOL,
};
pub use convexity::{bennett_jameson_mean, f_alpha_p, second_difference_min, CONVEXITY_TOL};
pub use probes::{
    inequality_ids, probe, probe_declared, Direction, InequalityInfo, ParamBox, ProbeParams, ProbeReport,
    ProbeViolation, PROBE_TOL,
};

/// `Λ_1..Λ_n` with `Λ_k = Σ_{i≤k} i^α`.
pub(crate) fn power_partial_sums(alpha: f64, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=n).map(|i| (i as f64).powf(alpha)).collect();
    crate::sum::prefix_sums(&w)
}
