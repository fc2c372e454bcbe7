use serde::Serialize;

use super::power_partial_sums;
use crate::error::{Error, Result};
use crate::series::power_sum_negative_tail;
use crate::sum::Neumaier;

/// Absolute tolerance on consecutive differences used by default.
pub const DEFAULT_MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    Increasing,
    Decreasing,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub values: Vec<f64>,
    pub verdict: Trend,
    /// 1-based `i` such that the step `v_i -> v_{i+1}` first contradicts
    /// the trend set by the earlier steps.
    pub first_violation_index: Option<usize>,
    pub claim_citation: String,
}

/// Classifies `values` by consecutive differences; differences within
/// `tol` count as ties. A sequence of ties is `Increasing`
/// (non-decreasing).
pub fn monotonicity_verdict(values: &[f64], tol: f64) -> MonotonicityReport {
    let mut up = false;
    let mut down = false;
    let mut first_violation_index = None;
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        let rises = d > tol;
        let falls = d < -tol;
        if (rises && down) || (falls && up) || d.is_nan() {
            first_violation_index = Some(i + 1);
            break;
        }
        up |= rises;
        down |= falls;
    }
    let verdict = match (first_violation_index, down) {
        (Some(_), _) => Trend::Neither,
        (None, true) => Trend::Decreasing,
        (None, false) => Trend::Increasing,
    };
    MonotonicityReport {
        values: values.to_vec(),
        verdict,
        first_violation_index,
        claim_citation: String::new(),
    }
}

/// `b_n = Λ_n^p / n · Σ_{k>n} Λ_k^{-p}` for `n = 1..=n_max`, `Λ_n = Σ_{i≤n} i^α`.
pub fn bennett_sequence(alpha: f64, p: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(alpha >= 0.0 && alpha.is_finite()) || !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need alpha >= 0 and p > 0 (alpha = {alpha}, p = {p})"
        )));
    }
    if (1.0 + alpha) * p <= 1.0 {
        return Err(Error::DivergentSeries(format!(
            "Σ Λ_k^(-p) diverges when (1 + alpha) p <= 1 (alpha = {alpha}, p = {p})"
        )));
    }
    if n_max == 0 {
        return Err(Error::Size("n_max must be at least 1".into()));
    }
    let big = power_partial_sums(alpha, n_max);
    let tail = power_sum_negative_tail(alpha, p, n_max, big[n_max - 1])?;
    // Suffix sums: acc holds Σ_{k>n} Λ_k^{-p} at the top of iteration n.
    let mut acc = Neumaier::new();
    acc.add(tail.value);
    let mut out = vec![0.0; n_max];
    for n in (1..=n_max).rev() {
        let ln = big[n - 1];
        out[n - 1] = ln.powf(p) / n as f64 * acc.value();
        acc.add(ln.powf(-p));
    }
    Ok(out)
}

/// `1 + n (Λ_{n+1}/Λ_n)^p - (n+1) (Λ_{n+2}/Λ_{n+1})^p`. Non-negative values for
/// all `n` make the Bennett sequence increasing.
pub fn increment_condition(alpha: f64, p: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let big = power_partial_sums(alpha, n + 2);
    let nf = n as f64;
    // Λ_{k+1}/Λ_k = 1 + (k+1)^α/Λ_k; the constant terms cancel exactly.
    let a = p * ((nf + 1.0).powf(alpha) / big[n - 1]).ln_1p();
    let b = p * ((nf + 2.0).powf(alpha) / big[n]).ln_1p();
    Ok(nf * a.exp_m1() - (nf + 1.0) * b.exp_m1())
}

/// A published monotonicity claim for the Bennett sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim {
    pub expected: Trend,
    pub citation: &'static str,
}

/// The first published claim covering `(alpha, p)`, if any.
pub fn bennett_claim(alpha: f64, p: f64) -> Option<Claim> {
    let inc = Trend::Increasing;
    let dec = Trend::Decreasing;
    let claims: [(bool, Trend, &'static str); 6] = [
        (
            (0.14..=1.0).contains(&alpha) && p >= 2.0,
            inc,
            "increasing for 0.14 <= alpha <= 1, p >= 2",
        ),
        (
            (0.0..=1.0).contains(&alpha) && p >= 8.0 / (1.0 + alpha),
            inc,
            "increasing for 0 <= alpha <= 1, p >= 8/(1+alpha)",
        ),
        (
            alpha > 1.0 && alpha <= 3.0 && p > 1.0 / (1.0 + alpha) && p <= 0.5,
            dec,
            "decreasing for 1 < alpha <= 3, 1/(1+alpha) < p <= 1/2",
        ),
        (alpha >= 3.0 && p >= 0.5, inc, "increasing for alpha >= 3, p >= 1/2"),
        (alpha >= 1.0 && p >= 1.0, inc, "increasing for alpha >= 1, p >= 1 (known)"),
        (
            alpha > 0.0 && alpha <= 1.0 && p > 1.0 / (1.0 + alpha) && p <= 1.0,
            dec,
            "decreasing for 0 < alpha <= 1, 1/(1+alpha) < p <= 1 (known)",
        ),
    ];
    claims
        .into_iter()
        .find(|c| c.0)
        .map(|(_, expected, citation)| Claim { expected, citation })
}
