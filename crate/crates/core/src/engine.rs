//! The solver: `s_r = r^{-q/p} Σ_j (Σ_{k<=r} a_{j,k})^q` for every `r`, its
//! minimum or maximum, and convergence studies over growing truncations.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{asymptotic_constant_in, FamilyRows, FamilySpec, KnownConstant, RowPolicy, RowTail, Truncation};
use crate::sum::Neumaier;
use crate::types::vector::powf_fast;
use crate::types::{step_vector, BoundResult, ExponentPair, NonNegativeMatrix, RowSource};

/// Prefix sums below this are treated as zero before raising to `q`.
pub const PREFIX_FLOOR: f64 = 1e-300;

/// `s_1 .. s_n` for one exponent pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SRSequence {
    pub values: Vec<f64>,
    pub p: f64,
    pub q: f64,
    /// Bound on the error every `s_r` inherits from analytic row tails.
    pub tail_error: f64,
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponents must be positive and finite (p = {p}, q = {q})"
        )));
    }
    Ok(())
}

/// Number of row chunks for the ordered reduction. Depends only on the
/// matrix shape, never on the thread count.
fn chunk_count(m: usize, n: usize) -> usize {
    let by_memory = (4_000_000 / n.max(1)).max(1);
    m.min(64).min(by_memory).max(1)
}

/// Accumulates `(Σ_{k<=r} a_{j,k})^q` over the rows `rows` into one
/// compensated accumulator per `r`.
fn accumulate_rows<S: RowSource + ?Sized>(src: &S, rows: std::ops::Range<usize>, q: f64) -> Vec<Neumaier> {
    let n = src.n_cols();
    let mut acc = vec![Neumaier::new(); n];
    let mut row = vec![0.0; n];
    for j in rows {
        src.fill_row(j, &mut row);
        let mut prefix = Neumaier::new();
        let mut last = f64::NAN;
        let mut last_pow = 0.0;
        for (a, &v) in acc.iter_mut().zip(&row) {
            prefix.add(v);
            let s = prefix.value();
            if s < PREFIX_FLOOR {
                continue;
            }
            if s != last {
                last = s;
                last_pow = powf_fast(s, q);
            }
            a.add(last_pow);
        }
    }
    acc
}

/// `s_r` for every `r`, optionally including an analytic tail of rows.
pub fn s_sequence_source<S: RowSource + ?Sized>(src: &S, p: f64, q: f64, tail: Option<&RowTail>) -> Result<SRSequence> {
    check_exponents(p, q)?;
    let (m, n) = (src.n_rows(), src.n_cols());
    let chunks = chunk_count(m, n);
    let bounds: Vec<std::ops::Range<usize>> = (0..chunks).map(|c| (c * m / chunks)..((c + 1) * m / chunks)).collect();
    let partial: Vec<Vec<Neumaier>> = bounds.into_par_iter().map(|r| accumulate_rows(src, r, q)).collect();
    let mut total = vec![Neumaier::new(); n];
    for part in &partial {
        for (t, v) in total.iter_mut().zip(part) {
            t.merge(v);
        }
    }
    let mut tail_error = 0.0f64;
    let exponent = q / p;
    let values = total
        .iter_mut()
        .enumerate()
        .map(|(i, acc)| {
            let r = (i + 1) as f64;
            let scale = if p == q { 1.0 / r } else { r.powf(-exponent) };
            if let Some(t) = tail {
                let w = powf_fast(t.partial_sums[i], q);
                acc.add(w * t.sum.value);
                tail_error = tail_error.max(w * t.sum.est_abs_error * scale);
            }
            if p == q {
                acc.value() / r
            } else {
                acc.value() * scale
            }
        })
        .collect();
    Ok(SRSequence { values, p, q, tail_error })
}

/// `s_r` for a dense matrix.
pub fn s_sequence(a: &NonNegativeMatrix, p: f64, q: f64) -> Result<SRSequence> {
    s_sequence_source(a, p, q, None)
}

/// Takes the regime's extremum of an `s_r` sequence. Ties go to the
/// smallest `r`.
pub fn bound_from_sequence(s: SRSequence, pair: ExponentPair) -> Result<BoundResult> {
    let regime = pair.regime();
    let mut best = 0;
    for (i, &v) in s.values.iter().enumerate().skip(1) {
        if regime.improves(v, s.values[best]) {
            best = i;
        }
    }
    let lambda_pow_q = s.values[best];
    let q = pair.q();
    let lambda = if q == 1.0 {
        lambda_pow_q
    } else if q == 2.0 {
        lambda_pow_q.sqrt()
    } else {
        lambda_pow_q.powf(1.0 / q)
    };
    let n = s.values.len();
    Ok(BoundResult {
        lambda,
        lambda_pow_q,
        optimal_r: best + 1,
        extremal: step_vector(best + 1, n)?,
        p: pair.p(),
        q,
        regime,
        row_tail_error: s.tail_error,
        s_values: s.values,
    })
}

/// Best constant of `A` on the monotone cone.
pub fn compute_bound(a: &NonNegativeMatrix, pair: ExponentPair) -> Result<BoundResult> {
    bound_from_sequence(s_sequence(a, pair.p(), pair.q())?, pair)
}

/// Best constant of a family truncation, rows streamed. With
/// `RowExtent::Infinite`, rows beyond `N` enter through their closed-form sum.
pub fn family_bound(spec: &FamilySpec, trunc: Truncation, pair: ExponentPair) -> Result<BoundResult> {
    let rows = FamilyRows::new(spec, trunc)?;
    let tail = rows.row_tail(pair.q())?;
    bound_from_sequence(s_sequence_source(&rows, pair.p(), pair.q(), tail.as_ref())?, pair)
}

/// The `N x N` section, streamed; bit-identical to
/// `compute_bound(&generate(spec, n)?, pair)`.
pub fn family_bound_streamed(spec: &FamilySpec, n: usize, pair: ExponentPair) -> Result<BoundResult> {
    family_bound(spec, Truncation::square(n), pair)
}

/// `λ^q(N)` over increasing sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub sizes: Vec<usize>,
    /// `λ^q(N)`.
    pub lambdas: Vec<f64>,
    pub optimal_r: Vec<usize>,
    pub target: Option<KnownConstant>,
    /// `λ^q(N) - target`.
    pub gaps: Option<Vec<f64>>,
    /// Advisory Richardson estimate of the limit.
    pub extrapolated: Option<f64>,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Size("sizes must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Builds the table from independently computed sizes.
pub fn convergence_table(
    sizes: &[usize],
    pair: ExponentPair,
    target: Option<KnownConstant>,
    bound_at: impl Fn(usize) -> Result<BoundResult> + Sync,
) -> Result<ConvergenceTable> {
    check_sizes(sizes)?;
    let results: Vec<BoundResult> = sizes.par_iter().map(|&n| bound_at(n)).collect::<Result<_>>()?;
    let lambdas: Vec<f64> = results.iter().map(|b| b.lambda_pow_q).collect();
    let target = target.filter(|_| pair.p() == pair.q());
    let gaps = target.as_ref().map(|t| lambdas.iter().map(|v| v - t.value).collect());
    let extrapolated = richardson(sizes, &lambdas);
    Ok(ConvergenceTable {
        sizes: sizes.to_vec(),
        optimal_r: results.iter().map(|b| b.optimal_r).collect(),
        lambdas,
        target,
        gaps,
        extrapolated,
    })
}

/// Convergence of a family toward its published constant, if any.
pub fn convergence_study(spec: &FamilySpec, pair: ExponentPair, sizes: &[usize]) -> Result<ConvergenceTable> {
    convergence_study_with(spec, pair, sizes, RowPolicy::Auto)
}

pub fn convergence_study_with(
    spec: &FamilySpec,
    pair: ExponentPair,
    sizes: &[usize],
    rows: RowPolicy,
) -> Result<ConvergenceTable> {
    let target = asymptotic_constant_in(spec, pair.p(), pair.q(), pair.regime()).ok();
    convergence_table(sizes, pair, target, |n| family_bound(spec, rows.resolve(spec, n, pair.q()), pair))
}

/// Limit of `v(N) = L + C N^{-k}` through the last three points, when the
/// differences share a sign and shrink.
pub fn richardson(sizes: &[usize], values: &[f64]) -> Option<f64> {
    let len = values.len();
    if len < 3 || sizes.len() != len {
        return None;
    }
    let (n1, n2, n3) = (sizes[len - 3] as f64, sizes[len - 2] as f64, sizes[len - 1] as f64);
    let (v1, v2, v3) = (values[len - 3], values[len - 2], values[len - 1]);
    let (d1, d2) = (v2 - v1, v3 - v2);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() {
        return None;
    }
    let target = d1 / d2;
    let ratio = |k: f64| (n1.powf(-k) - n2.powf(-k)) / (n2.powf(-k) - n3.powf(-k));
    let (mut lo, mut hi) = (1e-6, 20.0);
    if (ratio(lo) - target) * (ratio(hi) - target) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (ratio(lo) - target) * (ratio(mid) - target) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let c = d2 / (n3.powf(-k) - n2.powf(-k));
    let limit = v3 - c * n3.powf(-k);
    limit.is_finite().then_some(limit)
}
