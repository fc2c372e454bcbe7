//! Independent checks of the solver: direct evaluation of `||Ax||_q/||x||_p`
//! on step vectors, random cone samples and a derivative-free local search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::compute_bound;
use crate::error::{Error, Result};
use crate::types::vector::pnorm_slice;
use crate::types::{step_vector, ExponentPair, MonotoneVector, NonNegativeMatrix, Regime};

/// Relative agreement required between step enumeration and the formula.
pub const FORMULA_TOL: f64 = 1e-12;
/// Relative slack before a sampled ratio counts as beating the formula.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Steps per restart of the local search run by [`verify`].
pub const SEARCH_ITERS: usize = 100;

/// `||Ax||_q / ||x||_p`.
pub fn ratio(a: &NonNegativeMatrix, x: &MonotoneVector, p: f64, q: f64) -> Result<f64> {
    if x.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: x.len(),
        });
    }
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(ratio_unchecked(a, x.as_slice(), p, q))
}

fn ratio_unchecked(a: &NonNegativeMatrix, x: &[f64], p: f64, q: f64) -> f64 {
    let ax = a.apply(x).expect("dimensions checked by caller");
    pnorm_slice(&ax, q) / pnorm_slice(x, p)
}

/// Extremum of `ratio` over the `n` step vectors, with its index.
pub fn enumerate_steps_detail(a: &NonNegativeMatrix, pair: ExponentPair) -> Result<(f64, usize)> {
    let n = a.cols();
    let mut best: Option<(f64, usize)> = None;
    for r in 1..=n {
        let v = ratio(a, &step_vector(r, n)?, pair.p(), pair.q())?;
        if best.is_none_or(|(b, _)| pair.regime().improves(v, b)) {
            best = Some((v, r));
        }
    }
    Ok(best.expect("n >= 1"))
}

/// `λ` from brute force over step vectors.
pub fn enumerate_steps(a: &NonNegativeMatrix, pair: ExponentPair) -> Result<f64> {
    enumerate_steps_detail(a, pair).map(|(v, _)| v)
}

/// The `index`-th sample of the stream: suffix sums of unit exponential
/// increments, scaled to unit `p`-norm. Each index has its own RNG stream.
pub fn sample_at(n: usize, p: f64, seed: u64, index: u64) -> MonotoneVector {
    if n == 1 {
        return MonotoneVector::from_values_unchecked(vec![1.0]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let inc: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let mut x = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += inc[i];
        x[i] = acc;
    }
    let norm = pnorm_slice(&x, p);
    for v in &mut x {
        *v /= norm;
    }
    MonotoneVector::from_values_unchecked(x)
}

/// `count` deterministic cone samples.
pub fn sample_monotone(n: usize, p: f64, count: usize, seed: u64) -> impl Iterator<Item = MonotoneVector> {
    (0..count as u64).map(move |i| sample_at(n, p, seed, i))
}

/// Restores `x_1 >= x_2 >= ... >= 0` by a running minimum; negative or NaN
/// entries become 0.
pub fn repair_monotone(x: &mut [f64]) {
    let mut cap = f64::INFINITY;
    for v in x.iter_mut() {
        if !(*v > 0.0) {
            *v = 0.0;
        }
        if *v > cap {
            *v = cap;
        }
        cap = *v;
    }
}

/// Searches for a cone vector whose ratio beats the formula: smaller than
/// `λ` in the lower regime, larger in the upper. Five restarts of `iters`
/// multiplicative-perturbation steps, step size halved every `iters/5`.
pub fn local_search(
    a: &NonNegativeMatrix,
    pair: ExponentPair,
    x0: &MonotoneVector,
    iters: usize,
    seed: u64,
) -> Result<MonotoneVector> {
    if x0.is_zero() {
        return Err(Error::ZeroVector);
    }
    if x0.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: x0.len(),
        });
    }
    let (p, q, regime) = (pair.p(), pair.q(), pair.regime());
    let n = x0.len();
    let mut best = x0.as_slice().to_vec();
    let mut best_val = ratio_unchecked(a, &best, p, q);
    let decay_every = (iters / 5).max(1);
    let mut y = vec![0.0; n];
    for restart in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let mut step = 0.5;
        for it in 0..iters {
            if it > 0 && it % decay_every == 0 {
                step *= 0.5;
            }
            let top = best[0];
            for (out, &v) in y.iter_mut().zip(&best) {
                let z: f64 = rng.sample(StandardNormal);
                *out = if v > 0.0 {
                    v * (step * z).exp()
                } else if rng.random::<f64>() * (n as f64) < 1.0 {
                    top * step * z.abs() * 0.1
                } else {
                    0.0
                };
            }
            repair_monotone(&mut y);
            if y.iter().all(|&v| v == 0.0) {
                continue;
            }
            let val = ratio_unchecked(a, &y, p, q);
            if val.is_finite() && regime.improves(val, best_val) {
                let norm = pnorm_slice(&y, p);
                best.iter_mut().zip(&y).for_each(|(b, v)| *b = v / norm);
                repair_monotone(&mut best);
                best_val = ratio_unchecked(a, &best, p, q);
            }
        }
    }
    Ok(MonotoneVector::from_values_unchecked(best))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    /// A cone vector beat `λ` by `gap` (relative) in the adverse direction.
    Violation { gap: f64 },
    /// Step enumeration disagrees with the closed formula.
    FormulaMismatch { rel_diff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub formula_lambda: f64,
    pub step_enum_lambda: f64,
    pub sampled_best: f64,
    pub search_best: f64,
    pub worst_vector: MonotoneVector,
    pub samples: usize,
    pub seed: u64,
    pub verdict: Verdict,
}

fn adverse_pick(regime: Regime, a: (f64, MonotoneVector), b: (f64, MonotoneVector)) -> (f64, MonotoneVector) {
    if regime.improves(b.0, a.0) {
        b
    } else {
        a
    }
}

/// Runs every oracle against the formula.
pub fn verify(a: &NonNegativeMatrix, pair: ExponentPair, samples: usize, seed: u64) -> Result<OracleReport> {
    let (p, q, regime) = (pair.p(), pair.q(), pair.regime());
    let bound = compute_bound(a, pair)?;
    let formula = bound.lambda;
    let step_enum = enumerate_steps(a, pair)?;
    let n = a.cols();

    let sampled: Vec<(f64, MonotoneVector)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = sample_at(n, p, seed, i);
            (ratio_unchecked(a, x.as_slice(), p, q), x)
        })
        .collect();
    let start = (step_enum, bound.extremal.clone());
    let sampled_best = sampled.into_iter().fold(None, |acc: Option<(f64, MonotoneVector)>, s| {
        Some(match acc {
            None => s,
            Some(cur) => adverse_pick(regime, cur, s),
        })
    });

    let mut worst = start.clone();
    let sampled_value = match &sampled_best {
        Some((v, x)) => {
            worst = adverse_pick(regime, worst, (*v, x.clone()));
            *v
        }
        None => f64::NAN,
    };
    let searched = local_search(a, pair, &worst.1.clone(), SEARCH_ITERS, seed)?;
    let search_value = ratio_unchecked(a, searched.as_slice(), p, q);
    worst = adverse_pick(regime, worst, (search_value, searched));

    let scale = formula.abs().max(f64::MIN_POSITIVE);
    let rel_diff = (step_enum - formula).abs() / scale;
    let gap = match regime {
        Regime::LowerBound => (formula - worst.0) / scale,
        Regime::UpperBound => (worst.0 - formula) / scale,
    };
    let verdict = if rel_diff > FORMULA_TOL && (step_enum - formula).abs() > 0.0 {
        Verdict::FormulaMismatch { rel_diff }
    } else if gap > VIOLATION_TOL {
        Verdict::Violation { gap }
    } else {
        Verdict::Consistent
    };
    Ok(OracleReport {
        formula_lambda: formula,
        step_enum_lambda: step_enum,
        sampled_best: sampled_value,
        search_best: search_value,
        worst_vector: worst.1,
        samples,
        seed,
        verdict,
    })
}

/// The two-sequence inequality behind the solver:
/// `(Σ(a+b)^q)^{p/q-1} Σ(a+b)^{q-1} a >= (Σ a^q)^{p/q}` for `p >= 1`,
/// `0 < q <= p`, reversed for `0 < p <= 1`, `q >= p`. Returns whether it
/// holds within `1e-12` relative slack.
pub fn two_sequence_check(a: &[f64], b: &[f64], p: f64, q: f64) -> Result<bool> {
    const F: &str = "two_sequence_check";
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::domain(F, "a and b must be non-empty and of equal length"));
    }
    if a.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || b.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(F, "a must be positive and b non-negative"));
    }
    let regime = if p >= 1.0 && q > 0.0 && q <= p {
        Regime::LowerBound
    } else if p > 0.0 && p <= 1.0 && q >= p {
        Regime::UpperBound
    } else {
        return Err(Error::domain(F, format!("(p, q) = ({p}, {q}) is in neither regime")));
    };
    let s1 = crate::sum::sum(a.iter().zip(b).map(|(x, y)| (x + y).powf(q)));
    let s2 = crate::sum::sum(a.iter().zip(b).map(|(x, y)| (x + y).powf(q - 1.0) * x));
    let s3 = crate::sum::sum(a.iter().map(|x| x.powf(q)));
    let lhs = s1.powf(p / q - 1.0) * s2;
    let rhs = s3.powf(p / q);
    let slack = 1e-12 * lhs.abs().max(rhs.abs());
    Ok(match regime {
        Regime::LowerBound => lhs >= rhs - slack,
        Regime::UpperBound => lhs <= rhs + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};

    #[test]
    fn ratio_examples() {
        let id = NonNegativeMatrix::identity(3).unwrap();
        let x = MonotoneVector::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert!((ratio(&id, &x, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let c = generate(&FamilySpec::Cesaro, 2).unwrap();
        let ones = MonotoneVector::new(vec![1.0, 1.0]).unwrap();
        assert!((ratio(&c, &ones, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ratio(&c, &MonotoneVector::zero(2), 2.0, 2.0), Err(Error::ZeroVector));
        assert!(ratio(&c, &x, 2.0, 2.0).is_err());
    }

    #[test]
    fn step_enumeration_examples() {
        let id = NonNegativeMatrix::identity(3).unwrap();
        assert_eq!(enumerate_steps(&id, ExponentPair::lower(2.0, 2.0).unwrap()).unwrap(), 1.0);
        let c = generate(&FamilySpec::Cesaro, 2).unwrap();
        let (v, r) = enumerate_steps_detail(&c, ExponentPair::lower(2.0, 2.0).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(r, 2);
        let t = generate(&FamilySpec::TailPower { alpha: 1.0, t: 1.0 }, 2).unwrap();
        let v = enumerate_steps(&t, ExponentPair::upper(0.5, 0.5).unwrap()).unwrap();
        // λ = s_2^{1/q} = s_2^2.
        let s2 = (2f64.sqrt() + 0.5f64.sqrt()) / 2.0;
        assert!((v - s2 * s2).abs() < 1e-14);
        assert!((v - 1.125).abs() < 1e-14);
    }

    #[test]
    fn samples_are_deterministic_cone_vectors() {
        let a: Vec<_> = sample_monotone(6, 1.5, 20, 7).collect();
        let b: Vec<_> = sample_monotone(6, 1.5, 20, 7).collect();
        assert_eq!(a, b);
        for x in &a {
            assert!(MonotoneVector::new(x.as_slice().to_vec()).is_ok());
            assert!((pnorm_slice(x.as_slice(), 1.5) - 1.0).abs() < 1e-14);
        }
        assert_ne!(a[0], a[1]);
        assert!(sample_monotone(1, 0.3, 5, 1).all(|x| x.as_slice() == [1.0]));
    }

    #[test]
    fn repair_produces_cone_vectors() {
        let mut x = vec![0.5, 2.0, -1.0, 0.3, f64::NAN, 0.1];
        repair_monotone(&mut x);
        assert_eq!(x, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn local_search_cannot_beat_the_formula() {
        let c = generate(&FamilySpec::Cesaro, 8).unwrap();
        let pair = ExponentPair::lower(2.0, 2.0).unwrap();
        let lambda = compute_bound(&c, pair).unwrap().lambda;
        let x0 = sample_at(8, 2.0, 3, 0);
        let x = local_search(&c, pair, &x0, 200, 11).unwrap();
        assert!(MonotoneVector::new(x.as_slice().to_vec()).is_ok());
        assert!(ratio(&c, &x, 2.0, 2.0).unwrap() >= lambda * (1.0 - 1e-9));
        let id = NonNegativeMatrix::identity(5).unwrap();
        let y = local_search(&id, pair, &sample_at(5, 2.0, 1, 0), 50, 2).unwrap();
        assert!((ratio(&id, &y, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn local_search_from_the_extremal_stays_put() {
        let t = generate(&FamilySpec::TailPower { alpha: 1.0, t: 1.0 }, 16).unwrap();
        let pair = ExponentPair::upper(0.5, 0.5).unwrap();
        let b = compute_bound(&t, pair).unwrap();
        let x = local_search(&t, pair, &b.extremal, 100, 5).unwrap();
        let v = ratio(&t, &x, 0.5, 0.5).unwrap();
        assert!((v - b.lambda).abs() <= 1e-9 * b.lambda);
    }

    #[test]
    fn verify_examples() {
        let id = NonNegativeMatrix::identity(4).unwrap();
        let r = verify(&id, ExponentPair::lower(2.0, 2.0).unwrap(), 1000, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        let c = generate(&FamilySpec::Cesaro, 16).unwrap();
        let r = verify(&c, ExponentPair::lower(2.0, 2.0).unwrap(), 2000, 42).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        let again = verify(&c, ExponentPair::lower(2.0, 2.0).unwrap(), 2000, 42).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn non_step_vectors_do_not_beat_steps() {
        let a = NonNegativeMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let steps = enumerate_steps(&a, ExponentPair::lower(1.0, 1.0).unwrap()).unwrap();
        for x in sample_monotone(2, 1.0, 200, 9) {
            assert!(ratio(&a, &x, 1.0, 1.0).unwrap() >= steps * (1.0 - 1e-15));
        }
    }

    #[test]
    fn two_sequence_examples() {
        assert!(two_sequence_check(&[1.0, 2.0], &[0.0, 0.0], 2.0, 1.5).unwrap());
        assert!(two_sequence_check(&[1.0], &[1.0], 2.0, 1.0).unwrap());
        assert!(two_sequence_check(&[1.0, 3.0], &[2.0, 0.5], 0.5, 2.0).unwrap());
        assert!(two_sequence_check(&[1.0], &[1.0], 2.0, 3.0).is_err());
        assert!(two_sequence_check(&[0.0], &[1.0], 2.0, 1.0).is_err());
        assert!(two_sequence_check(&[1.0], &[], 2.0, 1.0).is_err());
    }
}
