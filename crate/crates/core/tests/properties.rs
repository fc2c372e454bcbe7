//! Invariants checked on random inputs.

use monobound::analysis::{increment_condition, monotonicity_verdict, Trend};
use monobound::engine::{compute_bound, family_bound_streamed, s_sequence};
use monobound::families::{generate, FamilySpec, Shape};
use monobound::oracle::{two_sequence_check, local_search, ratio, repair_monotone, sample_monotone};
use monobound::report::{format_f64, to_json};
use monobound::specfun::{beta, generalized_log_mean};
use monobound::{pnorm, step_vector, ExponentPair, MonotoneVector, NonNegativeMatrix, Regime};
use proptest::prelude::*;

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = NonNegativeMatrix> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        prop::collection::vec(0.0f64..1.0, m * n).prop_map(move |d| NonNegativeMatrix::new(m, n, d).unwrap())
    })
}

fn pair() -> impl Strategy<Value = ExponentPair> {
    prop_oneof![
        (1.0f64..4.0, 0.05f64..1.0).prop_map(|(p, f)| ExponentPair::lower(p, p * f).unwrap()),
        (0.1f64..1.0, 1.0f64..4.0).prop_map(|(p, f)| ExponentPair::upper(p, p * f).unwrap()),
    ]
}

fn family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        Just(FamilySpec::Cesaro),
        (0.1f64..4.0, 0.0f64..=1.0).prop_map(|(alpha, t)| FamilySpec::TailPower { alpha, t }),
        (1.0f64..4.0).prop_map(|alpha| FamilySpec::TailAlphaK { alpha }),
        (1.05f64..4.0, 0.0f64..3.0).prop_map(|(alpha, d)| FamilySpec::GeneralizedLogMeanTail { alpha, beta: alpha + d }),
        (0.0f64..4.0).prop_map(|alpha| FamilySpec::WeightedMeanPower { alpha }),
        (0.1f64..4.0).prop_map(|alpha| FamilySpec::WeightedMeanPowerDiff { alpha }),
        (0.1f64..4.0).prop_map(|alpha| FamilySpec::NorlundPowerDiff { alpha }),
        (0.0f64..4.0).prop_map(|alpha| FamilySpec::NorlundPowerSum { alpha }),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_vectors_are_cone_vectors_with_known_norm(n in 1usize..200, r0 in 0usize..200, p in 0.1f64..6.0) {
        let r = r0 % n + 1;
        let x = step_vector(r, n).unwrap();
        prop_assert!(MonotoneVector::new(x.as_slice().to_vec()).is_ok());
        let expect = (r as f64).powf(1.0 / p);
        prop_assert!((pnorm(&x, p) - expect).abs() <= 4.0 * f64::EPSILON * expect);
    }

    #[test]
    fn pnorm_is_homogeneous(v in prop::collection::vec(0.0f64..10.0, 1..40), c in 0.0f64..100.0, p in 0.1f64..5.0) {
        let mut v = v;
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assume!(v[0] > 0.0);
        let x = MonotoneVector::new(v).unwrap();
        let lhs = pnorm(&x.scaled(c).unwrap(), p);
        prop_assert!(rel(lhs, c * pnorm(&x, p)) < 1e-12);
    }

    #[test]
    fn bound_is_the_extremum_of_the_sequence(a in matrix(12, 12), pr in pair()) {
        let b = compute_bound(&a, pr).unwrap();
        let s = s_sequence(&a, pr.p(), pr.q()).unwrap().values;
        let ext = match pr.regime() {
            Regime::LowerBound => s.iter().cloned().fold(f64::INFINITY, f64::min),
            Regime::UpperBound => s.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        };
        prop_assert_eq!(b.lambda_pow_q, ext);
        prop_assert_eq!(s[b.optimal_r - 1], ext);
        prop_assert!(s[..b.optimal_r - 1].iter().all(|&v| v != ext));
    }

    #[test]
    fn scaling_and_row_permutation(a in matrix(10, 10), pr in pair(), c in 0.01f64..100.0, seed in any::<u64>()) {
        let b = compute_bound(&a, pr).unwrap();
        let bc = compute_bound(&a.scaled(c).unwrap(), pr).unwrap();
        prop_assert!(rel(bc.lambda, c * b.lambda) < 1e-12);
        let mut perm: Vec<usize> = (0..a.rows()).collect();
        let mut st = seed;
        for i in (1..perm.len()).rev() {
            st = st.wrapping_mul(6364136223846793005).wrapping_add(1);
            perm.swap(i, (st >> 33) as usize % (i + 1));
        }
        let sp = s_sequence(&a.permute_rows(&perm).unwrap(), pr.p(), pr.q()).unwrap().values;
        let s = s_sequence(&a, pr.p(), pr.q()).unwrap().values;
        for (x, y) in s.iter().zip(&sp) {
            prop_assert!(rel(*x, *y) < 1e-12);
        }
    }

    #[test]
    fn step_vector_identity(a in matrix(12, 12), pr in pair()) {
        let s = s_sequence(&a, pr.p(), pr.q()).unwrap().values;
        for r in 1..=a.cols() {
            let v = ratio(&a, &step_vector(r, a.cols()).unwrap(), pr.p(), pr.q()).unwrap().powf(pr.q());
            prop_assert!((v - s[r - 1]).abs() <= 1e-12 * s[r - 1].abs().max(f64::MIN_POSITIVE) || v == s[r - 1]);
        }
    }

    #[test]
    fn samples_never_beat_the_bound(a in matrix(8, 8), pr in pair(), seed in any::<u64>()) {
        let b = compute_bound(&a, pr).unwrap();
        prop_assume!(b.lambda > 0.0);
        for x in sample_monotone(a.cols(), pr.p(), 300, seed) {
            let v = ratio(&a, &x, pr.p(), pr.q()).unwrap();
            match pr.regime() {
                Regime::LowerBound => prop_assert!(v >= b.lambda * (1.0 - 1e-9)),
                Regime::UpperBound => prop_assert!(v <= b.lambda * (1.0 + 1e-9)),
            }
        }
    }

    #[test]
    fn repair_lands_in_the_cone(v in prop::collection::vec(-5.0f64..5.0, 1..30)) {
        let mut x = v;
        repair_monotone(&mut x);
        prop_assert!(x.iter().all(|&e| e >= 0.0));
        prop_assert!(x.windows(2).all(|w| w[1] <= w[0]));
        let again = { let mut y = x.clone(); repair_monotone(&mut y); y };
        prop_assert_eq!(again, x);
    }

    #[test]
    fn local_search_stays_in_the_cone(a in matrix(6, 6), pr in pair(), seed in any::<u64>()) {
        let x0 = sample_monotone(a.cols(), pr.p(), 1, seed).next().unwrap();
        let x = local_search(&a, pr, &x0, 40, seed).unwrap();
        prop_assert!(MonotoneVector::new(x.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn two_sequence_inequality(
        ab in prop::collection::vec((0.01f64..10.0, 0.0f64..10.0), 1..=20),
        lower in any::<bool>(), p0 in 0.0f64..1.0, f in 0.0f64..1.0,
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = ab.into_iter().unzip();
        let (p, q) = if lower { let p = 1.0 + 3.0 * p0; (p, p * (0.05 + 0.95 * f)) } else { let p = 0.1 + 0.9 * p0; (p, p * (1.0 + 3.0 * f)) };
        prop_assert!(two_sequence_check(&a, &b, p, q).unwrap());
    }

    #[test]
    fn streamed_matches_dense(spec in family(), n in 1usize..64, pr in pair()) {
        let dense = compute_bound(&generate(&spec, n).unwrap(), pr).unwrap();
        let streamed = family_bound_streamed(&spec, n, pr).unwrap();
        prop_assert_eq!(dense, streamed);
    }

    #[test]
    fn family_rows_are_stochastic(spec in family(), n in 1usize..128) {
        let a = generate(&spec, n).unwrap();
        prop_assert!(a.as_slice().iter().all(|&v| v >= 0.0 && v.is_finite()));
        if spec.shape() != Shape::Tail {
            for j in 0..n {
                let s: f64 = a.row(j).iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12, "row {} sums to {}", j + 1, s);
            }
        }
    }

    #[test]
    fn beta_symmetry(x in 0.1f64..5.0, y in 0.1f64..5.0) {
        prop_assert!(rel(beta(x, y).unwrap(), beta(y, x).unwrap()) < 1e-12);
        prop_assert!(rel(beta(x, 1.0).unwrap(), 1.0 / x) < 1e-12);
    }

    #[test]
    fn log_mean_increases_in_r(a in 0.1f64..10.0, d in 0.1f64..10.0) {
        let b = a + d;
        let rs = [-3.0, -1.0, -0.5, 0.5, 2.0, 3.0, 10.0, f64::INFINITY];
        let v: Vec<f64> = rs.iter().map(|&r| generalized_log_mean(r, a, b).unwrap()).collect();
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]), "{:?}", v);
    }

    #[test]
    fn float_format_round_trips(v in any::<f64>()) {
        prop_assume!(v.is_finite());
        prop_assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        let s = to_json(&serde_json::json!({"v": v})).unwrap();
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(to_json(&back).unwrap(), s);
    }
}

#[test]
fn alpha_k_entries_are_below_tail_power() {
    for alpha in [1.0, 1.5, 2.0, 3.7] {
        let a = generate(&FamilySpec::TailAlphaK { alpha }, 64).unwrap();
        let b = generate(&FamilySpec::TailPower { alpha, t: 1.0 }, 64).unwrap();
        assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x <= y));
    }
}

#[test]
fn log_mean_tail_at_infinity_uses_plain_powers() {
    let a = generate(&FamilySpec::GeneralizedLogMeanTail { alpha: 2.5, beta: f64::INFINITY }, 32).unwrap();
    let w: Vec<f64> = (1..=32).map(|k| (k as f64).powf(1.5)).collect();
    let mut big = 0.0;
    for j in 1..=32 {
        big += w[j - 1];
        for k in j..=32 {
            let e = w[k - 1] / big;
            assert!((a.get(j, k) - e).abs() <= 4.0 * f64::EPSILON * e);
        }
    }
}

#[test]
fn tail_step_values_increase() {
    let n = 512;
    for (alpha, p) in [(1.0, 0.5), (2.0, 0.4), (3.0, 0.9), (0.5, 1.0), (1.0, 2.0), (2.5, 3.0)] {
        let t = generate(&FamilySpec::TailPower { alpha, t: 1.0 }, n).unwrap();
        let s = s_sequence(&t, p, p).unwrap().values;
        assert!(s.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "({alpha}, {p})");
    }
}

#[test]
fn bennett_increment_condition_holds_where_known() {
    for alpha in [1.0, 1.5, 2.0, 4.0] {
        for p in [1.0, 1.5, 3.0] {
            for n in 1..=500 {
                assert!(increment_condition(alpha, p, n).unwrap() >= -1e-12, "({alpha}, {p}, {n})");
            }
        }
    }
}

#[test]
fn verdicts_match_pairwise_differences() {
    let r = monotonicity_verdict(&[1.0, 1.0 + 1e-13, 0.5], 1e-12);
    assert_eq!(r.verdict, Trend::Decreasing);
    let r = monotonicity_verdict(&[0.0, 1.0, 1.0, 2.0, 1.5], 1e-12);
    assert_eq!((r.verdict, r.first_violation_index), (Trend::Neither, Some(4)));
}
