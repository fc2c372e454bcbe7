use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// Slack for numerical convexity; absorbs rounding in the stencil.
pub const CONVEXITY_TOL: f64 = 1e-9;

fn check_ap(func: &'static str, alpha: f64, p: f64) -> Result<()> {
    if alpha > 0.0 && p > 0.0 && alpha.is_finite() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("need alpha > 0 and p > 0 (alpha = {alpha}, p = {p})")))
    }
}

/// `(x^{-α} - 1)^p`, the one-sided half of `f_{α,p}`.
#[inline]
fn half(alpha: f64, p: f64, ln_x: f64) -> f64 {
    (-alpha * ln_x).exp_m1().powf(p)
}

/// `f(x) = ((1-x^α)/x^α)^p + ((1-(1-x)^α)/(1-x)^α)^p` on `(0, 1)`.
pub fn f_alpha_p(alpha: f64, p: f64, x: f64) -> Result<f64> {
    check_ap("f_alpha_p", alpha, p)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("f_alpha_p", format!("x = {x} is outside (0, 1)")));
    }
    Ok(half(alpha, p, x.ln()) + half(alpha, p, (-x).ln_1p()))
}

/// Minimum central second difference of `f_{α,p}` at the interior nodes of
/// `x_i = i/(grid_size+1)`, `i = 1..=grid_size`.
pub fn second_difference_min(alpha: f64, p: f64, grid_size: usize) -> Result<f64> {
    check_ap("second_difference_min", alpha, p)?;
    if grid_size < 3 {
        return Err(Error::Size(format!("grid_size must be at least 3, got {grid_size}")));
    }
    let m = (grid_size + 1) as f64;
    let h = 1.0 / m;
    let f: Vec<f64> = (1..=grid_size)
        .map(|i| {
            let i = i as f64;
            // ln(i/m) and ln((m-i)/m) without forming x.
            half(alpha, p, (i / m).ln()) + half(alpha, p, ((m - i) / m).ln())
        })
        .collect();
    Ok(f.windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) / (h * h))
        .fold(f64::INFINITY, f64::min))
}

/// `A_n(f_{α,p}) = (1/n) Σ_{r≤n} f_{α,p}(r/(n+1))`.
///
/// Equals `2 s_n` where `s_n` is the step value at `r = n` of the tail-power
/// family with `t = 1` and `p = q`: the two halves of `f` contribute the same
/// sum after `r -> n+1-r`.
pub fn bennett_jameson_mean(alpha: f64, p: f64, n: usize) -> Result<f64> {
    check_ap("bennett_jameson_mean", alpha, p)?;
    if n == 0 {
        return Err(Error::Size("n must be at least 1".into()));
    }
    let m = (n + 1) as f64;
    // ((n+1)/r)^α - 1 with ln((n+1)/r) = ln1p((n+1-r)/r) for accuracy near r = n.
    let g = |r: f64| (alpha * ((m - r) / r).ln_1p()).exp_m1().powf(p);
    let mut acc = Neumaier::new();
    for r in 1..=n {
        let r = r as f64;
        acc.add(g(r));
        acc.add(g(m - r));
    }
    Ok(acc.value() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::s_sequence;
    use crate::families::{generate, FamilySpec};

    #[test]
    fn f_examples() {
        assert!((f_alpha_p(1.0, 1.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        let v = f_alpha_p(2.0, 0.4, 0.25).unwrap();
        let expect = 15f64.powf(0.4) + (7.0f64 / 9.0).powf(0.4);
        assert!((v - expect).abs() < 1e-13);
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let (a, b) = (f_alpha_p(1.7, 0.6, x).unwrap(), f_alpha_p(1.7, 0.6, 1.0 - x).unwrap());
            assert!((a - b).abs() < 1e-12 * a);
        }
        assert!(f_alpha_p(1.0, 1.0, 0.0).is_err());
        assert!(f_alpha_p(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn convexity_examples() {
        assert!(second_difference_min(1.0, 1.0, 1000).unwrap() >= 0.0);
        assert!(second_difference_min(2.0, 0.4, 1000).unwrap() >= -CONVEXITY_TOL);
        assert!(second_difference_min(3.0, 2.0, 1000).unwrap() >= -CONVEXITY_TOL);
        assert!(second_difference_min(1.0, 1.0, 2).is_err());
    }

    #[test]
    fn mean_matches_twice_the_step_value() {
        for (alpha, p, n) in [(1.0, 1.0, 1), (2.0, 0.4, 5), (1.0, 0.5, 10), (1.5, 2.0, 40)] {
            let a = bennett_jameson_mean(alpha, p, n).unwrap();
            let t = generate(&FamilySpec::TailPower { alpha, t: 1.0 }, n).unwrap();
            let s = s_sequence(&t, p, p).unwrap().values[n - 1];
            assert!((a - 2.0 * s).abs() <= 1e-12 * a, "({alpha}, {p}, {n}): {a} vs 2 * {s}");
        }
        assert_eq!(bennett_jameson_mean(1.0, 1.0, 1).unwrap(), 2.0);
    }

    #[test]
    fn mean_increases_for_convex_f() {
        for (alpha, p) in [(1.0, 0.5), (2.0, 0.4), (3.0, 2.0)] {
            let a: Vec<f64> = (1..60).map(|n| bennett_jameson_mean(alpha, p, n).unwrap()).collect();
            assert!(a.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0]));
        }
    }
}
