//! Slowly convergent series: Euler–Maclaurin for `Σ n^{-s}`, and enclosed
//! tails for series whose terms are convex and decay like a power.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::SpecialValue;
use crate::sum::Neumaier;

/// `B_2, B_4, ..., B_14`.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

const EM_CUTOFF: usize = 20;

/// `Σ_{n >= k} n^{-s}` for `s > 1`, `k >= 1`.
///
/// Direct summation below `M = max(k, 20)`, then Euler–Maclaurin at `M` with
/// Bernoulli corrections through `B_12`; the error estimate is the first
/// omitted (`B_14`) term plus rounding.
pub fn hurwitz_tail(s: f64, k: usize) -> Result<SpecialValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain("hurwitz_tail", format!("s = {s} must be finite and exceed 1")));
    }
    if k == 0 {
        return Err(Error::domain("hurwitz_tail", "summation must start at n >= 1"));
    }
    let m = k.max(EM_CUTOFF);
    let mut acc = Neumaier::new();
    for n in k..m {
        acc.add((n as f64).powf(-s));
    }
    let mf = m as f64;
    let m_pow = mf.powf(-s);
    acc.add(mf * m_pow / (s - 1.0));
    acc.add(0.5 * m_pow);

    // T_j = B_{2j}/(2j)! · s(s+1)...(s+2j-2) · M^{-s-2j+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut power = m_pow / mf;
    let mut omitted = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let t = b / fact * poch * power;
        if j + 1 == BERNOULLI.len() {
            omitted = t.abs();
        } else {
            acc.add(t);
        }
        let i = 2.0 * (j as f64 + 1.0);
        poch *= (s + i - 1.0) * (s + i);
        fact *= (i + 1.0) * (i + 2.0);
        power /= mf * mf;
    }
    let value = acc.value();
    Ok(SpecialValue {
        value,
        est_abs_error: omitted + 4.0 * f64::EPSILON * value,
    })
}

const GL_ORDER: usize = 20;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
#[allow(clippy::needless_range_loop)]
fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static RULE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = [(0.0, 0.0); GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// `∫_lo^hi f` by the fixed Gauss–Legendre rule.
pub(crate) fn gauss_legendre_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = Neumaier::new();
    for &(x, w) in gauss_legendre() {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

const GEOMETRIC_LEVELS: i32 = 48;

/// `∫_{x0}^∞ x^{-a} h(1/x) dx` for `a > 1` and `h` bounded near 0.
///
/// The substitution `x = x0 v^{-1/(a-1)}` maps the integral onto
/// `(1/(a-1)) x0^{1-a} ∫_0^1 h(v^{1/(a-1)} / x0) dv`, integrated on a mesh
/// refined geometrically toward `v = 0`.
pub(crate) fn power_tail_integral(x0: f64, a: f64, h: &impl Fn(f64) -> f64) -> f64 {
    let c = 1.0 / (a - 1.0);
    let f = |v: f64| h(v.powf(c) / x0);
    let mut acc = Neumaier::new();
    let mut hi = 1.0;
    for _ in 0..GEOMETRIC_LEVELS {
        let lo = 0.5 * hi;
        acc.add(gauss_legendre_integral(f, lo, hi));
        hi = lo;
    }
    acc.add(gauss_legendre_integral(f, 0.0, hi));
    c * x0.powf(1.0 - a) * acc.value()
}

/// Terms of a series `Σ_{j >= start} g(j)` whose summand, beyond some
/// index, is convex, decreasing and of the form `g(x) = x^{-a} h(1/x)`.
pub(crate) trait ConvexTerms {
    /// `g(j)`; called for consecutive `j` starting at `start`.
    fn term(&mut self, j: usize) -> f64;
    /// `h(u)` for `u <= 1/K`, where `K` is the last index passed to `term`.
    fn h(&self, u: f64) -> f64;
}

/// Sums explicitly up to some `K`, then encloses `Σ_{j>K} g(j)` between
/// `∫_K^∞ g - g(K)/2` and `∫_{K+1/2}^∞ g` (valid for convex `g`). `K` grows
/// until the enclosure half-width is at most `rel_tol` times the total or
/// `K` reaches `max_k`. The midpoint is returned with half-width as error.
pub(crate) fn convex_series<T: ConvexTerms>(
    terms: &mut T,
    start: usize,
    a: f64,
    rel_tol: f64,
    max_k: usize,
) -> Result<SpecialValue> {
    if !(a > 1.0) {
        return Err(Error::DivergentSeries(format!(
            "terms decay like j^-{a}, exponent must exceed 1"
        )));
    }
    let mut acc = Neumaier::new();
    let mut k = start.max(32);
    for j in start..=k {
        acc.add(terms.term(j));
    }
    loop {
        let kf = k as f64;
        let h = |u: f64| terms.h(u);
        let g_k = kf.powf(-a) * h(1.0 / kf);
        let lo = power_tail_integral(kf, a, &h) - 0.5 * g_k;
        let hi = power_tail_integral(kf + 0.5, a, &h);
        let mut total = acc;
        total.add(0.5 * (lo + hi));
        let value = total.value();
        let half_width = 0.5 * (hi - lo).abs();
        if half_width <= rel_tol * value.abs() || k >= max_k {
            return Ok(SpecialValue {
                value,
                est_abs_error: half_width + 4.0 * f64::EPSILON * value.abs(),
            });
        }
        let next = (4 * k).min(max_k);
        for j in k + 1..=next {
            acc.add(terms.term(j));
        }
        k = next;
    }
}

/// Smooth interpolant of `Λ(n) = Σ_{i<=n} i^α` (`α > -1`) from
/// Euler–Maclaurin, with the constant fitted to an exact value `Λ_K`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerSumFit {
    alpha: f64,
    c: f64,
}

impl PowerSumFit {
    fn body(alpha: f64, x: f64) -> f64 {
        let a = alpha;
        x.powf(a + 1.0) / (a + 1.0) + 0.5 * x.powf(a) + a / 12.0 * x.powf(a - 1.0)
            - a * (a - 1.0) * (a - 2.0) / 720.0 * x.powf(a - 3.0)
            + a * (a - 1.0) * (a - 2.0) * (a - 3.0) * (a - 4.0) / 30240.0 * x.powf(a - 5.0)
    }

    pub(crate) fn fit(alpha: f64, k: usize, lambda_k: f64) -> Self {
        PowerSumFit {
            alpha,
            c: lambda_k - Self::body(alpha, k as f64),
        }
    }

    /// `Λ(x) / x^{1+α}` at `u = 1/x`.
    pub(crate) fn scaled(&self, u: f64) -> f64 {
        let a = self.alpha;
        let u2 = u * u;
        let u4 = u2 * u2;
        1.0 / (a + 1.0) + 0.5 * u + a / 12.0 * u2 - a * (a - 1.0) * (a - 2.0) / 720.0 * u4
            + a * (a - 1.0) * (a - 2.0) * (a - 3.0) * (a - 4.0) / 30240.0 * u4 * u2
            + self.c * u.powf(a + 1.0)
    }
}

/// Terms `j^m Λ_j^{-q}` with `Λ_j = Σ_{i<=j} i^α` continued from a supplied
/// starting value.
struct PowerSumNegative {
    alpha: f64,
    q: f64,
    m: f64,
    running: Neumaier,
    last: usize,
}

impl ConvexTerms for PowerSumNegative {
    fn term(&mut self, j: usize) -> f64 {
        let jf = j as f64;
        self.running.add(jf.powf(self.alpha));
        self.last = j;
        let t = self.running.value().powf(-self.q);
        if self.m == 0.0 {
            t
        } else {
            t * jf.powf(self.m)
        }
    }

    fn h(&self, u: f64) -> f64 {
        PowerSumFit::fit(self.alpha, self.last, self.running.value())
            .scaled(u)
            .powf(-self.q)
    }
}

/// Tail `Σ_{j>n} (Σ_{i<=j} i^α)^{-q}` given `Λ_n` (use `n = 0`, `Λ_0 = 0`
/// for the full series).
pub fn power_sum_negative_tail(alpha: f64, q: f64, n: usize, lambda_n: f64) -> Result<SpecialValue> {
    if !(alpha > -1.0) || !(q > 0.0) || !((1.0 + alpha) * q > 1.0) {
        return Err(Error::DivergentSeries(format!(
            "Σ (Σ i^α)^(-q) diverges unless α > -1 and (1+α)q > 1 (α = {alpha}, q = {q})"
        )));
    }
    let mut running = Neumaier::new();
    running.add(lambda_n);
    let mut terms = PowerSumNegative {
        alpha,
        q,
        m: 0.0,
        running,
        last: n,
    };
    convex_series(&mut terms, n + 1, (1.0 + alpha) * q, 1e-13, 1 << 24)
}

/// `Σ_{j>=1} j^m (Σ_{i<=j} i^α)^{-q}`.
pub fn power_sum_weighted_series(alpha: f64, q: f64, m: f64) -> Result<SpecialValue> {
    let a = (1.0 + alpha) * q - m;
    if !(alpha > -1.0) || !(q > 0.0) || !(a > 1.0) {
        return Err(Error::DivergentSeries(format!(
            "Σ j^m (Σ i^α)^(-q) diverges (α = {alpha}, q = {q}, m = {m})"
        )));
    }
    let mut terms = PowerSumNegative {
        alpha,
        q,
        m,
        running: Neumaier::new(),
        last: 0,
    };
    convex_series(&mut terms, 1, a, 1e-13, 1 << 24)
}

/// Adapter for series given by closures.
pub(crate) struct FnTerms<G, H> {
    pub g: G,
    pub h: H,
}

impl<G: FnMut(usize) -> f64, H: Fn(f64) -> f64> ConvexTerms for FnTerms<G, H> {
    fn term(&mut self, j: usize) -> f64 {
        (self.g)(j)
    }

    fn h(&self, u: f64) -> f64 {
        (self.h)(u)
    }
}
