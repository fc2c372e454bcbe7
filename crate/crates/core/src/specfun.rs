//! Special functions for the closed-form constants: log-gamma, beta,
//! Riemann zeta, `πp / sin(πp)` and the generalized logarithmic mean.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::hurwitz_tail;

/// A value together with the error bound its algorithm can justify.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialValue {
    pub value: f64,
    pub est_abs_error: f64,
}

const LANCZOS_G: f64 = 7.0;
// Published coefficients, kept digit for digit.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} is not a positive finite number")));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx); sin(πx) > 0 on (0, 1/2).
        return (PI / (PI * x).sin()).ln() - log_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `B(x, y) = Γ(x)Γ(y)/Γ(x+y)`.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("beta", format!("arguments ({x}, {y}) must be positive")));
    }
    Ok((log_gamma_unchecked(x) + log_gamma_unchecked(y) - log_gamma_unchecked(x + y)).exp())
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    zeta_with_error(s).map(|v| v.value)
}

/// Riemann zeta with the Euler–Maclaurin remainder estimate attached.
pub fn zeta_with_error(s: f64) -> Result<SpecialValue> {
    if !(s > 1.0) || s.is_nan() {
        return Err(Error::domain("zeta", format!("s = {s} must exceed 1")));
    }
    if s.is_infinite() {
        return Ok(SpecialValue { value: 1.0, est_abs_error: 0.0 });
    }
    hurwitz_tail(s, 1)
}

/// `πp / sin(πp)` for `0 < p < 1`.
pub fn sin_constant(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("sin_constant", format!("p = {p} is outside (0, 1)")));
    }
    let s = if p > 0.5 { (PI * (1.0 - p)).sin() } else { (PI * p).sin() };
    Ok(PI * p / s)
}

/// Generalized logarithmic mean `L_r(a, b) = ((a^r - b^r) / (r (a - b)))^(1/(r-1))`.
///
/// `r = +∞` gives `max(a, b)`.
pub fn generalized_log_mean(r: f64, a: f64, b: f64) -> Result<f64> {
    const F: &str = "generalized_log_mean";
    if !(a > 0.0) || !a.is_finite() || !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(F, format!("a = {a}, b = {b} must be positive and finite")));
    }
    if a == b {
        return Err(Error::domain(F, "a and b must differ"));
    }
    if r.is_nan() || r == 0.0 || r == 1.0 || r == f64::NEG_INFINITY {
        return Err(Error::domain(F, format!("r = {r} is not allowed")));
    }
    Ok(log_mean_ext(r, a, b))
}

/// Same as [`generalized_log_mean`] but also accepts `b = 0` when `r > 0`,
/// where the mean is `a · r^(-1/(r-1))`. No argument checks.
pub(crate) fn log_mean_ext(r: f64, a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if r == f64::INFINITY {
        return hi;
    }
    // a^r - b^r = -a^r expm1(r ln(b/a)), evaluated without cancellation.
    let num = -(r * (lo / hi).ln()).exp_m1();
    let ln_ratio = r * hi.ln() + (num / r).ln() - (hi - lo).ln();
    (ln_ratio / (r - 1.0)).exp()
}
