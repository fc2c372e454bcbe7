//! Reference computations written independently of the library.
#![allow(dead_code)]

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `B(x, y)` for `0 < x <= 1`, `y > 0` by quadrature. `t = u^{1/x}` removes
/// the singularity at 0 and `u = 1 - v^5` smooths the endpoint at 1.
pub fn beta_quadrature(x: f64, y: f64) -> f64 {
    // B = (1/x) ∫_0^1 (1 - u^{1/x})^{y-1} du, then u = 1 - v^5.
    let inv = 1.0 / x;
    let g = move |v: f64| {
        if v == 0.0 {
            return 0.0;
        }
        let v5 = v.powi(5);
        // 1 - (1 - v^5)^{1/x}
        let one_minus = -(inv * (-v5).ln_1p()).exp_m1();
        inv * one_minus.powf(y - 1.0) * 5.0 * v.powi(4)
    };
    simpson(&g, 0.0, 1.0, 1e-13)
}

/// `ζ(s)` for `s > 1`: `10^7` direct terms summed smallest first, plus the
/// Euler–Maclaurin tail through the first derivative term.
pub fn zeta_brute(s: f64) -> f64 {
    let k_max = 10_000_000u64;
    let mut acc = 0.0;
    for k in (1..=k_max).rev() {
        acc += (k as f64).powf(-s);
    }
    let k = k_max as f64;
    acc + k.powf(1.0 - s) / (s - 1.0) - 0.5 * k.powf(-s) + s / 12.0 * k.powf(-s - 1.0)
}

/// Literal values produced with 50-digit arbitrary-precision arithmetic.
pub const ZETA_1_05: f64 = 20.58084430203698;
pub const HALF_BETA_0_1_1_4: f64 = 4.762319286481484;

/// Uniform `[0, 1)` matrices from a small deterministic generator.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize
    }
}
