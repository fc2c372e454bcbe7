use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::power_partial_sums;
use crate::error::{Error, Result};
use crate::specfun::log_mean_ext;

/// A grid point fails when `(lhs - rhs) / max(1, |lhs|, |rhs|)` falls below
/// `-PROBE_TOL` (for a `>=` claim; `<=` claims are flipped first).
pub const PROBE_TOL: f64 = 1e-10;
const MAX_STORED: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Holds,
    Reversed,
}

/// Closed parameter ranges; `beta` only for the log-mean probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamBox {
    pub alpha: (f64, f64),
    pub beta: Option<(f64, f64)>,
}

impl ParamBox {
    pub fn alpha(lo: f64, hi: f64) -> Self {
        ParamBox { alpha: (lo, hi), beta: None }
    }

    fn within(&self, outer: &ParamBox) -> bool {
        let inside = |a: (f64, f64), b: (f64, f64)| a.0 <= a.1 && a.0 >= b.0 && a.1 <= b.1;
        inside(self.alpha, outer.alpha)
            && match (self.beta, outer.beta) {
                (None, None) => true,
                (Some(b), Some(o)) => inside(b, o),
                (None, Some(_)) => true,
                (Some(_), None) => false,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeParams {
    pub direction: Direction,
    pub alpha_points: usize,
    pub beta_points: usize,
    pub x_points: usize,
    pub n_max: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            direction: Direction::Holds,
            alpha_points: 1000,
            beta_points: 50,
            x_points: 1000,
            n_max: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeViolation {
    pub params: BTreeMap<&'static str, f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub inequality_id: String,
    pub direction: Direction,
    pub grid: String,
    pub evaluated: usize,
    pub violation_count: usize,
    /// The first violations in grid order, at most 100.
    pub violations: Vec<ProbeViolation>,
    /// Smallest normalized `lhs - rhs` seen, oriented so `>= 0` is success.
    pub min_margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Ge,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Vars {
    /// Integer pairs `k >= n`.
    NK,
    N,
    X,
    /// Integers `n` with a second real parameter `beta >= alpha`.
    NBeta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityInfo {
    pub id: &'static str,
    pub statement: &'static str,
    pub holds: Vec<ParamBox>,
    pub reversed: Vec<ParamBox>,
    #[serde(skip)]
    rel: Rel,
    #[serde(skip)]
    vars: Vars,
}

const ALPHA_CAP: f64 = 8.0;
const BETA_CAP: f64 = 40.0;

/// The registry of probed inequalities.
pub fn inequality_ids() -> Vec<InequalityInfo> {
    let a = ParamBox::alpha;
    let low_high = vec![a(0.0, 1.0), a(3.0, ALPHA_CAP)];
    vec![
        InequalityInfo {
            id: "L4_4.22",
            statement: "Λ_n/Λ_k <= (n(n+1)/(k(k+1)))^((α+1)/2) for k >= n >= 1, Λ_n = Σ_{i≤n} i^α",
            holds: low_high.clone(),
            reversed: vec![a(1.0, 3.0)],
            rel: Rel::Le,
            vars: Vars::NK,
        },
        InequalityInfo {
            id: "L4_4.25",
            statement: "Λ_n <= (n(n+1))^((α+1)/2)/(α+1)",
            holds: low_high,
            reversed: vec![a(1.0, 3.0)],
            rel: Rel::Le,
            vars: Vars::N,
        },
        InequalityInfo {
            id: "L5_5.15",
            statement: "Λ_n >= 4n²(n+1)^α/((1+α)(4n+1+α))",
            holds: vec![a(1.0, 3.0)],
            reversed: vec![a(3.0, ALPHA_CAP)],
            rel: Rel::Ge,
            vars: Vars::N,
        },
        InequalityInfo {
            id: "L6_5.14",
            statement: "((1+x)^(2-α)(1+2x)^((α-1)/2) - 1)((1+2x)^((1+α)/2) - 1) >= (1+α)x² for 0 <= x <= 1",
            holds: vec![a(1.0, 3.0)],
            reversed: vec![a(3.0, ALPHA_CAP)],
            rel: Rel::Ge,
            vars: Vars::X,
        },
        InequalityInfo {
            id: "L7_5.18",
            statement: "n(n+1)^(2α)/Λ_n² - (n+1)(n+2)^(2α)/Λ_{n+1}² >= 0.94(1+α)/(n+1)²",
            holds: vec![a(0.14, 1.0)],
            reversed: vec![],
            rel: Rel::Ge,
            vars: Vars::N,
        },
        InequalityInfo {
            id: "L8_5.16",
            statement: "2n(n+1)^α/Λ_n + 0.94(1+α)/(n+1)² >= 2(n+1)(n+2)^α/Λ_{n+1}",
            holds: vec![a(0.14, 1.0)],
            reversed: vec![],
            rel: Rel::Ge,
            vars: Vars::N,
        },
        InequalityInfo {
            id: "L10",
            statement: "(n+1)^α + n^c(n+1)^α/((n+2)^c - n^c) >= (n+1)^c(n+2)^α/((n+3+1/n²)^c - (n+1)^c), c = (1+α)/2",
            holds: vec![a(0.0, 1.0)],
            reversed: vec![],
            rel: Rel::Ge,
            vars: Vars::N,
        },
        InequalityInfo {
            id: "E4.2",
            statement: "W_{n+1}/W_n >= ((n+2)/(n+1))^α, W_n = Σ_{i≤n} L_β(i, i-1)^(α-1), β >= α >= 2",
            holds: vec![ParamBox {
                alpha: (2.0, ALPHA_CAP),
                beta: Some((2.0, BETA_CAP)),
            }],
            reversed: vec![],
            rel: Rel::Ge,
            vars: Vars::NBeta,
        },
    ]
}

fn lookup(id: &str) -> Result<InequalityInfo> {
    inequality_ids()
        .into_iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::UnknownInequality(id.to_string()))
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 || lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect()
}

/// `b^c - a^c` for `b > a > 0` without cancellation.
fn pow_gap(a: f64, b: f64, c: f64) -> f64 {
    a.powf(c) * (c * ((b - a) / a).ln_1p()).exp_m1()
}

/// Collects the sign-checked outcomes of one slice of the grid.
#[derive(Default)]
struct Tally {
    evaluated: usize,
    count: usize,
    min_margin: f64,
    stored: Vec<ProbeViolation>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            min_margin: f64::INFINITY,
            ..Default::default()
        }
    }

    /// `lhs >= rhs` is success.
    fn check(&mut self, lhs: f64, rhs: f64, params: impl FnOnce() -> BTreeMap<&'static str, f64>) {
        self.evaluated += 1;
        let margin = (lhs - rhs) / 1f64.max(lhs.abs()).max(rhs.abs());
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.min_margin = self.min_margin.min(margin);
        if margin < -PROBE_TOL {
            self.count += 1;
            if self.stored.len() < MAX_STORED {
                self.stored.push(ProbeViolation { params: params(), lhs, rhs });
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.evaluated += other.evaluated;
        self.count += other.count;
        self.min_margin = self.min_margin.min(other.min_margin);
        let room = MAX_STORED - self.stored.len();
        self.stored.extend(other.stored.into_iter().take(room));
        self
    }
}

fn pmap<const K: usize>(pairs: [(&'static str, f64); K]) -> BTreeMap<&'static str, f64> {
    pairs.into_iter().collect()
}

/// Evaluates one value of `alpha` (and `beta`). `sign` is +1 when the claim
/// reads `lhs >= rhs` in the requested direction, -1 when it reads `<=`.
fn eval_point(info: &InequalityInfo, alpha: f64, beta: f64, sign: f64, params: &ProbeParams) -> Tally {
    let mut t = Tally::new();
    let n_max = params.n_max;
    let mut check = |lhs: f64, rhs: f64, pm: &dyn Fn() -> BTreeMap<&'static str, f64>| {
        if sign > 0.0 {
            t.check(lhs, rhs, pm)
        } else {
            t.check(rhs, lhs, pm)
        }
    };
    let c = (1.0 + alpha) / 2.0;
    match info.id {
        "L4_4.22" => {
            let big = power_partial_sums(alpha, n_max);
            let tt: Vec<f64> = (1..=n_max)
                .map(|n| {
                    let n = n as f64;
                    (n * (n + 1.0)).powf(c)
                })
                .collect();
            for n in 1..=n_max {
                for k in n..=n_max {
                    let lhs = big[n - 1] / big[k - 1];
                    let rhs = tt[n - 1] / tt[k - 1];
                    check(lhs, rhs, &|| pmap([("alpha", alpha), ("n", n as f64), ("k", k as f64)]));
                }
            }
        }
        "L4_4.25" | "L5_5.15" | "L7_5.18" | "L8_5.16" => {
            let big = power_partial_sums(alpha, n_max + 1);
            for n in 1..=n_max {
                let nf = n as f64;
                let (lhs, rhs) = match info.id {
                    "L4_4.25" => (big[n - 1], (nf * (nf + 1.0)).powf(c) / (1.0 + alpha)),
                    "L5_5.15" => (
                        big[n - 1],
                        4.0 * nf * nf * (nf + 1.0).powf(alpha) / ((1.0 + alpha) * (4.0 * nf + 1.0 + alpha)),
                    ),
                    "L7_5.18" => {
                        let (l0, l1) = (big[n - 1], big[n]);
                        (
                            nf * (nf + 1.0).powf(2.0 * alpha) / (l0 * l0)
                                - (nf + 1.0) * (nf + 2.0).powf(2.0 * alpha) / (l1 * l1),
                            0.94 * (1.0 + alpha) / ((nf + 1.0) * (nf + 1.0)),
                        )
                    }
                    _ => (
                        2.0 * nf * (nf + 1.0).powf(alpha) / big[n - 1] + 0.94 * (1.0 + alpha) / ((nf + 1.0) * (nf + 1.0)),
                        2.0 * (nf + 1.0) * (nf + 2.0).powf(alpha) / big[n],
                    ),
                };
                check(lhs, rhs, &|| pmap([("alpha", alpha), ("n", nf)]));
            }
        }
        "L10" => {
            for n in 1..=n_max {
                let nf = n as f64;
                let lhs = (nf + 1.0).powf(alpha) * (1.0 + nf.powf(c) / pow_gap(nf, nf + 2.0, c));
                let rhs =
                    (nf + 1.0).powf(c) * (nf + 2.0).powf(alpha) / pow_gap(nf + 1.0, nf + 3.0 + 1.0 / (nf * nf), c);
                check(lhs, rhs, &|| pmap([("alpha", alpha), ("n", nf)]));
            }
        }
        "L6_5.14" => {
            for x in linspace(0.0, 1.0, params.x_points) {
                let lhs = ((1.0 + x).powf(2.0 - alpha) * (1.0 + 2.0 * x).powf((alpha - 1.0) / 2.0) - 1.0)
                    * ((1.0 + 2.0 * x).powf(c) - 1.0);
                let rhs = (1.0 + alpha) * x * x;
                check(lhs, rhs, &|| pmap([("alpha", alpha), ("x", x)]));
            }
        }
        "E4.2" => {
            let w: Vec<f64> = (1..=n_max + 1)
                .map(|i| log_mean_ext(beta, i as f64, i as f64 - 1.0).powf(alpha - 1.0))
                .collect();
            let big = crate::sum::prefix_sums(&w);
            for n in 1..=n_max {
                let nf = n as f64;
                let lhs = big[n] / big[n - 1];
                let rhs = ((nf + 2.0) / (nf + 1.0)).powf(alpha);
                check(lhs, rhs, &|| pmap([("alpha", alpha), ("beta", beta), ("n", nf)]));
            }
        }
        _ => unreachable!("registry ids are exhaustive"),
    }
    t
}

/// Evaluates inequality `id` over `grid` at the resolution in `params`.
/// The box must sit inside one of the ranges where the claim (or its
/// reverse, per `params.direction`) is published.
pub fn probe(id: &str, params: &ProbeParams, grid: &ParamBox) -> Result<ProbeReport> {
    let info = lookup(id)?;
    let boxes = match params.direction {
        Direction::Holds => &info.holds,
        Direction::Reversed => &info.reversed,
    };
    if boxes.is_empty() {
        return Err(Error::InvalidParameter(format!("{id} has no reversed form")));
    }
    if !boxes.iter().any(|b| grid.within(b)) {
        return Err(Error::InvalidParameter(format!(
            "box {} lies outside the published ranges of {id} ({:?})",
            describe_box(grid),
            params.direction
        )));
    }
    if params.n_max == 0 || params.alpha_points == 0 || params.x_points == 0 || params.beta_points == 0 {
        return Err(Error::InvalidParameter("grid sizes must be positive".into()));
    }
    let sign = match (info.rel, params.direction) {
        (Rel::Ge, Direction::Holds) | (Rel::Le, Direction::Reversed) => 1.0,
        _ => -1.0,
    };
    let alphas = linspace(grid.alpha.0, grid.alpha.1, params.alpha_points);
    let points: Vec<(f64, f64)> = match (info.vars, grid.beta) {
        (Vars::NBeta, beta) => {
            let (lo, hi) = beta.unwrap_or(info.holds[0].beta.expect("log-mean box has beta"));
            let betas = linspace(lo, hi, params.beta_points);
            alphas
                .iter()
                .flat_map(|&a| betas.iter().filter(move |&&b| b >= a).map(move |&b| (a, b)))
                .collect()
        }
        _ => alphas.iter().map(|&a| (a, f64::NAN)).collect(),
    };
    let tally = points
        .par_iter()
        .map(|&(a, b)| eval_point(&info, a, b, sign, params))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(), Tally::merge);
    Ok(ProbeReport {
        inequality_id: info.id.to_string(),
        direction: params.direction,
        grid: describe_grid(&info, grid, params),
        evaluated: tally.evaluated,
        violation_count: tally.count,
        passed: tally.count == 0,
        violations: tally.stored,
        min_margin: tally.min_margin,
    })
}

/// Runs `probe` on every published box for `params.direction`.
pub fn probe_declared(id: &str, params: &ProbeParams) -> Result<Vec<ProbeReport>> {
    let info = lookup(id)?;
    let boxes = match params.direction {
        Direction::Holds => info.holds,
        Direction::Reversed => info.reversed,
    };
    boxes.iter().map(|b| probe(id, params, b)).collect()
}

fn describe_box(b: &ParamBox) -> String {
    let mut s = format!("alpha in [{}, {}]", b.alpha.0, b.alpha.1);
    if let Some((lo, hi)) = b.beta {
        s.push_str(&format!(", beta in [{lo}, {hi}]"));
    }
    s
}

fn describe_grid(info: &InequalityInfo, b: &ParamBox, params: &ProbeParams) -> String {
    let mut s = format!("alpha in [{}, {}] ({} pts)", b.alpha.0, b.alpha.1, params.alpha_points);
    match info.vars {
        Vars::NK => s.push_str(&format!(", 1 <= n <= k <= {}", params.n_max)),
        Vars::N => s.push_str(&format!(", 1 <= n <= {}", params.n_max)),
        Vars::X => s.push_str(&format!(", x in [0, 1] ({} pts)", params.x_points)),
        Vars::NBeta => {
            let (lo, hi) = b.beta.or(info.holds[0].beta).expect("beta range");
            s.push_str(&format!(
                ", beta in [{lo}, {hi}] ({} pts, beta >= alpha), 1 <= n <= {}",
                params.beta_points, params.n_max
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ProbeParams {
        ProbeParams {
            alpha_points: 21,
            beta_points: 5,
            x_points: 101,
            n_max: 60,
            ..Default::default()
        }
    }

    #[test]
    fn equality_cases_pass_both_ways() {
        let at_one = ParamBox::alpha(1.0, 1.0);
        let r = probe("L4_4.22", &small(), &at_one).unwrap();
        assert!(r.passed && r.min_margin.abs() < 1e-14, "{r:?}");
        let rev = ProbeParams { direction: Direction::Reversed, ..small() };
        assert!(probe("L4_4.22", &rev, &at_one).unwrap().passed);
        let r = probe("L4_4.25", &ProbeParams { n_max: 5, ..small() }, &at_one).unwrap();
        assert!(r.passed && r.min_margin.abs() < 1e-14);
    }

    #[test]
    fn every_declared_box_passes() {
        for info in inequality_ids() {
            for direction in [Direction::Holds, Direction::Reversed] {
                let params = ProbeParams { direction, ..small() };
                for r in probe_declared(info.id, &params).unwrap_or_default() {
                    assert!(r.passed, "{} {:?}: {:?}", info.id, direction, r.violations.first());
                    assert!(r.evaluated > 0);
                }
            }
        }
    }

    #[test]
    fn wrong_direction_is_caught() {
        // The middle range reverses the low/high claim.
        let p = ProbeParams { direction: Direction::Reversed, ..small() };
        let r = probe("L4_4.25", &p, &ParamBox::alpha(1.0, 3.0)).unwrap();
        assert!(r.passed);
        // Sign +1 reads `Λ_n >= rhs` (reversed), -1 the claim for low/high α.
        let info = lookup("L4_4.25").unwrap();
        assert_eq!(eval_point(&info, 2.0, f64::NAN, 1.0, &small()).count, 0);
        assert!(eval_point(&info, 2.0, f64::NAN, -1.0, &small()).count > 0);
    }

    #[test]
    fn l7_at_its_lower_edge() {
        let p = ProbeParams { n_max: 200, ..small() };
        assert!(probe("L7_5.18", &p, &ParamBox::alpha(0.14, 0.14)).unwrap().passed);
    }

    #[test]
    fn rejects_unknown_ids_and_foreign_boxes() {
        assert!(matches!(probe("L99", &small(), &ParamBox::alpha(0.0, 1.0)), Err(Error::UnknownInequality(_))));
        assert!(probe("L7_5.18", &small(), &ParamBox::alpha(0.0, 1.0)).is_err());
        let rev = ProbeParams { direction: Direction::Reversed, ..small() };
        assert!(probe("L10", &rev, &ParamBox::alpha(0.0, 1.0)).is_err());
    }
}
