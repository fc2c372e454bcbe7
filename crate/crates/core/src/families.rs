//! Parametric matrix families: generators, weight sequences, certified
//! parameter ranges and closed-form (or series) asymptotic constants.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{self, hurwitz_tail, FnTerms};
use crate::specfun::{beta, log_mean_ext, zeta_with_error, SpecialValue};
use crate::types::{NonNegativeMatrix, Regime, RowSource};

/// A matrix family together with its parameters.
///
/// Tail kinds are supported on `k >= j`, weighted means and Nörlund kinds
/// on `k <= j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    /// `1/j` for `k <= j`.
    Cesaro,
    /// `((k+t)^α - (k+t-1)^α) / j^α` for `k >= j`.
    TailPower { alpha: f64, t: f64 },
    /// `α k^{α-1} / j^α` for `k >= j`.
    TailAlphaK { alpha: f64 },
    /// `w_k / Σ_{i<=j} w_i` for `k >= j`, with `w_k = L_β(k, k-1)^{α-1}`.
    GeneralizedLogMeanTail { alpha: f64, beta: f64 },
    /// Weighted mean with `λ_k = k^α`.
    WeightedMeanPower { alpha: f64 },
    /// Weighted mean with `λ_k = k^α - (k-1)^α`, so `Λ_j = j^α`.
    WeightedMeanPowerDiff { alpha: f64 },
    /// Nörlund matrix with `λ_j = j^α - (j-1)^α`, `Λ_j = j^α`.
    NorlundPowerDiff { alpha: f64 },
    /// Nörlund matrix with `λ_j = j^α`, `Λ_j = Σ_{i<=j} i^α`.
    NorlundPowerSum { alpha: f64 },
}

/// Sparsity pattern of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Tail,
    WeightedMean,
    Norlund,
}

pub const FAMILY_NAMES: [&str; 8] = [
    "cesaro",
    "tail-power",
    "tail-alpha-k",
    "generalized-log-mean-tail",
    "weighted-mean-power",
    "weighted-mean-power-diff",
    "norlund-power-diff",
    "norlund-power-sum",
];

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Cesaro => FAMILY_NAMES[0],
            FamilySpec::TailPower { .. } => FAMILY_NAMES[1],
            FamilySpec::TailAlphaK { .. } => FAMILY_NAMES[2],
            FamilySpec::GeneralizedLogMeanTail { .. } => FAMILY_NAMES[3],
            FamilySpec::WeightedMeanPower { .. } => FAMILY_NAMES[4],
            FamilySpec::WeightedMeanPowerDiff { .. } => FAMILY_NAMES[5],
            FamilySpec::NorlundPowerDiff { .. } => FAMILY_NAMES[6],
            FamilySpec::NorlundPowerSum { .. } => FAMILY_NAMES[7],
        }
    }

    /// Builds a spec from its CLI name. Parameters the kind does not use are
    /// ignored; missing required ones are an error.
    pub fn from_name(name: &str, alpha: Option<f64>, t: Option<f64>, beta: Option<f64>) -> Result<Self> {
        let need_alpha = || alpha.ok_or_else(|| Error::InvalidParameter(format!("family `{name}` needs --alpha")));
        let spec = match name {
            "cesaro" => FamilySpec::Cesaro,
            "tail-power" => FamilySpec::TailPower {
                alpha: need_alpha()?,
                t: t.unwrap_or(1.0),
            },
            "tail-alpha-k" => FamilySpec::TailAlphaK { alpha: need_alpha()? },
            "generalized-log-mean-tail" => FamilySpec::GeneralizedLogMeanTail {
                alpha: need_alpha()?,
                beta: beta.ok_or_else(|| Error::InvalidParameter(format!("family `{name}` needs --beta")))?,
            },
            "weighted-mean-power" => FamilySpec::WeightedMeanPower { alpha: need_alpha()? },
            "weighted-mean-power-diff" => FamilySpec::WeightedMeanPowerDiff { alpha: need_alpha()? },
            "norlund-power-diff" => FamilySpec::NorlundPowerDiff { alpha: need_alpha()? },
            "norlund-power-sum" => FamilySpec::NorlundPowerSum { alpha: need_alpha()? },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family `{other}` (expected one of {})",
                    FAMILY_NAMES.join(", ")
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn shape(&self) -> Shape {
        match self {
            FamilySpec::TailPower { .. } | FamilySpec::TailAlphaK { .. } | FamilySpec::GeneralizedLogMeanTail { .. } => {
                Shape::Tail
            }
            FamilySpec::Cesaro | FamilySpec::WeightedMeanPower { .. } | FamilySpec::WeightedMeanPowerDiff { .. } => {
                Shape::WeightedMean
            }
            FamilySpec::NorlundPowerDiff { .. } | FamilySpec::NorlundPowerSum { .. } => Shape::Norlund,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            FamilySpec::Cesaro => None,
            FamilySpec::TailPower { alpha, .. }
            | FamilySpec::TailAlphaK { alpha }
            | FamilySpec::GeneralizedLogMeanTail { alpha, .. }
            | FamilySpec::WeightedMeanPower { alpha }
            | FamilySpec::WeightedMeanPowerDiff { alpha }
            | FamilySpec::NorlundPowerDiff { alpha }
            | FamilySpec::NorlundPowerSum { alpha } => Some(alpha),
        }
    }

    /// Constructor-level numeric ranges. Whether a published result covers the
    /// configuration is [`published_coverage`]'s business.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("{}: {msg}", self.name())));
        if let Some(a) = self.alpha() {
            if !a.is_finite() {
                return bad(format!("α = {a} must be finite"));
            }
        }
        match *self {
            FamilySpec::Cesaro => Ok(()),
            FamilySpec::TailPower { alpha, t } => {
                if !(alpha > 0.0) {
                    return bad(format!("α = {alpha} must be positive"));
                }
                if !(0.0..=1.0).contains(&t) {
                    return bad(format!("t = {t} must lie in [0, 1]"));
                }
                Ok(())
            }
            FamilySpec::TailAlphaK { alpha } if alpha < 1.0 => bad(format!("α = {alpha} must be at least 1")),
            FamilySpec::TailAlphaK { .. } => Ok(()),
            FamilySpec::GeneralizedLogMeanTail { alpha, beta } => {
                if !(alpha > 1.0) {
                    return bad(format!("α = {alpha} must exceed 1"));
                }
                if beta.is_nan() || beta < alpha {
                    return bad(format!("β = {beta} must satisfy β >= α"));
                }
                Ok(())
            }
            FamilySpec::WeightedMeanPower { .. } => Ok(()),
            FamilySpec::WeightedMeanPowerDiff { alpha } | FamilySpec::NorlundPowerDiff { alpha } if !(alpha > 0.0) => {
                bad(format!("α = {alpha} must be positive"))
            }
            FamilySpec::WeightedMeanPowerDiff { .. } | FamilySpec::NorlundPowerDiff { .. } => Ok(()),
            FamilySpec::NorlundPowerSum { alpha } if alpha < 0.0 => bad(format!("α = {alpha} must be non-negative")),
            FamilySpec::NorlundPowerSum { .. } => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Cesaro => write!(f, "cesaro"),
            FamilySpec::TailPower { alpha, t } => write!(f, "tail-power(alpha={alpha}, t={t})"),
            FamilySpec::GeneralizedLogMeanTail { alpha, beta } => {
                write!(f, "generalized-log-mean-tail(alpha={alpha}, beta={beta})")
            }
            other => write!(f, "{}(alpha={})", other.name(), other.alpha().unwrap_or(f64::NAN)),
        }
    }
}

/// `x^α - (x-1)^α` for `x >= 1`, `α > 0`, without cancellation.
pub(crate) fn pow_diff(x: f64, alpha: f64) -> f64 {
    if x == 1.0 {
        return 1.0;
    }
    let hi = x.powf(alpha);
    if alpha.fract() == 0.0 && x.fract() == 0.0 && hi < 9.007_199_254_740_992e15 {
        // Both powers are exact integers here.
        return hi - (x - 1.0).powf(alpha);
    }
    -hi * (alpha * (-1.0 / x).ln_1p()).exp_m1()
}

/// `(λ_n)` and `Λ_n = Σ_{i<=n} λ_i` for weighted-mean and Nörlund kinds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSequence {
    pub lambda: Vec<f64>,
    /// `Λ_1 .. Λ_N`.
    pub partial_sums: Vec<f64>,
}

/// Weight sequence of length `n`. Cesàro counts as the weighted mean with
/// `λ_k = 1`.
pub fn weights(spec: &FamilySpec, n: usize) -> Result<WeightSequence> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::Size(format!("N = {n} must be at least 1")));
    }
    let lambda: Vec<f64> = match *spec {
        FamilySpec::Cesaro => vec![1.0; n],
        FamilySpec::WeightedMeanPower { alpha } | FamilySpec::NorlundPowerSum { alpha } => {
            (1..=n).map(|k| (k as f64).powf(alpha)).collect()
        }
        FamilySpec::WeightedMeanPowerDiff { alpha } | FamilySpec::NorlundPowerDiff { alpha } => {
            (1..=n).map(|k| pow_diff(k as f64, alpha)).collect()
        }
        _ => {
            return Err(Error::Kind(format!(
                "{} is a tail family and has no weight sequence",
                spec.name()
            )))
        }
    };
    let partial_sums = crate::sum::prefix_sums(&lambda);
    Ok(WeightSequence { lambda, partial_sums })
}

/// How many rows of the infinite matrix are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowExtent {
    /// `N` rows.
    Square,
    /// Exactly `M` rows.
    Rows(usize),
    /// All rows; rows beyond `N` enter analytically. Weighted-mean kinds
    /// only (tail kinds have no non-zero rows beyond `N`, so this equals
    /// `Square` for them).
    Infinite,
}

impl fmt::Display for RowExtent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowExtent::Square => f.write_str("square"),
            RowExtent::Rows(m) => write!(f, "{m}"),
            RowExtent::Infinite => f.write_str("infinite"),
        }
    }
}

/// The finite section `(a_{j,k})`, `k <= cols`, of an infinite family matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub cols: usize,
    pub rows: RowExtent,
}

impl Truncation {
    pub fn square(n: usize) -> Self {
        Truncation { cols: n, rows: RowExtent::Square }
    }

    pub fn infinite(n: usize) -> Self {
        Truncation { cols: n, rows: RowExtent::Infinite }
    }

    pub fn rows(n: usize, m: usize) -> Self {
        Truncation { cols: n, rows: RowExtent::Rows(m) }
    }
}

/// Row multiple used for Nörlund kinds when no explicit row count is given.
pub const NORLUND_ROW_FACTOR: usize = 4;

/// The truncation that best approximates the infinite matrix: all rows for
/// weighted means when the row tail converges, `4N` rows for Nörlund kinds,
/// the square section otherwise.
pub fn default_truncation(spec: &FamilySpec, n: usize, q: f64) -> Truncation {
    match spec.shape() {
        Shape::Tail => Truncation::square(n),
        Shape::Norlund => Truncation::rows(n, NORLUND_ROW_FACTOR * n),
        Shape::WeightedMean => {
            if row_tail_exponent(spec, q).is_some_and(|a| a > 1.0) {
                Truncation::infinite(n)
            } else {
                Truncation::square(n)
            }
        }
    }
}

/// How the row count follows `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowPolicy {
    /// [`default_truncation`].
    Auto,
    Square,
    Infinite,
    /// A fixed number of rows whatever `N` is.
    Fixed(usize),
}

impl RowPolicy {
    pub fn resolve(self, spec: &FamilySpec, n: usize, q: f64) -> Truncation {
        match self {
            RowPolicy::Auto => default_truncation(spec, n, q),
            RowPolicy::Square => Truncation::square(n),
            RowPolicy::Infinite => Truncation::infinite(n),
            RowPolicy::Fixed(m) => Truncation::rows(n, m),
        }
    }
}

impl std::str::FromStr for RowPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(RowPolicy::Auto),
            "square" => Ok(RowPolicy::Square),
            "infinite" => Ok(RowPolicy::Infinite),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&m| m >= 1)
                .map(RowPolicy::Fixed)
                .ok_or_else(|| Error::InvalidParameter(format!("rows `{other}`: expected auto, square, infinite or a positive count"))),
        }
    }
}

/// Decay exponent of `Λ_j^{-q}` for weighted-mean kinds.
fn row_tail_exponent(spec: &FamilySpec, q: f64) -> Option<f64> {
    match *spec {
        FamilySpec::Cesaro => Some(q),
        FamilySpec::WeightedMeanPowerDiff { alpha } => Some(alpha * q),
        FamilySpec::WeightedMeanPower { alpha } if alpha > -1.0 => Some((1.0 + alpha) * q),
        _ => None,
    }
}

enum RowData {
    /// `num[k] / den[j]` for `k >= j`.
    Tail { num: Vec<f64>, den: Vec<f64> },
    /// `lambda[k] / big[j]` for `k <= j`.
    WeightedMean { lambda: Vec<f64>, big: Vec<f64> },
    /// `lambda[j-k] / big[j]` for `k <= j` (0-based).
    Norlund { lambda: Vec<f64>, big: Vec<f64> },
}

/// Streams the rows of a family truncation without materialising it.
pub struct FamilyRows {
    spec: FamilySpec,
    trunc: Truncation,
    n_rows: usize,
    data: RowData,
}

/// Contribution of rows `j > N` to every `Σ_j (Σ_{k<=r} a_{j,k})^q` for
/// weighted means: `Λ_r^q · Σ_{j>N} Λ_j^{-q}`.
#[derive(Debug, Clone)]
pub struct RowTail {
    /// `Λ_1 .. Λ_N`.
    pub partial_sums: Vec<f64>,
    /// `Σ_{j>N} Λ_j^{-q}` with its error bound.
    pub sum: SpecialValue,
}

impl FamilyRows {
    pub fn new(spec: &FamilySpec, trunc: Truncation) -> Result<Self> {
        spec.validate()?;
        let n = trunc.cols;
        if n < 1 {
            return Err(Error::Size(format!("N = {n} must be at least 1")));
        }
        let n_rows = match (trunc.rows, spec.shape()) {
            (RowExtent::Rows(0), _) => return Err(Error::Size("row count must be at least 1".into())),
            (RowExtent::Rows(m), _) => m,
            (RowExtent::Square, _) | (RowExtent::Infinite, Shape::Tail | Shape::WeightedMean) => n,
            (RowExtent::Infinite, Shape::Norlund) => {
                return Err(Error::Kind(format!(
                    "{} rows do not separate; use an explicit row count",
                    spec.name()
                )))
            }
        };
        let len = n.max(n_rows);
        let data = match *spec {
            FamilySpec::TailPower { alpha, t } => RowData::Tail {
                num: (1..=n).map(|k| pow_diff(k as f64 + t, alpha)).collect(),
                den: (1..=n).map(|j| (j as f64).powf(alpha)).collect(),
            },
            FamilySpec::TailAlphaK { alpha } => RowData::Tail {
                num: (1..=n).map(|k| alpha * (k as f64).powf(alpha - 1.0)).collect(),
                den: (1..=n).map(|j| (j as f64).powf(alpha)).collect(),
            },
            FamilySpec::GeneralizedLogMeanTail { alpha, beta } => {
                let w: Vec<f64> = (1..=n)
                    .map(|k| {
                        let k = k as f64;
                        log_mean_ext(beta, k, k - 1.0).powf(alpha - 1.0)
                    })
                    .collect();
                let den = crate::sum::prefix_sums(&w);
                RowData::Tail { num: w, den }
            }
            _ => {
                let ws = weights(spec, len)?;
                if spec.shape() == Shape::Norlund {
                    RowData::Norlund { lambda: ws.lambda, big: ws.partial_sums }
                } else {
                    RowData::WeightedMean { lambda: ws.lambda, big: ws.partial_sums }
                }
            }
        };
        Ok(FamilyRows { spec: *spec, trunc, n_rows, data })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// Analytic contribution of the rows beyond `N`, present only for
    /// weighted-mean kinds with `RowExtent::Infinite`.
    pub fn row_tail(&self, q: f64) -> Result<Option<RowTail>> {
        if self.trunc.rows != RowExtent::Infinite {
            return Ok(None);
        }
        let RowData::WeightedMean { big, .. } = &self.data else {
            return Ok(None);
        };
        let n = self.trunc.cols;
        let sum = match self.spec {
            FamilySpec::Cesaro => hurwitz_tail(q, n + 1),
            FamilySpec::WeightedMeanPowerDiff { alpha } => hurwitz_tail(alpha * q, n + 1),
            FamilySpec::WeightedMeanPower { alpha } => series::power_sum_negative_tail(alpha, q, n, big[n - 1]),
            _ => unreachable!("weighted-mean data only for weighted-mean kinds"),
        }
        .map_err(|_| {
            Error::DivergentSeries(format!(
                "rows of {} beyond N contribute Σ Λ_j^(-q), which diverges at q = {q}",
                self.spec
            ))
        })?;
        Ok(Some(RowTail {
            partial_sums: big[..n].to_vec(),
            sum,
        }))
    }
}

impl RowSource for FamilyRows {
    fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_cols(&self) -> usize {
        self.trunc.cols
    }

    fn fill_row(&self, j: usize, row: &mut [f64]) {
        let n = row.len();
        match &self.data {
            RowData::Tail { num, den } => {
                let lim = j.min(n);
                row[..lim].fill(0.0);
                if j < n {
                    let d = den[j];
                    for (out, &v) in row[j..].iter_mut().zip(&num[j..n]) {
                        *out = v / d;
                    }
                }
            }
            RowData::WeightedMean { lambda, big } => {
                let lim = (j + 1).min(n);
                let d = big[j];
                for (out, &v) in row[..lim].iter_mut().zip(lambda) {
                    *out = v / d;
                }
                row[lim..].fill(0.0);
            }
            RowData::Norlund { lambda, big } => {
                let lim = (j + 1).min(n);
                let d = big[j];
                for (k, out) in row[..lim].iter_mut().enumerate() {
                    *out = lambda[j - k] / d;
                }
                row[lim..].fill(0.0);
            }
        }
    }
}

/// The `N x N` section of the family.
pub fn generate(spec: &FamilySpec, n: usize) -> Result<NonNegativeMatrix> {
    generate_truncated(spec, Truncation::square(n))
}

/// Any finite truncation of the family (`Infinite` is rejected).
pub fn generate_truncated(spec: &FamilySpec, trunc: Truncation) -> Result<NonNegativeMatrix> {
    if trunc.rows == RowExtent::Infinite && spec.shape() != Shape::Tail {
        return Err(Error::Kind("an infinite truncation cannot be materialised".into()));
    }
    NonNegativeMatrix::from_source(&FamilyRows::new(spec, trunc)?)
}

/// A published sharp constant. `value` is `λ^p`, the factor in front of
/// `||x||_p^p`; the engine's `lambda` is its `p`-th root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownConstant {
    pub value: f64,
    pub est_abs_error: f64,
    pub regime: Regime,
    pub citation: String,
    pub validity: String,
}

/// Which result certifies a sharp constant for a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Coverage {
    Covered { citation: String, regime: Regime },
    NotCovered,
}

enum Formula {
    Beta,
    TwoPowMinusOne,
    Zeta,
    PowerPole { a: f64 },
    PowerSumSeries,
    NorlundDiffSeries,
    NorlundSumSeries,
}

struct Branch {
    regime: Regime,
    citation: &'static str,
    validity: &'static str,
    formula: Formula,
}

fn branches(spec: &FamilySpec, p: f64) -> Vec<Branch> {
    use Regime::{LowerBound as Lo, UpperBound as Up};
    let mut out = Vec::new();
    let mut push = |ok: bool, regime, citation, validity, formula| {
        if ok {
            out.push(Branch { regime, citation, validity, formula });
        }
    };
    if !(p > 0.0) || !p.is_finite() {
        return out;
    }
    match *spec {
        FamilySpec::Cesaro => {}
        FamilySpec::TailPower { alpha: a, t } => {
            push(
                p < 1.0 && a >= 1.0 && a * p < 1.0,
                Up,
                "tail-power beta constant",
                "0 < p < 1, α >= 1, αp < 1, 0 <= t <= 1",
                Formula::Beta,
            );
            push(
                t == 1.0 && a < 1.0 && (1.0 - a) / (1.0 + a * a) <= p && p <= 1.0,
                Up,
                "tail-power beta constant, small α",
                "t = 1, 0 < α < 1, (1-α)/(1+α²) <= p <= 1",
                Formula::Beta,
            );
            push(
                t == 1.0 && p >= 1.0,
                Lo,
                "tail-power lower constant (2^α - 1)^p",
                "t = 1, α > 0, p >= 1",
                Formula::TwoPowMinusOne,
            );
        }
        FamilySpec::TailAlphaK { alpha: a } => push(
            p < 1.0 && a >= 1.0 && a * p < 1.0,
            Up,
            "αk^(α-1) tail beta constant",
            "0 < p < 1, α >= 1, αp < 1",
            Formula::Beta,
        ),
        FamilySpec::GeneralizedLogMeanTail { alpha: a, beta: b } => push(
            p < 1.0 && a >= 2.0 && b >= a && a * p < 1.0,
            Up,
            "logarithmic-mean tail beta constant",
            "0 < p < 1, β >= α >= 2, αp < 1",
            Formula::Beta,
        ),
        FamilySpec::WeightedMeanPowerDiff { alpha: a } => {
            push(
                p >= 1.0 && a * p > 1.0,
                Lo,
                "power-difference weighted mean, ζ(αp)",
                "p >= 1, αp > 1",
                Formula::Zeta,
            );
            push(
                p <= 1.0 && a * p > 1.0,
                Up,
                "power-difference weighted mean, αp/(αp-1)",
                "0 < p <= 1, αp > 1",
                Formula::PowerPole { a: a * p },
            );
        }
        FamilySpec::WeightedMeanPower { alpha: a } => {
            let s = (1.0 + a) * p;
            push(
                p <= 1.0 && a >= 3.0 && s > 2.0,
                Up,
                "power weighted mean, (1+α)p/((1+α)p-1)",
                "0 < p <= 1, α >= 3, (1+α)p > 2",
                Formula::PowerPole { a: s },
            );
            push(
                p > 1.0 && a > -1.0 && a <= 0.0 && s > 1.0,
                Lo,
                "power weighted mean, Σ Λ_j^(-p), non-positive α",
                "p > 1, -1 < α <= 0, (1+α)p > 1",
                Formula::PowerSumSeries,
            );
            push(
                p <= 1.0 && a > 0.0 && a <= 1.0 && s > 1.0,
                Up,
                "power weighted mean, Σ Λ_j^(-p), reversed for 0 < α <= 1",
                "0 < p <= 1, 0 < α <= 1, (1+α)p > 1",
                Formula::PowerSumSeries,
            );
            push(
                (p >= 2.0 && (0.14..=1.0).contains(&a)) || (p >= 8.0 / (1.0 + a) && (0.0..=1.0).contains(&a)),
                Lo,
                "power weighted mean, Σ Λ_j^(-p), increasing Bennett sequence",
                "p >= 2 and 0.14 <= α <= 1, or p >= 8/(1+α) and 0 <= α <= 1",
                Formula::PowerSumSeries,
            );
            push(
                a > 1.0 && a <= 3.0 && 1.0 / (1.0 + a) < p && p <= 0.5,
                Up,
                "power weighted mean, Σ Λ_j^(-p), decreasing Bennett sequence",
                "1 < α <= 3, 1/(1+α) < p <= 1/2",
                Formula::PowerSumSeries,
            );
        }
        FamilySpec::NorlundPowerDiff { alpha: a } => push(
            p > 1.0 && a > 0.0,
            Lo,
            "Nörlund power-difference, Σ (1 - (1-1/j)^α)^p",
            "p > 1, α > 0",
            Formula::NorlundDiffSeries,
        ),
        FamilySpec::NorlundPowerSum { alpha: a } => push(
            p > 1.0 && a >= 0.0,
            Lo,
            "Nörlund power, Σ (j^α / Σ_{i<=j} i^α)^p",
            "p > 1, α >= 0",
            Formula::NorlundSumSeries,
        ),
    }
    out
}

fn evaluate(spec: &FamilySpec, p: f64, formula: &Formula) -> Result<SpecialValue> {
    let exact = |value: f64| SpecialValue {
        value,
        est_abs_error: 4.0 * f64::EPSILON * value.abs(),
    };
    let alpha = spec.alpha().unwrap_or(1.0);
    match *formula {
        Formula::Beta => Ok(SpecialValue {
            value: beta(1.0 / alpha - p, p + 1.0)? / alpha,
            est_abs_error: 1e-11 * beta(1.0 / alpha - p, p + 1.0)? / alpha,
        }),
        Formula::TwoPowMinusOne => Ok(exact((2f64.powf(alpha) - 1.0).powf(p))),
        Formula::Zeta => zeta_with_error(alpha * p),
        Formula::PowerPole { a } => Ok(exact(a / (a - 1.0))),
        Formula::PowerSumSeries => series::power_sum_negative_tail(alpha, p, 0, 0.0),
        Formula::NorlundDiffSeries => {
            let mut t = FnTerms {
                g: |j: usize| (-(alpha * (-1.0 / j as f64).ln_1p()).exp_m1()).powf(p),
                h: |u: f64| {
                    if u == 0.0 {
                        alpha.powf(p)
                    } else {
                        (-(alpha * (-u).ln_1p()).exp_m1() / u).powf(p)
                    }
                },
            };
            series::convex_series(&mut t, 1, p, 1e-13, 1 << 24)
        }
        Formula::NorlundSumSeries => series::power_sum_weighted_series(alpha, p, alpha * p),
    }
}

fn check_q(p: f64, q: f64) -> Result<()> {
    if p != q {
        return Err(Error::RegimeViolation(format!(
            "published constants are for q = p (got p = {p}, q = {q})"
        )));
    }
    Ok(())
}

/// Every published constant whose hypotheses hold at `(spec, p, q = p)`,
/// in a fixed order (at `p = 1` both regimes can apply).
pub fn known_constants(spec: &FamilySpec, p: f64, q: f64) -> Result<Vec<KnownConstant>> {
    spec.validate()?;
    check_q(p, q)?;
    branches(spec, p)
        .iter()
        .map(|b| {
            let v = evaluate(spec, p, &b.formula)?;
            Ok(KnownConstant {
                value: v.value,
                est_abs_error: v.est_abs_error,
                regime: b.regime,
                citation: b.citation.to_string(),
                validity: b.validity.to_string(),
            })
        })
        .collect()
}

/// The published value of `λ^p` for the infinite matrix; the first match in
/// [`known_constants`] order.
pub fn asymptotic_constant(spec: &FamilySpec, p: f64, q: f64) -> Result<KnownConstant> {
    known_constants(spec, p, q)?
        .into_iter()
        .next()
        .ok_or_else(|| not_covered(spec, p))
}

/// Like [`asymptotic_constant`] but restricted to one regime.
pub fn asymptotic_constant_in(spec: &FamilySpec, p: f64, q: f64, regime: Regime) -> Result<KnownConstant> {
    known_constants(spec, p, q)?
        .into_iter()
        .find(|c| c.regime == regime)
        .ok_or_else(|| not_covered(spec, p))
}

fn not_covered(spec: &FamilySpec, p: f64) -> Error {
    if *spec == FamilySpec::Cesaro {
        Error::NotCovered("no published cone constant for the Cesàro matrix; the computed value is not published".into())
    } else {
        Error::NotCovered(format!("no published sharp constant for {spec} at p = {p}"))
    }
}

/// Which result (if any) certifies a sharp constant here.
pub fn published_coverage(spec: &FamilySpec, p: f64, q: f64) -> Coverage {
    if spec.validate().is_err() || p != q {
        return Coverage::NotCovered;
    }
    match branches(spec, p).into_iter().next() {
        Some(b) => Coverage::Covered {
            citation: b.citation.to_string(),
            regime: b.regime,
        },
        None => Coverage::NotCovered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rows_of(m: &NonNegativeMatrix) -> Vec<Vec<f64>> {
        (0..m.rows()).map(|j| m.row(j).to_vec()).collect()
    }

    #[test]
    fn generator_examples() {
        let c = generate(&FamilySpec::Cesaro, 2).unwrap();
        assert_eq!(rows_of(&c), vec![vec![1.0, 0.0], vec![0.5, 0.5]]);
        let t = generate(&FamilySpec::TailPower { alpha: 1.0, t: 1.0 }, 2).unwrap();
        assert_eq!(rows_of(&t), vec![vec![1.0, 1.0], vec![0.0, 0.5]]);
        let w = generate(&FamilySpec::WeightedMeanPowerDiff { alpha: 2.0 }, 2).unwrap();
        assert_eq!(rows_of(&w), vec![vec![1.0, 0.0], vec![0.25, 0.75]]);
        assert!(generate(&FamilySpec::Cesaro, 0).is_err());
    }

    #[test]
    fn weight_examples() {
        let w = weights(&FamilySpec::WeightedMeanPower { alpha: 1.0 }, 3).unwrap();
        assert_eq!((w.lambda, w.partial_sums), (vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 6.0]));
        let w = weights(&FamilySpec::NorlundPowerDiff { alpha: 2.0 }, 3).unwrap();
        assert_eq!((w.lambda, w.partial_sums), (vec![1.0, 3.0, 5.0], vec![1.0, 4.0, 9.0]));
        let w = weights(&FamilySpec::NorlundPowerSum { alpha: 1.0 }, 3).unwrap();
        assert_eq!((w.lambda, w.partial_sums), (vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 6.0]));
        let e = weights(&FamilySpec::TailAlphaK { alpha: 2.0 }, 3);
        assert!(matches!(e, Err(Error::Kind(_))));
    }

    #[test]
    fn norlund_entries() {
        let a = generate(&FamilySpec::NorlundPowerSum { alpha: 1.0 }, 3).unwrap();
        assert_eq!(a.row(2), &[3.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0]);
    }

    #[test]
    fn pow_diff_is_stable() {
        assert_eq!(pow_diff(2.0, 2.0), 3.0);
        assert_eq!(pow_diff(1.0, 0.3), 1.0);
        let x = 1e8;
        let v = pow_diff(x, 0.5);
        let exact = 1.0 / (x.sqrt() + (x - 1.0).sqrt());
        assert!((v / exact - 1.0).abs() < 1e-14);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn log_mean_tail_at_infinity_uses_powers() {
        let a = generate(&FamilySpec::GeneralizedLogMeanTail { alpha: 2.5, beta: f64::INFINITY }, 4).unwrap();
        let w: Vec<f64> = (1..=4).map(|k| (k as f64).powf(1.5)).collect();
        let den = crate::sum::prefix_sums(&w);
        for j in 0..4 {
            for k in j..4 {
                assert_eq!(a.row(j)[k], w[k] / den[j]);
            }
        }
    }

    #[test]
    fn constant_examples() {
        let c = |s: FamilySpec, p: f64| asymptotic_constant(&s, p, p).unwrap().value;
        assert!((c(FamilySpec::TailPower { alpha: 1.0, t: 1.0 }, 0.5) - PI / 2.0).abs() < 1e-12);
        assert!((c(FamilySpec::WeightedMeanPowerDiff { alpha: 2.0 }, 1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((c(FamilySpec::WeightedMeanPowerDiff { alpha: 3.0 }, 0.5) - 3.0).abs() < 1e-14);
        assert_eq!(c(FamilySpec::TailPower { alpha: 2.0, t: 1.0 }, 2.0), 9.0);
        assert!((c(FamilySpec::WeightedMeanPower { alpha: 3.0 }, 1.0) - 4.0 / 3.0).abs() < 1e-15);
        // Σ (2/(j(j+1)))^2 = 4π²/3 - 12
        let wm = asymptotic_constant_in(&FamilySpec::WeightedMeanPower { alpha: 1.0 }, 2.0, 2.0, Regime::LowerBound);
        assert!((wm.unwrap().value - (4.0 * PI * PI / 3.0 - 12.0)).abs() < 1e-12);
        // Nörlund diff at α = 1: Σ j^{-p}
        let nd = c(FamilySpec::NorlundPowerDiff { alpha: 1.0 }, 2.0);
        assert!((nd - PI * PI / 6.0).abs() < 1e-12);
        // Nörlund sum at α = 0: Λ_j = j, again Σ j^{-p}
        let ns = c(FamilySpec::NorlundPowerSum { alpha: 0.0 }, 3.0);
        assert!((ns - crate::specfun::zeta(3.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coverage_and_errors() {
        let open = FamilySpec::WeightedMeanPower { alpha: 0.5 };
        assert_eq!(published_coverage(&open, 1.5, 1.5), Coverage::NotCovered);
        assert!(matches!(asymptotic_constant(&open, 1.5, 1.5), Err(Error::NotCovered(_))));
        assert!(matches!(published_coverage(&open, 2.0, 2.0), Coverage::Covered { regime: Regime::LowerBound, .. }));
        let tp = FamilySpec::TailPower { alpha: 2.0, t: 0.5 };
        assert!(matches!(published_coverage(&tp, 0.4, 0.4), Coverage::Covered { regime: Regime::UpperBound, .. }));
        assert!(matches!(asymptotic_constant(&tp, 0.4, 0.5), Err(Error::RegimeViolation(_))));
        assert!(matches!(asymptotic_constant(&FamilySpec::Cesaro, 2.0, 2.0), Err(Error::NotCovered(_))));
        // Both regimes apply at p = 1.
        let both = known_constants(&FamilySpec::WeightedMeanPowerDiff { alpha: 2.0 }, 1.0, 1.0).unwrap();
        assert_eq!(both.len(), 2);
        assert_eq!(both[1].value, 2.0);
    }

    #[test]
    fn validation() {
        assert!(FamilySpec::TailPower { alpha: 1.0, t: 1.5 }.validate().is_err());
        assert!(FamilySpec::TailAlphaK { alpha: 0.5 }.validate().is_err());
        assert!(FamilySpec::GeneralizedLogMeanTail { alpha: 3.0, beta: 2.0 }.validate().is_err());
        assert!(FamilySpec::NorlundPowerSum { alpha: -0.1 }.validate().is_err());
        assert!(FamilySpec::from_name("nope", None, None, None).is_err());
        assert!(FamilySpec::from_name("tail-power", None, None, None).is_err());
        assert_eq!(
            FamilySpec::from_name("generalized-log-mean-tail", Some(2.0), None, Some(f64::INFINITY)).unwrap(),
            FamilySpec::GeneralizedLogMeanTail { alpha: 2.0, beta: f64::INFINITY }
        );
    }

    #[test]
    fn infinite_rows_for_norlund_are_rejected() {
        let s = FamilySpec::NorlundPowerDiff { alpha: 1.0 };
        assert!(matches!(FamilyRows::new(&s, Truncation::infinite(5)), Err(Error::Kind(_))));
        assert_eq!(FamilyRows::new(&s, Truncation::rows(5, 20)).unwrap().n_rows(), 20);
    }

    #[test]
    fn explicit_rows_extend_weighted_means() {
        let s = FamilySpec::WeightedMeanPower { alpha: 1.0 };
        let a = generate_truncated(&s, Truncation::rows(2, 4)).unwrap();
        assert_eq!(a.rows(), 4);
        assert_eq!(a.row(3), &[0.1, 0.2]);
    }
}
