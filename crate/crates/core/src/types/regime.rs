use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the inequality is sharp.
///
/// `LowerBound`: `p >= 1, 0 < q <= p`, the constant is a minimum over `r`.
/// `UpperBound`: `0 < p <= 1, q >= p`, the constant is a maximum over `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    LowerBound,
    UpperBound,
}

impl Regime {
    /// True when `candidate` is strictly better than `incumbent` for this
    /// regime's extremum (smaller for lower bounds, larger for upper bounds).
    #[inline]
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Regime::LowerBound => candidate < incumbent,
            Regime::UpperBound => candidate > incumbent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::LowerBound => "lower",
            Regime::UpperBound => "upper",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lower" | "lower_bound" | "lowerbound" => Ok(Regime::LowerBound),
            "upper" | "upper_bound" | "upperbound" => Ok(Regime::UpperBound),
            other => Err(Error::InvalidParameter(format!(
                "unknown regime `{other}` (expected `lower` or `upper`)"
            ))),
        }
    }
}

/// Checks that `(p, q)` lies in the parameter range of `regime`.
pub fn validate_regime(p: f64, q: f64, regime: Regime) -> Result<()> {
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::RegimeViolation(format!(
            "exponents must be finite (p = {p}, q = {q})"
        )));
    }
    if p <= 0.0 {
        return Err(Error::RegimeViolation(format!("p > 0 violated (p = {p})")));
    }
    if q <= 0.0 {
        return Err(Error::RegimeViolation(format!("q > 0 violated (q = {q})")));
    }
    match regime {
        Regime::LowerBound => {
            if p < 1.0 {
                return Err(Error::RegimeViolation(format!(
                    "lower regime requires p >= 1 (p = {p})"
                )));
            }
            if q > p {
                return Err(Error::RegimeViolation(format!(
                    "lower regime requires q <= p (p = {p}, q = {q})"
                )));
            }
        }
        Regime::UpperBound => {
            if p > 1.0 {
                return Err(Error::RegimeViolation(format!(
                    "upper regime requires p <= 1 (p = {p})"
                )));
            }
            if q < p {
                return Err(Error::RegimeViolation(format!(
                    "upper regime requires q >= p (p = {p}, q = {q})"
                )));
            }
        }
    }
    Ok(())
}

/// A validated `(p, q, regime)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    p: f64,
    q: f64,
    regime: Regime,
}

impl ExponentPair {
    pub fn new(p: f64, q: f64, regime: Regime) -> Result<Self> {
        validate_regime(p, q, regime)?;
        Ok(ExponentPair { p, q, regime })
    }

    pub fn lower(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, Regime::LowerBound)
    }

    pub fn upper(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, Regime::UpperBound)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}
