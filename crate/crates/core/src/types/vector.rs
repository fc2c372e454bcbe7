use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// A non-increasing, non-negative finite sequence `x_1 >= ... >= x_n >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MonotoneVector {
    values: Vec<f64>,
}

impl MonotoneVector {
    /// Validates the cone conditions. The all-zero vector is rejected here;
    /// use [`MonotoneVector::zero`] when it is wanted on purpose.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::check_cone(&values)?;
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidVector(
                "all entries are zero; use MonotoneVector::zero".into(),
            ));
        }
        Ok(MonotoneVector { values })
    }

    pub fn zero(n: usize) -> Self {
        MonotoneVector {
            values: vec![0.0; n],
        }
    }

    fn check_cone(values: &[f64]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::InvalidVector("empty vector".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidVector(format!(
                    "entry {} = {v} is not a finite non-negative number",
                    i + 1
                )));
            }
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidVector(format!(
                "x_{} = {} < x_{} = {}: not non-increasing",
                i + 1,
                values[i],
                i + 2,
                values[i + 1]
            )));
        }
        Ok(())
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(Self::check_cone(&values).is_ok());
        MonotoneVector { values }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `c * x` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be finite and >= 0, got {c}"
            )));
        }
        Ok(MonotoneVector {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

/// The step vector `(1, ..., 1, 0, ..., 0)` with `r` leading ones.
pub fn step_vector(r: usize, n: usize) -> Result<MonotoneVector> {
    if r < 1 || r > n {
        return Err(Error::IndexOutOfRange { index: r, len: n });
    }
    let mut values = vec![0.0; n];
    values[..r].fill(1.0);
    Ok(MonotoneVector { values })
}

/// `(sum x_i^p)^(1/p)`; a quasi-norm when `0 < p < 1`.
pub fn pnorm(x: &MonotoneVector, p: f64) -> f64 {
    pnorm_slice(x.as_slice(), p)
}

pub(crate) fn pnorm_slice(x: &[f64], p: f64) -> f64 {
    let mut acc = Neumaier::new();
    for &v in x {
        let v = v.abs();
        if v > 0.0 {
            acc.add(powf_fast(v, p));
        }
    }
    let s = acc.value();
    if s == 0.0 {
        0.0
    } else if p == 1.0 {
        s
    } else {
        s.powf(1.0 / p)
    }
}

/// `x^e` with exact fast paths for the exponents used most often.
#[inline]
pub(crate) fn powf_fast(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        x.sqrt()
    } else {
        x.powf(e)
    }
}
