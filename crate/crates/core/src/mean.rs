//! Weighted quasi-arithmetic means.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;

/// Tolerated deviation of the raw weight sum from one.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Values with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    /// Weights must be positive and sum to one within [`WEIGHT_SUM_TOL`];
    /// they are then normalized exactly.
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("a sample needs at least one value".into()));
        }
        if values.len() != weights.len() {
            return Err(Error::Input(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Input(format!("weights must be positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Input(format!(
                "weights sum to {total}, not 1 (tolerance {WEIGHT_SUM_TOL})"
            )));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(WeightedSample { values, weights })
    }

    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len().max(1);
        let weights = vec![1.0 / n as f64; values.len()];
        Self::new(values, weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when `max - min <= 1e-12 * max(1, |max|)`.
    pub fn is_constant(&self) -> bool {
        let hi = self.max();
        hi - self.min() <= 1e-12 * hi.abs().max(1.0)
    }

    /// Same weights, values mapped through `f`.
    pub fn map_values<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let values = self.values.iter().copied().map(f).collect::<Result<Vec<_>>>()?;
        Ok(WeightedSample {
            values,
            weights: self.weights.clone(),
        })
    }

    /// Parse CSV with header `value,weight`, or a lone `value` column for
    /// uniform weights.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Input(format!("CSV header: {e}")))?
            .clone();
        let value_col = headers
            .iter()
            .position(|h| h == "value")
            .ok_or_else(|| Error::Input("CSV header must contain a `value` column".into()))?;
        let weight_col = headers.iter().position(|h| h == "weight");

        let mut values = Vec::new();
        let mut weights = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Input(format!("CSV row {}: {e}", line + 1)))?;
            let field = |i: usize| -> Result<f64> {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    Error::Input(format!("CSV row {}: cannot parse {raw:?}", line + 1))
                })
            };
            values.push(field(value_col)?);
            if let Some(c) = weight_col {
                weights.push(field(c)?);
            }
        }
        if weight_col.is_some() {
            Self::new(values, weights)
        } else {
            Self::uniform(values)
        }
    }

    fn clamp_inside(&self, m: f64) -> f64 {
        m.clamp(self.min(), self.max())
    }
}

/// `g^-1(sum w_i g(v_i))`, evaluated literally.
pub fn mean(g: &Generator, s: &WeightedSample) -> Result<f64> {
    let mut acc = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&v, &w) in s.values.iter().zip(&s.weights) {
        let fv = g.eval(v).map_err(|e| match e {
            Error::Overflow(msg) => overflow_hint(msg),
            other => other,
        })?;
        lo = lo.min(fv);
        hi = hi.max(fv);
        acc += w * fv;
    }
    if !acc.is_finite() {
        return Err(overflow_hint(format!("weighted sum of generator values is {acc}")));
    }
    // Rounding can push the weighted sum a hair past the extreme values.
    let acc = acc.clamp(lo, hi);
    Ok(s.clamp_inside(g.inverse(acc)?))
}

fn overflow_hint(msg: String) -> Error {
    Error::Overflow(format!(
        "{msg}; evaluate through power_mean or a scale family's mean_at, which work in the log domain"
    ))
}

/// Weighted power mean, `beta = 0` being the geometric mean.
///
/// Accumulates `exp(beta ln v_i - m)` with `m = max_i beta ln v_i`, so no
/// intermediate overflows while `|beta ln v_i|` stays far below `f64::MAX`.
pub fn power_mean(beta: f64, s: &WeightedSample) -> Result<f64> {
    if let Some(&v) = s.values.iter().find(|&&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Domain {
            x: v,
            domain: crate::interval::Interval::POSITIVE,
        });
    }
    if !beta.is_finite() {
        return Err(Error::Input(format!("beta must be finite, got {beta}")));
    }
    let logs: Vec<f64> = s.values.iter().map(|v| v.ln()).collect();
    let log_mean = if beta == 0.0 {
        logs.iter().zip(&s.weights).map(|(l, w)| w * l).sum()
    } else {
        weighted_log_sum_exp(beta, &logs, &s.weights) / beta
    };
    Ok(s.clamp_inside(log_mean.exp()))
}

/// `ln(sum w_i exp(beta y_i))`, shifted by the largest exponent.
pub(crate) fn weighted_log_sum_exp(beta: f64, ys: &[f64], weights: &[f64]) -> f64 {
    let shift = ys
        .iter()
        .map(|y| beta * y)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ys
        .iter()
        .zip(weights)
        .map(|(y, w)| w * (beta * y - shift).exp())
        .sum();
    shift + sum.ln()
}
