use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Complex64;

/// Complex observables sampled on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `values[k][i]` is observable `labels[k]` at `times[i]`.
    pub values: Vec<Vec<Complex64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Self {
        Self { times, labels: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, label: String, values: Vec<Complex64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::DimensionMismatch { expected: self.times.len(), got: values.len() });
        }
        self.labels.push(label);
        self.values.push(values);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&[Complex64]> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i].as_slice())
    }
}

/// Checks that a caller-supplied grid is strictly increasing and non-negative.
pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParams("times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("times must be strictly increasing"));
    }
    Ok(())
}
