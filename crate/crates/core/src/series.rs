use crate::error::{Error, Result};

/// A validated univariate time series: at least two samples, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values, 0)?;
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of subsequences of length `m`, i.e. `n - m + 1`.
    pub fn profile_len(&self, m: usize) -> usize {
        (self.len() + 1).saturating_sub(m)
    }

    /// The subsequence starting at `pos` with length `m`.
    pub fn window(&self, pos: usize, m: usize) -> Result<&[f64]> {
        match pos.checked_add(m) {
            Some(end) if end <= self.len() => Ok(&self.values[pos..end]),
            _ => Err(Error::OutOfRange {
                pos,
                m,
                n: self.len(),
            }),
        }
    }

    /// Appends samples, rejecting the whole batch if any is non-finite.
    pub(crate) fn extend(&mut self, samples: &[f64]) -> Result<()> {
        check_finite(samples, self.len())?;
        self.values.extend_from_slice(samples);
        Ok(())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn check_finite(values: &[f64], offset: usize) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            index: offset + i,
            value: values[i],
        }),
        None => Ok(()),
    }
}
