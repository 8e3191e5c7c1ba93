use crate::error::{Error, Result};

/// Half-open genomic interval `[start, end)` on one chromosome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenomicInterval {
    pub chrom: String,
    pub start: u64,
    pub end: u64,
}

/// Weighted non-negative counts, optionally carrying genomic coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSequence {
    values: Vec<f64>,
    weights: Vec<f64>,
    coords: Option<Vec<GenomicInterval>>,
}

impl CountSequence {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(values, weights, None)
    }

    /// Unit-weight sequence.
    pub fn from_counts(values: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; values.len()];
        Self::build(values, weights, None)
    }

    pub fn with_coords(
        values: Vec<f64>,
        weights: Vec<f64>,
        coords: Vec<GenomicInterval>,
    ) -> Result<Self> {
        Self::build(values, weights, Some(coords))
    }

    fn build(
        values: Vec<f64>,
        weights: Vec<f64>,
        coords: Option<Vec<GenomicInterval>>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("count sequence has no data".into()));
        }
        if values.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        for (k, (&z, &w)) in values.iter().zip(&weights).enumerate() {
            if !z.is_finite() || z < 0.0 {
                return Err(Error::NegativeCount { line: k + 1 });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {w} at index {} is not positive",
                    k + 1
                )));
            }
        }
        if let Some(coords) = &coords {
            if coords.len() != values.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} values but {} coordinates",
                    values.len(),
                    coords.len()
                )));
            }
            for (k, c) in coords.iter().enumerate() {
                if c.start >= c.end {
                    return Err(Error::malformed(k + 1, "zero-width interval"));
                }
                if k > 0 {
                    let prev = &coords[k - 1];
                    if prev.chrom == c.chrom && c.start < prev.end {
                        return Err(Error::UnsortedIntervals { line: k + 1 });
                    }
                }
            }
        }
        Ok(Self {
            values,
            weights,
            coords,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coords(&self) -> Option<&[GenomicInterval]> {
        self.coords.as_deref()
    }

    /// Total weight, the `N` used by the BIC penalty.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Smallest and largest value.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &z| {
                (lo.min(z), hi.max(z))
            })
    }
}

/// Weighted Poisson loss `w * (mu - z log mu)` with `0 log 0 = 0`.
pub fn poisson_loss(z: f64, w: f64, mu: f64) -> f64 {
    if z == 0.0 {
        w * mu
    } else if mu <= 0.0 {
        f64::INFINITY
    } else {
        w * (mu - z * mu.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights_and_values() {
        assert!(CountSequence::new(vec![1.0], vec![0.0]).is_err());
        assert!(matches!(
            CountSequence::from_counts(vec![1.0, -2.0]),
            Err(Error::NegativeCount { line: 2 })
        ));
        assert!(CountSequence::from_counts(vec![]).is_err());
    }

    #[test]
    fn loss_conventions() {
        assert_eq!(poisson_loss(0.0, 3.0, 0.0), 0.0);
        assert_eq!(poisson_loss(0.0, 3.0, 2.0), 6.0);
        assert!(poisson_loss(1.0, 1.0, 0.0).is_infinite());
        assert!((poisson_loss(2.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }
}
