//! Estimated curves `p ↦ f(p)` on a parameter grid.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub p: Vec<f64>,
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
}

impl SweepCurve {
    pub fn new(p: Vec<f64>, estimate: Vec<f64>, stderr: Vec<f64>, replicas: u64, seed: u64) -> Result<Self> {
        if estimate.len() != p.len() || stderr.len() != p.len() {
            return Err(Error::SizeMismatch { expected: p.len(), actual: estimate.len().min(stderr.len()) });
        }
        if p.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("curve grid must be strictly increasing".into()));
        }
        Ok(Self { p, estimate, stderr, replicas, seed })
    }

    /// Curve of exact values `f(p_j)`.
    pub fn exact(p: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let estimate: Vec<f64> = p.iter().map(|&x| f(x)).collect();
        let stderr = vec![0.0; p.len()];
        Self::new(p, estimate, stderr, 0, 0)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn point(&self, j: usize) -> Estimate {
        Estimate { value: self.estimate[j], stderr: self.stderr[j] }
    }

    /// Index of the grid point equal to `p`, if any.
    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.p.iter().position(|&x| (x - p).abs() < 1e-12)
    }

    /// Pairs of consecutive points where the curve drops by more than
    /// `sigmas` combined standard errors.
    pub fn monotonicity_violations(&self, sigmas: f64) -> Vec<usize> {
        (1..self.len())
            .filter(|&j| {
                let drop = self.estimate[j - 1] - self.estimate[j];
                let se = (self.stderr[j].powi(2) + self.stderr[j - 1].powi(2)).sqrt();
                drop > sigmas * se + 1e-12
            })
            .collect()
    }

    /// Writes `p,estimate,stderr,n_replicas` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "estimate", "stderr", "n_replicas"])?;
        for j in 0..self.len() {
            w.write_record([
                format!("{}", self.p[j]),
                format!("{}", self.estimate[j]),
                format!("{}", self.stderr[j]),
                self.replicas.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_grid() {
        assert!(SweepCurve::exact(vec![0.2, 0.1], |p| p).is_err());
    }

    #[test]
    fn detects_drops() {
        let c = SweepCurve::new(vec![0.0, 0.5, 1.0], vec![0.1, 0.5, 0.2], vec![0.01; 3], 10, 0).unwrap();
        assert_eq!(c.monotonicity_violations(3.0), vec![2]);
    }

    #[test]
    fn csv_layout() {
        let c = SweepCurve::new(vec![0.5], vec![0.25], vec![0.125], 8, 1).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,estimate,stderr,n_replicas\n0.5,0.25,0.125,8\n");
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
