//! Small estimators shared by the Monte Carlo paths.

use serde::{Deserialize, Serialize};

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    /// `|value - target| <= k * stderr`, with a tiny absolute slack for
    /// exact estimates.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr + 1e-12
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two accumulators (Chan et al.). Order independent up to
    /// rounding.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.count == 0 {
            0.0
        } else {
            (self.sample_variance() / self.count as f64).sqrt()
        };
        Estimate { value: self.mean, stderr: se }
    }
}

/// Binomial proportion with the plain `sqrt(p(1-p)/n)` standard error.
pub fn proportion(successes: u64, trials: u64) -> Estimate {
    assert!(trials > 0, "proportion of zero trials");
    let p = successes as f64 / trials as f64;
    Estimate { value: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
}

/// Wilson score interval at `z` standard deviations: `(center, half_width)`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval of zero trials");
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    (center, half)
}

/// Whether `target` lies inside the Wilson interval at `z` sigmas.
pub fn wilson_contains(successes: u64, trials: u64, target: f64, z: f64) -> bool {
    let (c, h) = wilson(successes, trials, z);
    (target - c).abs() <= h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [0.0, 1.0, 1.0, 0.0, 1.0, 3.5];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((m.mean() - mean).abs() < 1e-15);
        assert!((m.sample_variance() - var).abs() < 1e-14);

        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..2].iter().for_each(|&x| a.push(x));
        xs[2..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean() - mean).abs() < 1e-15);
        assert!((a.sample_variance() - var).abs() < 1e-14);
    }

    #[test]
    fn wilson_handles_extremes() {
        let (c, h) = wilson(0, 100, 3.0);
        assert!(c - h <= 0.0 + 1e-15 && c + h > 0.0);
        assert!(wilson_contains(50, 100, 0.5, 3.0));
        assert!(!wilson_contains(90, 100, 0.5, 3.0));
    }
}
