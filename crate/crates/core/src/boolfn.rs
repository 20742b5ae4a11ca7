//! Boolean functions `f : {0,1}^n → {0,1}` stored as explicit truth tables,
//! and their exact analysis under the product measure `P_p`.
//!
//! Configurations are little-endian integers: bit `i` of `ω` is coordinate
//! `i` (zero based here; one based in the usual mathematical notation).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::rng::run_blocks;
use crate::stats::{proportion, Estimate};

/// Largest bit count with an explicit truth table (2^24 bits = 2 MiB).
pub const MAX_TABLE_BITS: usize = 24;

const MAGIC: &[u8; 4] = b"BFN1";

/// Explicit truth table over `n` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunctionTable {
    n: usize,
    words: Vec<u64>,
    monotone: bool,
}

impl BooleanFunctionTable {
    /// Builds the table by evaluating `f` on every configuration.
    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        check_bits(n)?;
        let len = 1usize << n;
        let mut words = vec![0u64; len.div_ceil(64)];
        for omega in 0..len {
            if f(omega as u64) {
                words[omega / 64] |= 1 << (omega % 64);
            }
        }
        Ok(Self { n, words, monotone: false })
    }

    /// Table whose `ω`-th entry is `values[ω]`.
    pub fn from_values(n: usize, values: &[bool]) -> Result<Self> {
        check_bits(n)?;
        if values.len() != 1 << n {
            return Err(Error::SizeMismatch { expected: 1 << n, actual: values.len() });
        }
        Self::from_fn(n, |w| values[w as usize])
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    /// `f(ω) = ω_i`.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        check_index(n, i)?;
        Self::from_fn(n, |w| w >> i & 1 == 1)
    }

    /// Strict majority; `n` must be odd.
    pub fn majority(n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::Input(format!("majority needs an odd bit count, got {n}")));
        }
        Self::from_fn(n, |w| 2 * w.count_ones() as usize > n)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| w.count_ones() % 2 == 1)
    }

    pub fn and_all(n: usize) -> Result<Self> {
        let full = low_mask(n);
        Self::from_fn(n, |w| w == full)
    }

    pub fn or_all(n: usize) -> Result<Self> {
        Self::from_fn(n, |w| w != 0)
    }

    /// OR of ANDs over consecutive blocks of `width` bits.
    pub fn tribes(n: usize, width: usize) -> Result<Self> {
        if width == 0 || n % width != 0 {
            return Err(Error::Input(format!("tribe width {width} must divide {n}")));
        }
        let blocks: Vec<u64> = (0..n / width).map(|b| low_mask(width) << (b * width)).collect();
        Self::from_fn(n, |w| blocks.iter().any(|&m| w & m == m))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of configurations, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value at `ω`; panics if `ω ≥ 2^n`.
    #[inline]
    pub fn get(&self, omega: u64) -> bool {
        let o = omega as usize;
        assert!(o < self.len(), "configuration {omega} out of range for n = {}", self.n);
        self.words[o / 64] >> (o % 64) & 1 == 1
    }

    /// Checked evaluation.
    pub fn evaluate(&self, omega: u64) -> Result<bool> {
        if omega >= self.len() as u64 {
            return Err(Error::Input(format!(
                "configuration {omega} out of range for n = {}",
                self.n
            )));
        }
        Ok(self.get(omega))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of `ω` with `f(ω) = 1`, bucketed by `|ω|`.
    pub fn ones_by_weight(&self) -> Vec<u64> {
        let mut buckets = vec![0u64; self.n + 1];
        for omega in 0..self.len() as u64 {
            if self.get(omega) {
                buckets[omega.count_ones() as usize] += 1;
            }
        }
        buckets
    }

    /// Checks `ω ≤ ω′ ⇒ f(ω) ≤ f(ω′)` through all single-bit covers.
    pub fn verify_monotone(&self) -> Result<()> {
        for omega in 0..self.len() as u64 {
            if !self.get(omega) {
                continue;
            }
            for i in 0..self.n {
                let up = omega | 1 << i;
                if up != omega && !self.get(up) {
                    return Err(Error::NotIncreasing { lower: omega, upper: up });
                }
            }
        }
        Ok(())
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone || self.verify_monotone().is_ok()
    }

    /// Sets the monotone flag after verifying it.
    pub fn into_monotone(mut self) -> Result<Self> {
        self.verify_monotone()?;
        self.monotone = true;
        Ok(self)
    }

    pub fn is_flagged_monotone(&self) -> bool {
        self.monotone
    }

    /// `x ↦ f(σ(x))` where coordinate `i` of `σ(x)` is `x_{perm[i]}`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        validate_permutation(self.n, perm)?;
        Self::from_fn(self.n, |w| self.get(apply_permutation(perm, w)))
    }

    /// Writes the `BFN1` binary format: magic, `n` as one byte, then the
    /// table packed little-endian, `ceil(2^n / 8)` bytes.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&[self.n as u8])?;
        let bytes = self.len().div_ceil(8);
        let packed: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).take(bytes).collect();
        out.write_all(&packed)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 5];
        input.read_exact(&mut header)?;
        if &header[..4] != MAGIC {
            return Err(Error::Format("missing BFN1 magic".into()));
        }
        let n = header[4] as usize;
        check_bits(n)?;
        let len = 1usize << n;
        let mut packed = vec![0u8; len.div_ceil(8)];
        input.read_exact(&mut packed)?;
        let mut words = vec![0u64; len.div_ceil(64)];
        for (k, chunk) in packed.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[k] = u64::from_le_bytes(buf);
        }
        if len < 64 {
            words[0] &= (1u64 << len) - 1;
        }
        Ok(Self { n, words, monotone: false })
    }
}

fn check_bits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_TABLE_BITS {
        return Err(Error::TooLarge { what: format!("bit count {n} (must be ≥ 1)"), cap: MAX_TABLE_BITS });
    }
    Ok(())
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if i >= n {
        return Err(Error::Input(format!("index {i} out of range for n = {n}")));
    }
    Ok(())
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn validate_permutation(n: usize, perm: &[usize]) -> Result<()> {
    if perm.len() != n {
        return Err(Error::SizeMismatch { expected: n, actual: perm.len() });
    }
    let mut seen = vec![false; n];
    for &j in perm {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::Input(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

pub(crate) fn apply_permutation(perm: &[usize], omega: u64) -> u64 {
    perm.iter().enumerate().fold(0u64, |acc, (i, &j)| acc | (omega >> j & 1) << i)
}

/// A probability measure on `{0,1}^n` with `n ≤ 64`, queried through
/// configuration and cylinder probabilities.
pub trait ConfigMeasure: Sync {
    fn n(&self) -> usize;

    /// Probability of the single configuration `ω`.
    fn weight(&self, omega: u64) -> f64;

    /// Probability that the coordinates in `fixed` equal those of `values`.
    fn cylinder(&self, fixed: u64, values: u64) -> f64 {
        let free = low_mask(self.n()) & !fixed;
        let base = values & fixed;
        subsets(free).map(|s| self.weight(base | s)).sum()
    }
}

/// Iterates over all submasks of `mask`, including 0 and `mask`.
pub(crate) fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
        Some(cur)
    })
}

/// The product Bernoulli(`p`) measure on `{0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductMeasure {
    p: f64,
    n: usize,
}

impl ProductMeasure {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} is not a probability")));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `p^k (1-p)^{n-k}` for `k = 0..=n`.
    pub fn weight_by_count(&self) -> Vec<f64> {
        weight_by_count(self.p, self.n)
    }
}

fn weight_by_count(p: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)).collect()
}

impl ConfigMeasure for ProductMeasure {
    fn n(&self) -> usize {
        self.n
    }

    fn weight(&self, omega: u64) -> f64 {
        let k = omega.count_ones() as i32;
        self.p.powi(k) * (1.0 - self.p).powi(self.n as i32 - k)
    }

    fn cylinder(&self, fixed: u64, values: u64) -> f64 {
        let ones = (values & fixed).count_ones() as i32;
        let zeros = fixed.count_ones() as i32 - ones;
        self.p.powi(ones) * (1.0 - self.p).powi(zeros)
    }
}

fn check_sizes(f: &BooleanFunctionTable, n: usize) -> Result<()> {
    if f.n() != n {
        return Err(Error::SizeMismatch { expected: f.n(), actual: n });
    }
    Ok(())
}

/// `f(p) = E_p[f]`, summed by popcount buckets.
pub fn expectation(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<f64> {
    check_sizes(f, mu.n)?;
    let w = mu.weight_by_count();
    Ok(f.ones_by_weight().iter().zip(&w).map(|(&c, &wk)| c as f64 * wk).sum())
}

/// `E_p[f]` as a direct sum over every configuration.
pub fn expectation_direct(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<f64> {
    check_sizes(f, mu.n)?;
    Ok((0..f.len() as u64).filter(|&w| f.get(w)).map(|w| mu.weight(w)).sum())
}

/// `E_μ[f]` under an arbitrary measure.
pub fn expectation_under<M: ConfigMeasure + ?Sized>(f: &BooleanFunctionTable, mu: &M) -> Result<f64> {
    check_sizes(f, mu.n())?;
    Ok((0..f.len() as u64).filter(|&w| f.get(w)).map(|w| mu.weight(w)).sum())
}

/// `Var_p(f) = f(p)(1 - f(p))`.
pub fn variance(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<f64> {
    let m = expectation(f, mu)?;
    Ok(m * (1.0 - m))
}

/// Influences at one value of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceVector {
    pub p: f64,
    pub values: Vec<f64>,
}

impl InfluenceVector {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `Inf_i[f] = E_p |f(ω) − f(Flip_i ω)|`.
///
/// The integrand does not depend on `ω_i`, so the sum runs over the
/// configurations with bit `i` clear, weighted by the law of the other
/// `n − 1` coordinates.
pub fn influence(f: &BooleanFunctionTable, i: usize, mu: &ProductMeasure) -> Result<f64> {
    check_sizes(f, mu.n)?;
    check_index(f.n, i)?;
    let w = weight_by_count(mu.p, f.n - 1);
    let bit = 1u64 << i;
    let mut buckets = vec![0u64; f.n];
    for omega in 0..f.len() as u64 {
        if omega & bit == 0 && f.get(omega) != f.get(omega | bit) {
            buckets[omega.count_ones() as usize] += 1;
        }
    }
    Ok(buckets.iter().zip(&w).map(|(&c, &wk)| c as f64 * wk).sum())
}

pub fn influences(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<InfluenceVector> {
    let values = (0..f.n).map(|i| influence(f, i, mu)).collect::<Result<_>>()?;
    Ok(InfluenceVector { p: mu.p, values })
}

/// Indices `i` with `f(ω) ≠ f(Flip_i ω)`.
pub fn pivotal_set(f: &BooleanFunctionTable, omega: u64) -> Result<Vec<usize>> {
    let v = f.evaluate(omega)?;
    Ok((0..f.n).filter(|&i| f.get(omega ^ 1 << i) != v).collect())
}

/// Sample mean of `oracle(ω)` over `samples` Bernoulli(`p`) configurations
/// of `n` bits, with the binomial standard error. Deterministic in `seed`.
pub fn monte_carlo_expectation<F>(oracle: F, n: usize, p: f64, samples: u64, seed: u64) -> Result<Estimate>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    if samples == 0 {
        return Err(Error::Input("at least one sample is required".into()));
    }
    ProductMeasure::new(p, n)?;
    let hits: u64 = run_blocks(samples, 4096, seed, |rng, _, items| {
        (0..items).filter(|_| oracle(&Configuration::bernoulli(n, p, rng))).count() as u64
    })
    .into_iter()
    .sum();
    Ok(proportion(hits, samples))
}
