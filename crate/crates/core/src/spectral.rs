//! Fourier-Walsh analysis under the uniform measure.
//!
//! Coefficients are indexed by subset masks: `S ⊆ [n]` is the integer with
//! bit `i` set iff `i ∈ S`, and `u_S(ω) = (−1)^{|S ∩ ω|}`.

use std::io::Write;

use crate::boolfn::BooleanFunctionTable;
use crate::error::{Error, Result};

/// Cap for transforms of real-valued tables.
pub const MAX_SPECTRAL_BITS: usize = 20;
/// Cap for the hypercontractivity spot-check.
pub const MAX_NORM_BITS: usize = 16;

const HOLDS_SLACK: f64 = 1e-12;

/// In-place unnormalized Walsh-Hadamard transform:
/// `data[S] ← Σ_ω data[ω] (−1)^{|S ∩ ω|}`. The length must be a power of two.
pub fn fwht(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "transform length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for k in block..block + half {
                let (a, b) = (data[k], data[k + half]);
                data[k] = a + b;
                data[k + half] = a - b;
            }
        }
        half *= 2;
    }
}

/// Real-valued function on `{0,1}^n`, indexed like a truth table.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTable {
    n: usize,
    values: Vec<f64>,
}

impl RealTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > MAX_SPECTRAL_BITS {
            return Err(Error::TooLarge { what: format!("real table over {n} bits"), cap: MAX_SPECTRAL_BITS });
        }
        if values.len() != 1 << n {
            return Err(Error::SizeMismatch { expected: 1 << n, actual: values.len() });
        }
        Ok(Self { n, values })
    }

    pub fn from_boolean(f: &BooleanFunctionTable) -> Self {
        let values = (0..f.len() as u64).map(|w| if f.get(w) { 1.0 } else { 0.0 }).collect();
        Self { n: f.n(), values }
    }

    /// `∇_i f(ω) = f(ω) − f(Flip_i ω)`, valued in `{−1, 0, 1}`.
    pub fn gradient(f: &BooleanFunctionTable, i: usize) -> Result<Self> {
        if i >= f.n() {
            return Err(Error::Input(format!("index {i} out of range for n = {}", f.n())));
        }
        let values = (0..f.len() as u64)
            .map(|w| f.get(w) as i8 as f64 - f.get(w ^ 1 << i) as i8 as f64)
            .collect();
        Self::new(f.n(), values)
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; 1 << n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `‖g‖_α = (2^{−n} Σ_ω |g(ω)|^α)^{1/α}`.
    ///
    /// Tiny magnitudes are raised to the power in log space; zeros
    /// contribute nothing.
    pub fn norm(&self, alpha: f64) -> f64 {
        // scaled by the largest magnitude so tiny tables do not underflow
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = self.values.iter().map(|v| (v.abs() / scale).powf(alpha)).sum();
        scale * (sum / self.values.len() as f64).powf(1.0 / alpha)
    }
}

/// Coefficients `f̂(S)`, indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    n: usize,
    coefficients: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.coefficients[mask]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `Σ_S f̂(S)²`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// `Σ_{S ≠ ∅} f̂(S)²`.
    pub fn variance(&self) -> f64 {
        self.coefficients[1..].iter().map(|c| c * c).sum()
    }

    /// Back to value space: `g(ω) = Σ_S ĝ(S) u_S(ω)`.
    pub fn inverse(&self) -> RealTable {
        let mut values = self.coefficients.clone();
        fwht(&mut values);
        RealTable { n: self.n, values }
    }

    /// Writes `mask,coefficient` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mask", "coefficient"])?;
        for (mask, c) in self.coefficients.iter().enumerate() {
            w.write_record([mask.to_string(), format!("{c:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Spectrum of a real-valued table in `O(n 2^n)`.
pub fn transform(g: &RealTable) -> SpectralCoefficients {
    let mut coefficients = g.values.clone();
    fwht(&mut coefficients);
    let scale = 1.0 / coefficients.len() as f64;
    coefficients.iter_mut().for_each(|c| *c *= scale);
    SpectralCoefficients { n: g.n, coefficients }
}

/// `f̂(S) = 2^{−n} Σ_ω f(ω) u_S(ω)` via the fast butterfly.
pub fn fourier_walsh(f: &BooleanFunctionTable) -> SpectralCoefficients {
    transform(&RealTable::from_boolean(f))
}

/// Checks `(∇_i f)^(S) = 2 f̂(S) 1[i ∈ S]` for every `S` within 1e−10.
pub fn gradient_spectrum_check(f: &BooleanFunctionTable, i: usize) -> Result<bool> {
    if f.n() > MAX_SPECTRAL_BITS {
        return Err(Error::TooLarge { what: format!("gradient spectrum over {} bits", f.n()), cap: MAX_SPECTRAL_BITS });
    }
    let spectrum = fourier_walsh(f);
    let gradient = transform(&RealTable::gradient(f, i)?);
    Ok((0..f.len()).all(|s| {
        let expected = if s >> i & 1 == 1 { 2.0 * spectrum.get(s) } else { 0.0 };
        (gradient.get(s) - expected).abs() <= 1e-10
    }))
}

/// `T_t g = Σ_S t^{|S|} ĝ(S) u_S`, returned in value space.
pub fn noise_operator(g: &RealTable, t: f64) -> Result<RealTable> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("noise parameter t = {t} outside [0, 1]")));
    }
    let mut spectrum = transform(g);
    for (s, c) in spectrum.coefficients.iter_mut().enumerate() {
        *c *= t.powi(s.count_ones() as i32);
    }
    Ok(spectrum.inverse())
}

/// Outcome of one hypercontractivity spot-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormComparison {
    /// `‖T_t g‖_2`
    pub lhs: f64,
    /// `‖g‖_{1+t²}`
    pub rhs: f64,
    pub holds: bool,
}

/// Numeric check of `‖T_t g‖_2 ≤ ‖g‖_{1+t²}` (lhs ≤ rhs + 1e−12).
pub fn bonami_beckner_check(g: &RealTable, t: f64) -> Result<NormComparison> {
    if g.n > MAX_NORM_BITS {
        return Err(Error::TooLarge { what: format!("norm check over {} bits", g.n), cap: MAX_NORM_BITS });
    }
    let lhs = noise_operator(g, t)?.norm(2.0);
    let rhs = g.norm(1.0 + t * t);
    Ok(NormComparison { lhs, rhs, holds: lhs <= rhs + HOLDS_SLACK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    /// Direct `O(4^n)` transform.
    fn naive(g: &RealTable) -> Vec<f64> {
        let len = g.values.len();
        (0..len)
            .map(|s| {
                g.values
                    .iter()
                    .enumerate()
                    .map(|(w, v)| if (s & w).count_ones() % 2 == 0 { *v } else { -*v })
                    .sum::<f64>()
                    / len as f64
            })
            .collect()
    }

    #[test]
    fn dictator_and_parity_spectra() {
        let d = fourier_walsh(&BooleanFunctionTable::dictator(1, 0).unwrap());
        assert!(close(d.get(0), 0.5) && close(d.get(1), -0.5));

        let p = fourier_walsh(&BooleanFunctionTable::parity(2).unwrap());
        assert!(close(p.get(0), 0.5) && close(p.get(0b11), -0.5));
        assert!(close(p.get(0b01), 0.0) && close(p.get(0b10), 0.0));

        let one = fourier_walsh(&BooleanFunctionTable::constant(3, true).unwrap());
        assert!(close(one.get(0), 1.0));
        assert!(one.coefficients()[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn butterfly_matches_naive_transform() {
        let maj = BooleanFunctionTable::majority(5).unwrap();
        let fast = fourier_walsh(&maj);
        let slow = naive(&RealTable::from_boolean(&maj));
        for (a, b) in fast.coefficients().iter().zip(&slow) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_identity_examples() {
        assert!(gradient_spectrum_check(&BooleanFunctionTable::dictator(3, 0).unwrap(), 0).unwrap());
        let maj = BooleanFunctionTable::majority(3).unwrap();
        for i in 0..3 {
            assert!(gradient_spectrum_check(&maj, i).unwrap());
        }
    }

    #[test]
    fn noise_operator_examples() {
        let maj = RealTable::from_boolean(&BooleanFunctionTable::majority(3).unwrap());
        let same = noise_operator(&maj, 1.0).unwrap();
        assert!(same.values().iter().zip(maj.values()).all(|(a, b)| close(*a, *b)));

        let flat = noise_operator(&maj, 0.0).unwrap();
        assert!(flat.values().iter().all(|v| close(*v, 0.5)));

        // parity-2: ĝ(∅) = 1/2, ĝ({1,2}) = −1/2; T_{1/2} scales the latter by 1/4
        let par = RealTable::from_boolean(&BooleanFunctionTable::parity(2).unwrap());
        let smoothed = noise_operator(&par, 0.5).unwrap();
        let expected = [0.5 - 0.125, 0.5 + 0.125, 0.5 + 0.125, 0.5 - 0.125];
        for (a, b) in smoothed.values().iter().zip(expected) {
            assert!(close(*a, b));
        }
        assert!(noise_operator(&par, 1.5).is_err());
    }

    #[test]
    fn hypercontractivity_examples() {
        let g = RealTable::gradient(&BooleanFunctionTable::dictator(3, 0).unwrap(), 0).unwrap();
        assert!(bonami_beckner_check(&g, 0.5).unwrap().holds);
        for t in [0.0, 0.3, 1.0] {
            let c = RealTable::constant(3, -0.7).unwrap();
            let r = bonami_beckner_check(&c, t).unwrap();
            assert!(close(r.lhs, 0.7) && close(r.rhs, 0.7) && r.holds);
        }
    }

    #[test]
    fn norm_handles_tiny_values() {
        let g = RealTable::new(1, vec![1e-310, 0.0]).unwrap();
        assert!(g.norm(1.5) > 0.0);
        assert_eq!(RealTable::new(1, vec![0.0, 0.0]).unwrap().norm(1.2), 0.0);
    }

    #[test]
    fn csv_has_header() {
        let mut buf = Vec::new();
        fourier_walsh(&BooleanFunctionTable::dictator(1, 0).unwrap()).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("mask,coefficient\n0,5e-1\n1,-5e-1"));
    }
}
