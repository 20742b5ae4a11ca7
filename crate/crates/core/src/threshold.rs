//! Sharp-threshold toolbox: derivatives of `p ↦ E_p[f]`, influence bounds,
//! threshold windows, and the critical-point estimator for curve families.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boolfn::{self, apply_permutation, validate_permutation, BooleanFunctionTable, ProductMeasure};
use crate::curve::SweepCurve;
use crate::error::{Error, Result};

fn interior(mu: &ProductMeasure) -> Result<f64> {
    let p = mu.p();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!("p = {p} must lie strictly inside (0, 1)")));
    }
    Ok(p)
}

/// `f′(p)` as the sum of influences (monotone `f`, `0 < p < 1`).
pub fn russo_derivative(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<f64> {
    interior(mu)?;
    if !f.is_flagged_monotone() {
        f.verify_monotone()?;
    }
    Ok(boolfn::influences(f, mu)?.total())
}

/// `f′(p) = (p(1−p))^{−1} Σ_i E_p[f(ω)(ω_i − p)]`, obtained by
/// differentiating the polynomial `f(p)` term by term. Valid for any `f`.
pub fn covariance_derivative(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<f64> {
    let p = interior(mu)?;
    let n = f.n();
    let w = mu.weight_by_count();
    let sum: f64 = f
        .ones_by_weight()
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * w[k] * (k as f64 - n as f64 * p))
        .sum();
    Ok(sum / (p * (1.0 - p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalagrandReport {
    pub variance: f64,
    /// `Σ_i Inf_i / log(1/Inf_i)`, with zero influences contributing 0 and
    /// unit influences contributing +∞.
    pub bound_sum: f64,
    pub ratio: f64,
    /// At `p = 1/2` the inequality holds with constant 1; `None` elsewhere.
    pub holds_at_half: Option<bool>,
}

/// `Inf / log(1/Inf)` with the limiting conventions at 0 and 1.
pub fn talagrand_term(inf: f64) -> f64 {
    if inf <= 0.0 {
        0.0
    } else if inf >= 1.0 {
        f64::INFINITY
    } else {
        inf / (1.0 / inf).ln()
    }
}

pub fn talagrand_bound(f: &BooleanFunctionTable, mu: &ProductMeasure) -> Result<TalagrandReport> {
    let p = interior(mu)?;
    let variance = boolfn::variance(f, mu)?;
    let bound_sum: f64 = boolfn::influences(f, mu)?.values.iter().map(|&x| talagrand_term(x)).sum();
    let ratio = if variance == 0.0 { 0.0 } else { variance / bound_sum };
    let holds_at_half = ((p - 0.5).abs() < 1e-15).then(|| variance <= bound_sum + 1e-12);
    Ok(TalagrandReport { variance, bound_sum, ratio, holds_at_half })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricReport {
    /// `f′(p)`
    pub derivative: f64,
    /// `log n · Var_p(f)`
    pub log_n_variance: f64,
    pub ratio: f64,
    pub influences: Vec<f64>,
    /// Largest pairwise gap between influences.
    pub influence_spread: f64,
}

/// Verifies `f ∘ σ = f` for each generator and transitivity of the
/// generated action, then compares `f′(p)` with `log n · Var_p(f)`.
pub fn symmetric_bound_report(
    f: &BooleanFunctionTable,
    mu: &ProductMeasure,
    generators: &[Vec<usize>],
) -> Result<SymmetricReport> {
    interior(mu)?;
    let n = f.n();
    for (g, perm) in generators.iter().enumerate() {
        validate_permutation(n, perm)?;
        if let Some(omega) = (0..f.len() as u64).find(|&w| f.get(w) != f.get(apply_permutation(perm, w))) {
            return Err(Error::NotSymmetric { omega, generator: g });
        }
    }
    let orbit = orbit_of_zero(n, generators);
    if let Some(missing) = orbit.iter().position(|&x| !x) {
        return Err(Error::NotTransitive { missing });
    }
    let inf = boolfn::influences(f, mu)?;
    let derivative = inf.total();
    let log_n_variance = (n as f64).ln() * boolfn::variance(f, mu)?;
    let max = inf.values.iter().cloned().fold(f64::MIN, f64::max);
    let min = inf.values.iter().cloned().fold(f64::MAX, f64::min);
    let ratio = if log_n_variance == 0.0 { f64::INFINITY } else { derivative / log_n_variance };
    Ok(SymmetricReport { derivative, log_n_variance, ratio, influences: inf.values, influence_spread: max - min })
}

fn orbit_of_zero(n: usize, generators: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for perm in generators {
            for j in [perm[i], perm.iter().position(|&x| x == i).unwrap_or(i)] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    seen
}

/// Cyclic rotation `i ↦ i + 1 mod n`.
pub fn rotation(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// Transposition of `a` and `b`.
pub fn transposition(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(a, b);
    perm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdWindow {
    pub epsilon: f64,
    pub p_low: f64,
    pub p_high: f64,
    pub width: f64,
}

/// First `p` at which the curve reaches `level`, by linear interpolation
/// between the bracketing grid points.
pub fn crossing_point(curve: &SweepCurve, level: f64) -> Result<f64> {
    let j = curve.estimate.iter().position(|&v| v >= level).ok_or(Error::LevelNotFound { level })?;
    if j == 0 {
        return if curve.estimate[0] == level || curve.len() == 1 {
            Ok(curve.p[0])
        } else {
            Err(Error::LevelNotFound { level })
        };
    }
    let (x0, x1) = (curve.p[j - 1], curve.p[j]);
    let (y0, y1) = (curve.estimate[j - 1], curve.estimate[j]);
    Ok(x0 + (level - y0) / (y1 - y0) * (x1 - x0))
}

/// The `ε`-window `[p_low, p_high]` where the curve climbs from `ε` to `1 − ε`.
pub fn window_from_curve(curve: &SweepCurve, epsilon: f64) -> Result<ThresholdWindow> {
    if !(0.0 < epsilon && epsilon < 0.5) {
        return Err(Error::Domain(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    let p_low = crossing_point(curve, epsilon)?;
    let p_high = crossing_point(curve, 1.0 - epsilon)?;
    Ok(ThresholdWindow { epsilon, p_low, p_high, width: p_high - p_low })
}

/// Bounds from integrating `(log(f/(1−f)))′ ≥ C` away from the median:
/// `f(p − δ) ≤ e^{−Cδ}` and `f(p + δ) ≥ 1 − e^{−Cδ}`.
pub fn log_odds_window(c: f64, delta: f64) -> Result<(f64, f64)> {
    if c <= 0.0 || delta <= 0.0 {
        return Err(Error::Domain(format!("need C > 0 and δ > 0, got C = {c}, δ = {delta}")));
    }
    let e = (-c * delta).exp();
    Ok((e, 1.0 - e))
}

/// Half-width `δ = log(1/ε)/C` after which the curve is `ε`-close to 0 and 1.
pub fn epsilon_half_width(c: f64, epsilon: f64) -> Result<f64> {
    if c <= 0.0 || !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::Domain(format!("need C > 0 and 0 < ε < 1, got C = {c}, ε = {epsilon}")));
    }
    Ok((1.0 / epsilon).ln() / c)
}

/// Curves `x ↦ f_n(x)` on a common grid for several `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    x: Vec<f64>,
    curves: BTreeMap<usize, (Vec<f64>, Vec<f64>)>,
}

impl CurveFamily {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("family grid must be strictly increasing".into()));
        }
        Ok(Self { x, curves: BTreeMap::new() })
    }

    /// Adds `f_n`; rejects curves that decrease by more than 3 combined
    /// standard errors between consecutive grid points.
    pub fn insert(&mut self, n: usize, values: Vec<f64>, stderr: Vec<f64>) -> Result<()> {
        if values.len() != self.x.len() || stderr.len() != self.x.len() {
            return Err(Error::SizeMismatch { expected: self.x.len(), actual: values.len() });
        }
        for j in 1..values.len() {
            let se = (stderr[j].powi(2) + stderr[j - 1].powi(2)).sqrt();
            if values[j - 1] - values[j] > 3.0 * se + 1e-12 {
                return Err(Error::Input(format!(
                    "f_{n} decreases beyond 3σ between x = {} and x = {}",
                    self.x[j - 1],
                    self.x[j]
                )));
            }
        }
        self.curves.insert(n, (values, stderr));
        Ok(())
    }

    /// Exact family from a closure `(n, x) ↦ f_n(x)`.
    pub fn from_fn(x: Vec<f64>, ns: impl IntoIterator<Item = usize>, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let mut family = Self::new(x)?;
        for n in ns {
            let values: Vec<f64> = family.x.iter().map(|&x| f(n, x)).collect();
            let zeros = vec![0.0; values.len()];
            family.insert(n, values, zeros)?;
        }
        Ok(family)
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn ns(&self) -> Vec<usize> {
        self.curves.keys().copied().collect()
    }

    pub fn values(&self, n: usize) -> Option<&[f64]> {
        self.curves.get(&n).map(|(v, _)| v.as_slice())
    }

    /// Reads `n,x,value,stderr` rows (header required). Every `n` must
    /// cover the same grid.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            n: usize,
            x: f64,
            value: f64,
            stderr: f64,
        }
        let mut rows: BTreeMap<usize, Vec<(f64, f64, f64)>> = BTreeMap::new();
        for row in csv::Reader::from_reader(input).deserialize() {
            let r: Row = row?;
            rows.entry(r.n).or_default().push((r.x, r.value, r.stderr));
        }
        let mut grid: Option<Vec<f64>> = None;
        let mut family: Option<Self> = None;
        for (n, mut points) in rows {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
            match &grid {
                None => {
                    family = Some(Self::new(xs.clone())?);
                    grid = Some(xs);
                }
                Some(g) if *g != xs => return Err(Error::Format(format!("n = {n} uses a different grid"))),
                Some(_) => {}
            }
            let fam = family.as_mut().expect("family initialised with the first grid");
            fam.insert(n, points.iter().map(|p| p.1).collect(), points.iter().map(|p| p.2).collect())?;
        }
        family.ok_or_else(|| Error::Format("empty curve family".into()))
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Writes `n,x,value,stderr` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "x", "value", "stderr"])?;
        for (n, (values, stderr)) in &self.curves {
            for j in 0..self.x.len() {
                w.write_record([n.to_string(), self.x[j].to_string(), values[j].to_string(), stderr[j].to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `Σ_N(x_j) = Σ_{k < N} f_k(x_j)` over the available `k`, together with
    /// the number of summed terms.
    pub fn partial_sum(&self, big_n: usize) -> (Vec<f64>, usize) {
        let mut sum = vec![0.0; self.x.len()];
        let mut terms = 0;
        for (_, (values, _)) in self.curves.range(..big_n) {
            terms += 1;
            sum.iter_mut().zip(values).for_each(|(s, v)| *s += v);
        }
        (sum, terms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalEstimate {
    pub x_hat: f64,
    /// The criterion was never met on the grid; `x_hat` is the grid maximum.
    pub right_censored: bool,
    pub threshold_ratio: f64,
    /// `log Σ_N(x_j) / log(terms)` for every available `N`, so convergence
    /// in `N` can be judged.
    pub ratios: Vec<RatioRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub terms: usize,
    pub ratio: Vec<f64>,
}

/// Estimates `x₁ = inf{x : limsup log Σ_n(x) / log n ≥ 1}` from a finite
/// family. The limsup is replaced by the value at the largest available
/// `N`, where `n` is taken to be the number of summed terms, and
/// `threshold_ratio` stands in for the limiting level 1.
pub fn critical_estimator(family: &CurveFamily, threshold_ratio: f64) -> Result<CriticalEstimate> {
    let ns = family.ns();
    if ns.len() < 3 {
        return Err(Error::Input(format!("need at least 3 curves, got {}", ns.len())));
    }
    let mut ratios = Vec::new();
    for &n in &ns {
        let (sum, terms) = family.partial_sum(n);
        if terms < 2 {
            continue;
        }
        let log_terms = (terms as f64).ln();
        let ratio = sum.iter().map(|&s| if s > 0.0 { s.ln() / log_terms } else { f64::NEG_INFINITY }).collect();
        ratios.push(RatioRow { n, terms, ratio });
    }
    let last = ratios.last().ok_or_else(|| Error::Input("no N with at least two summed terms".into()))?;
    let x = family.grid();
    let (x_hat, right_censored) = match last.ratio.iter().position(|&r| r >= threshold_ratio) {
        None => (*x.last().expect("non-empty grid"), true),
        Some(0) => (x[0], false),
        Some(j) => {
            let (r0, r1) = (last.ratio[j - 1], last.ratio[j]);
            let t = if r0.is_finite() { (threshold_ratio - r0) / (r1 - r0) } else { 1.0 };
            (x[j - 1] + t * (x[j] - x[j - 1]), false)
        }
    };
    Ok(CriticalEstimate { x_hat, right_censored, threshold_ratio, ratios })
}
