//! Monotone properties of the Erdős–Rényi graph `G(n, p)` as boolean
//! functions on the `N = n(n−1)/2` edge bits.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::curve::{linspace, SweepCurve};
use crate::error::{Error, Result};
use crate::percolation::{binomial_tail, log_factorials, UnionFind};
use crate::rng::run_replicas;
use crate::stats::Moments;
use crate::threshold::{window_from_curve, ThresholdWindow};

/// Default `ε` for reported windows.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Vertex count and the lexicographic pairing of `[N]` with vertex pairs:
/// `(0,1), (0,2), …, (0,n−1), (1,2), …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    n: usize,
}

impl RandomGraphSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("a graph needs at least one vertex".into()));
        }
        if n > 1 << 20 {
            return Err(Error::TooLarge { what: format!("random graph on {n} vertices"), cap: 1 << 20 });
        }
        Ok(Self { n })
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    /// `N = n(n−1)/2`.
    pub fn num_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Index of the pair `{i, j}`, `i ≠ j`.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = (i.min(j), i.max(j));
        assert!(a != b && b < self.n, "invalid pair ({i}, {j})");
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    /// The pair with index `e`.
    pub fn pair(&self, e: usize) -> (usize, usize) {
        assert!(e < self.num_pairs(), "pair index {e} out of range");
        let mut a = 0;
        let mut start = 0;
        while start + (self.n - a - 1) <= e {
            start += self.n - a - 1;
            a += 1;
        }
        (a, a + 1 + (e - start))
    }

    fn clusters(&self, omega: &Configuration) -> Result<UnionFind> {
        if omega.len() != self.num_pairs() {
            return Err(Error::SizeMismatch { expected: self.num_pairs(), actual: omega.len() });
        }
        let mut uf = UnionFind::new(self.n);
        let pairs = self.pair_table();
        for e in omega.iter_ones() {
            let (i, j) = pairs[e];
            uf.union(i, j);
        }
        Ok(uf)
    }

    fn pair_table(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).collect()
    }
}

pub fn is_connected(spec: &RandomGraphSpec, omega: &Configuration) -> Result<bool> {
    Ok(spec.clusters(omega)?.components() == 1)
}

pub fn has_component_of_size(spec: &RandomGraphSpec, omega: &Configuration, r: usize) -> Result<bool> {
    if r == 0 || r > spec.n {
        return Err(Error::Input(format!("component size {r} outside 1..={}", spec.n)));
    }
    let mut uf = spec.clusters(omega)?;
    Ok((0..spec.n).any(|v| uf.class_size(v) >= r))
}

/// `⌈n^{2/3}⌉`, computed exactly.
pub fn giant_size(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut r = (n as f64).powf(2.0 / 3.0).floor() as u128;
    while r > 0 && (r - 1).pow(3) >= n2 {
        r -= 1;
    }
    while r.pow(3) < n2 {
        r += 1;
    }
    r as usize
}

/// The registered monotone properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphProperty {
    Connectivity,
    /// A component with at least `r` vertices.
    Giant { r: usize },
}

impl GraphProperty {
    /// The giant-component property with `r = ⌈n^{2/3}⌉`.
    pub fn giant(n: usize) -> Self {
        GraphProperty::Giant { r: giant_size(n) }
    }

    pub fn evaluate(&self, spec: &RandomGraphSpec, omega: &Configuration) -> Result<bool> {
        match *self {
            GraphProperty::Connectivity => is_connected(spec, omega),
            GraphProperty::Giant { r } => has_component_of_size(spec, omega, r),
        }
    }

    /// The scale the threshold is expected at: `log n / n` or `1 / n`.
    pub fn scale(&self, n: usize) -> f64 {
        match self {
            GraphProperty::Connectivity => (n as f64).ln() / n as f64,
            GraphProperty::Giant { .. } => 1.0 / n as f64,
        }
    }

    /// Grid spanning the threshold: multiples of [`scale`](Self::scale).
    pub fn default_grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = match self {
            GraphProperty::Connectivity => (0.2, 3.0),
            GraphProperty::Giant { .. } => (0.1, 4.0),
        };
        let s = self.scale(n);
        linspace(lo * s, hi * s, 79).into_iter().map(|x| x.min(1.0)).collect()
    }
}

/// Number of edges, added in uniformly random order, at which the property
/// first holds.
fn hitting_count<R: Rng + ?Sized>(spec: &RandomGraphSpec, property: GraphProperty, uf: &mut UnionFind, rng: &mut R) -> usize {
    let n = spec.n;
    let big_n = spec.num_pairs();
    uf.reset();
    let done = |uf: &mut UnionFind, largest: usize| match property {
        GraphProperty::Connectivity => uf.components() == 1,
        GraphProperty::Giant { r } => largest >= r,
    };
    let mut largest = 1;
    if done(uf, largest) {
        return 0;
    }
    let mut seen: HashSet<usize> = HashSet::new();
    let mut added = 0;
    while added < big_n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || !seen.insert(spec.pair_index(i, j)) {
            continue;
        }
        added += 1;
        if let Some(root) = uf.union(i, j) {
            largest = largest.max(uf.class_size(root));
            if done(uf, largest) {
                return added;
            }
        }
    }
    added
}

/// The estimated curve and its `ε`-window.
#[derive(Debug, Clone, PartialEq)]
pub struct ErExperiment {
    pub property: GraphProperty,
    pub n: usize,
    pub curve: SweepCurve,
    pub window: Option<ThresholdWindow>,
}

/// Newman-Ziff style estimate of `p ↦ P_p[property]` on `G(n, p)`.
pub fn threshold_experiment(property: GraphProperty, n: usize, p_grid: &[f64], replicas: u64, seed: u64) -> Result<ErExperiment> {
    let spec = RandomGraphSpec::new(n)?;
    if let GraphProperty::Giant { r } = property {
        if r == 0 || r > n {
            return Err(Error::Input(format!("component size {r} outside 1..={n}")));
        }
    }
    if n < 2 {
        return Err(Error::Input("threshold experiments need at least 2 vertices".into()));
    }
    if p_grid.is_empty() || p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Domain("grid values must be probabilities".into()));
    }
    if replicas < 2 {
        return Err(Error::Input("at least two replicas are required".into()));
    }
    let hits = run_replicas(replicas, seed, || UnionFind::new(n), |uf, rng, _| hitting_count(&spec, property, uf, rng));
    let big_n = spec.num_pairs();
    let log_fact = log_factorials(big_n);
    let mut estimate = Vec::with_capacity(p_grid.len());
    let mut stderr = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let tail = binomial_tail(big_n, p, &log_fact);
        let mut m = Moments::default();
        hits.iter().for_each(|&h| m.push(tail[h]));
        let e = m.estimate();
        estimate.push(e.value.clamp(0.0, 1.0));
        stderr.push(e.stderr);
    }
    let curve = SweepCurve::new(p_grid.to_vec(), estimate, stderr, replicas, seed)?;
    let window = window_from_curve(&curve, DEFAULT_EPSILON).ok();
    Ok(ErExperiment { property, n, curve, window })
}
