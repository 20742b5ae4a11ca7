//! Decision trees (adaptive query algorithms), stopping times, revealments
//! and the OSSS inequality.
//!
//! A tree queries coordinates one at a time. Its first query is fixed; each
//! later query is chosen by a rule from the transcript so far. The run
//! stops at `τ`, the first time the revealed coordinates determine the
//! function value.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{self, subsets, BooleanFunctionTable, ConfigMeasure, ProductMeasure};
use crate::config::Configuration;
use crate::cylinder::{TernaryTable, MAX_TERNARY_BITS};
use crate::error::{Error, Result};
use crate::families::random_permutation;
use crate::rng::{replica_rng, run_blocks};
use crate::stats::{Estimate, Moments};

/// Exact OSSS checks enumerate at most this many bits.
pub const MAX_EXACT_OSSS_BITS: usize = 16;
/// Exact revealments enumerate at most this many bits.
pub const MAX_EXACT_REVEALMENT_BITS: usize = 20;

const HOLDS_SLACK: f64 = 1e-12;

/// Next-query rule: `(queried indices, revealed bits) → next index`.
pub type QueryRule = Arc<dyn Fn(&[usize], &[bool]) -> usize + Send + Sync>;

/// A function whose value can be decided from partial information.
pub trait QueryTarget: Sync {
    fn n(&self) -> usize;

    fn value(&self, omega: u64) -> bool;

    /// `Some(v)` iff every completion of the revealed coordinates
    /// (`revealed` mask, values taken from `values`) evaluates to `v`.
    fn determined(&self, revealed: u64, values: u64) -> Option<bool>;
}

impl QueryTarget for BooleanFunctionTable {
    fn n(&self) -> usize {
        BooleanFunctionTable::n(self)
    }

    fn value(&self, omega: u64) -> bool {
        self.get(omega)
    }

    fn determined(&self, revealed: u64, values: u64) -> Option<bool> {
        let base = values & revealed;
        let free = boolfn::low_mask(self.n()) & !revealed;
        let first = self.get(base);
        subsets(free).all(|s| self.get(base | s) == first).then_some(first)
    }
}

/// A boolean table with `determined` precomputed for every cylinder.
/// Entry bit 0 means some completion is false, bit 1 some completion is true.
pub struct TabulatedTarget<'a> {
    f: &'a BooleanFunctionTable,
    table: TernaryTable<u8>,
}

impl<'a> TabulatedTarget<'a> {
    pub fn new(f: &'a BooleanFunctionTable) -> Result<Self> {
        let table = TernaryTable::build(f.n(), |w| if f.get(w) { 2 } else { 1 }, |a, b| a | b)?;
        Ok(Self { f, table })
    }
}

impl QueryTarget for TabulatedTarget<'_> {
    fn n(&self) -> usize {
        self.f.n()
    }

    fn value(&self, omega: u64) -> bool {
        self.f.get(omega)
    }

    fn determined(&self, revealed: u64, values: u64) -> Option<bool> {
        match self.table.get(revealed, values) {
            1 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }
}

/// Exact revealments of a boolean table, tabulating cylinders when small.
pub fn revealment_of_table<M>(tree: &DecisionTree, f: &BooleanFunctionTable, mu: &M) -> Result<RevealmentTable>
where
    M: ConfigMeasure + ?Sized,
{
    if f.n() < MAX_TERNARY_BITS {
        revealment_exact(tree, &TabulatedTarget::new(f)?, mu)
    } else {
        revealment_exact(tree, f, mu)
    }
}

#[derive(Clone)]
pub struct DecisionTree {
    n: usize,
    first: usize,
    rule: QueryRule,
    order: Option<Vec<usize>>,
    label: String,
}

impl fmt::Debug for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecisionTree")
            .field("n", &self.n)
            .field("first", &self.first)
            .field("label", &self.label)
            .finish()
    }
}

impl DecisionTree {
    /// Queries coordinates in the fixed order `order`.
    pub fn fixed_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::Input("empty query order".into()));
        }
        boolfn::validate_permutation(n, &order)?;
        let shared = Arc::new(order.clone());
        let rule: QueryRule = Arc::new(move |queried: &[usize], _: &[bool]| shared[queried.len()]);
        Ok(Self { n, first: order[0], rule, label: format!("order{order:?}"), order: Some(order) })
    }

    /// An adaptive tree. `rule` must return an index not yet queried and
    /// must be a pure function of its arguments.
    pub fn adaptive(n: usize, first: usize, label: impl Into<String>, rule: QueryRule) -> Result<Self> {
        if first >= n {
            return Err(Error::Input(format!("first query {first} out of range for n = {n}")));
        }
        Ok(Self { n, first, rule, order: None, label: label.into() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fixed(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    /// Fixed-order trees serialize as a JSON list of indices.
    pub fn to_json(&self) -> Result<String> {
        let order = self
            .order
            .as_ref()
            .ok_or_else(|| Error::Unsupported("adaptive trees have no serialized form".into()))?;
        Ok(serde_json::to_string(order)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::fixed_order(serde_json::from_str(text)?)
    }

    /// Next query after the transcript, checked for freshness.
    pub fn next_query(&self, queried: &[usize], bits: &[bool]) -> Result<usize> {
        let next = if queried.is_empty() { self.first } else { (self.rule)(queried, bits) };
        if next >= self.n || queried.contains(&next) {
            return Err(Error::Contract(format!(
                "tree {} returned stale or invalid index {next} after {queried:?}",
                self.label
            )));
        }
        if cfg!(debug_assertions) && !queried.is_empty() && (self.rule)(queried, bits) != next {
            return Err(Error::Contract(format!("tree {} is not a pure function of its transcript", self.label)));
        }
        Ok(next)
    }
}

/// Query order, revealed bits and stopping time of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTranscript {
    pub order: Vec<usize>,
    pub bits: Vec<bool>,
    pub tau: usize,
    pub value: bool,
}

impl RunTranscript {
    pub fn revealed_mask(&self) -> u64 {
        self.order.iter().fold(0, |m, &i| m | 1 << i)
    }
}

fn check_tree<T: QueryTarget + ?Sized>(tree: &DecisionTree, target: &T) -> Result<()> {
    if tree.n != target.n() {
        return Err(Error::SizeMismatch { expected: target.n(), actual: tree.n });
    }
    if tree.n > 64 {
        return Err(Error::TooLarge { what: "decision tree width".into(), cap: 64 });
    }
    Ok(())
}

/// Runs `tree` on `ω` until the revealed bits determine the value.
pub fn run<T: QueryTarget + ?Sized>(tree: &DecisionTree, target: &T, omega: u64) -> Result<RunTranscript> {
    check_tree(tree, target)?;
    let mut order = Vec::with_capacity(tree.n);
    let mut bits = Vec::with_capacity(tree.n);
    let mut revealed = 0u64;
    loop {
        let i = tree.next_query(&order, &bits)?;
        order.push(i);
        bits.push(omega >> i & 1 == 1);
        revealed |= 1 << i;
        if let Some(value) = target.determined(revealed, omega) {
            return Ok(RunTranscript { tau: order.len(), order, bits, value });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevealmentVector {
    pub values: Vec<f64>,
    /// Present when estimated by sampling.
    pub stderr: Option<Vec<f64>>,
    pub p: Option<f64>,
    pub exact: bool,
}

/// Exact revealments together with `P[t ≤ τ, i_t = i]` for every step
/// `t` (row `t − 1`) and index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevealmentTable {
    pub revealment: RevealmentVector,
    pub by_step: Vec<Vec<f64>>,
}

/// Exact revealments under `mu` by walking the tree: every node is a
/// transcript prefix, weighted by the probability of its cylinder.
pub fn revealment_exact<T, M>(tree: &DecisionTree, target: &T, mu: &M) -> Result<RevealmentTable>
where
    T: QueryTarget + ?Sized,
    M: ConfigMeasure + ?Sized,
{
    check_tree(tree, target)?;
    if mu.n() != tree.n {
        return Err(Error::SizeMismatch { expected: tree.n, actual: mu.n() });
    }
    if tree.n > MAX_EXACT_REVEALMENT_BITS {
        return Err(Error::TooLarge { what: format!("exact revealment over {} bits", tree.n), cap: MAX_EXACT_REVEALMENT_BITS });
    }
    let mut by_step = vec![vec![0.0; tree.n]; tree.n];
    let mut order = Vec::with_capacity(tree.n);
    let mut bits = Vec::with_capacity(tree.n);
    walk(tree, target, mu, &mut order, &mut bits, 0, 0, 1.0, &mut by_step)?;
    let values = (0..tree.n).map(|i| by_step.iter().map(|row| row[i]).sum::<f64>().min(1.0)).collect();
    Ok(RevealmentTable { revealment: RevealmentVector { values, stderr: None, p: None, exact: true }, by_step })
}

#[allow(clippy::too_many_arguments)]
fn walk<T, M>(
    tree: &DecisionTree,
    target: &T,
    mu: &M,
    order: &mut Vec<usize>,
    bits: &mut Vec<bool>,
    revealed: u64,
    values: u64,
    weight: f64,
    by_step: &mut [Vec<f64>],
) -> Result<()>
where
    T: QueryTarget + ?Sized,
    M: ConfigMeasure + ?Sized,
{
    let i = tree.next_query(order, bits)?;
    by_step[order.len()][i] += weight;
    let mask = revealed | 1 << i;
    for b in [false, true] {
        let vals = if b { values | 1 << i } else { values };
        let child = mu.cylinder(mask, vals);
        if child <= 0.0 || target.determined(mask, vals).is_some() {
            continue;
        }
        order.push(i);
        bits.push(b);
        walk(tree, target, mu, order, bits, mask, vals, child, by_step)?;
        order.pop();
        bits.pop();
    }
    Ok(())
}

/// Revealments by enumerating every `ω`, running the tree, and summing
/// `μ(ω)` over the runs that query each index. Independent of the tree
/// walk in [`revealment_exact`].
pub fn revealment_enumerated<T, M>(tree: &DecisionTree, target: &T, mu: &M) -> Result<RevealmentVector>
where
    T: QueryTarget + ?Sized,
    M: ConfigMeasure + ?Sized,
{
    check_tree(tree, target)?;
    let mut values = vec![0.0; tree.n];
    for omega in 0..1u64 << tree.n {
        let w = mu.weight(omega);
        if w == 0.0 {
            continue;
        }
        for &i in &run(tree, target, omega)?.order {
            values[i] += w;
        }
    }
    Ok(RevealmentVector { values, stderr: None, p: None, exact: true })
}

/// Revealments estimated from `samples` Bernoulli(`p`) runs.
pub fn revealment_sampled<T: QueryTarget + ?Sized>(
    tree: &DecisionTree,
    target: &T,
    p: f64,
    samples: u64,
    seed: u64,
) -> Result<RevealmentVector> {
    check_tree(tree, target)?;
    ProductMeasure::new(p, tree.n)?;
    let n = tree.n;
    let blocks = run_blocks(samples, 2048, seed, |rng, _, items| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; n];
        for _ in 0..items {
            let omega = Configuration::bernoulli(n, p, rng).to_u64().expect("n ≤ 64");
            for &i in &run(tree, target, omega)?.order {
                counts[i] += 1;
            }
        }
        Ok(counts)
    });
    let mut counts = vec![0u64; n];
    for b in blocks {
        counts.iter_mut().zip(b?).for_each(|(c, x)| *c += x);
    }
    let est: Vec<Estimate> = counts.iter().map(|&c| crate::stats::proportion(c, samples)).collect();
    Ok(RevealmentVector {
        values: est.iter().map(|e| e.value).collect(),
        stderr: Some(est.iter().map(|e| e.stderr).collect()),
        p: Some(p),
        exact: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsssReport {
    pub variance: f64,
    /// `p(1−p) Σ_i δ_i Inf_i`
    pub rhs: f64,
    pub holds: bool,
}

/// Both sides of `Var_p(f) ≤ p(1−p) Σ_i δ_i(T) Inf_i(f)`, exactly, for
/// increasing `f`.
pub fn osss_check(f: &BooleanFunctionTable, tree: &DecisionTree, mu: &ProductMeasure) -> Result<OsssReport> {
    if !f.is_flagged_monotone() {
        f.verify_monotone()?;
    }
    osss_sides(f, tree, mu)
}

/// Same computation without the monotonicity precondition, for reporting
/// how the inequality behaves on arbitrary functions.
pub fn osss_sides(f: &BooleanFunctionTable, tree: &DecisionTree, mu: &ProductMeasure) -> Result<OsssReport> {
    if f.n() > MAX_EXACT_OSSS_BITS {
        return Err(Error::TooLarge { what: format!("exact OSSS over {} bits", f.n()), cap: MAX_EXACT_OSSS_BITS });
    }
    let p = mu.p();
    let variance = boolfn::variance(f, mu)?;
    let delta = revealment_of_table(tree, f, mu)?.revealment.values;
    let inf = boolfn::influences(f, mu)?.values;
    let rhs = p * (1.0 - p) * delta.iter().zip(&inf).map(|(d, i)| d * i).sum::<f64>();
    Ok(OsssReport { variance, rhs, holds: variance <= rhs + HOLDS_SLACK })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    /// `E|f(ω⁰) − f(ωⁿ)|`
    pub lhs: Estimate,
    /// `E|f(ω^t) − f(ω^{t−1})|` for `t = 1..=n`.
    pub steps: Vec<Estimate>,
    /// Sum of the step terms, with the standard error of the per-sample sum.
    pub step_sum: Estimate,
}

/// Simulates the hybrid sequence interpolating between two independent
/// configurations `ω` and `ω̃` along the tree's query order.
///
/// `ω^t` takes `ω̃` on the first `t` queried coordinates, `ω` on the
/// remaining coordinates queried up to `τ`, and `ω̃` everywhere else, so
/// `f(ω⁰) = f(ω)` and `ω^n = ω̃`.
pub fn coupling_oracle(f: &BooleanFunctionTable, tree: &DecisionTree, p: f64, samples: u64, seed: u64) -> Result<CouplingReport> {
    check_tree(tree, f)?;
    ProductMeasure::new(p, f.n())?;
    if samples == 0 {
        return Err(Error::Input("at least one sample is required".into()));
    }
    let n = f.n();
    let blocks = run_blocks(samples, 2048, seed, |rng, _, items| -> Result<(Moments, Vec<Moments>, Moments)> {
        let mut lhs = Moments::default();
        let mut steps = vec![Moments::default(); n];
        let mut total = Moments::default();
        for _ in 0..items {
            let omega = Configuration::bernoulli(n, p, rng).to_u64().expect("n ≤ 64");
            let tilde = Configuration::bernoulli(n, p, rng).to_u64().expect("n ≤ 64");
            let transcript = run(tree, f, omega)?;
            let queried = transcript.revealed_mask();
            let mut hybrid = (tilde & !queried) | (omega & queried);
            let mut prev = f.get(hybrid);
            let start = prev;
            let mut sum = 0.0;
            for (t, step) in steps.iter_mut().enumerate() {
                let diff = if t < transcript.tau {
                    let i = transcript.order[t];
                    hybrid = (hybrid & !(1 << i)) | (tilde & 1 << i);
                    let cur = f.get(hybrid);
                    let d = (cur != prev) as u8 as f64;
                    prev = cur;
                    d
                } else {
                    0.0
                };
                sum += diff;
                step.push(diff);
            }
            debug_assert_eq!(hybrid, tilde);
            lhs.push((start != f.get(tilde)) as u8 as f64);
            total.push(sum);
        }
        Ok((lhs, steps, total))
    });
    let mut lhs = Moments::default();
    let mut steps = vec![Moments::default(); n];
    let mut total = Moments::default();
    for b in blocks {
        let (l, s, t) = b?;
        lhs.merge(&l);
        total.merge(&t);
        steps.iter_mut().zip(&s).for_each(|(a, b)| a.merge(b));
    }
    Ok(CouplingReport {
        lhs: lhs.estimate(),
        steps: steps.iter().map(Moments::estimate).collect(),
        step_sum: total.estimate(),
    })
}

fn unqueried(n: usize, queried: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !queried.contains(i)).collect()
}

fn mix(mut h: u64, x: u64) -> u64 {
    h ^= x.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h.wrapping_mul(0xFF51_AFD7_ED55_8CCD)
}

/// A fixed suite of 20 trees on `n` bits: the identity and reversed
/// orders, ten seeded random orders, and eight adaptive rules.
pub fn tree_suite(n: usize, seed: u64) -> Result<Vec<DecisionTree>> {
    let mut rng = replica_rng(seed, 0);
    let mut trees = vec![
        DecisionTree::fixed_order((0..n).collect())?,
        DecisionTree::fixed_order((0..n).rev().collect())?,
    ];
    for _ in 0..10 {
        trees.push(DecisionTree::fixed_order(random_permutation(n, &mut rng))?);
    }
    // After a 1 go to the smallest fresh index, after a 0 to the largest.
    trees.push(DecisionTree::adaptive(
        n,
        0,
        "follow-last",
        Arc::new(move |queried: &[usize], bits: &[bool]| {
            let fresh = unqueried(n, queried);
            if *bits.last().expect("non-empty transcript") { fresh[0] } else { fresh[fresh.len() - 1] }
        }),
    )?);
    // Fresh index chosen by the number of ones revealed so far.
    trees.push(DecisionTree::adaptive(
        n,
        n / 2,
        "count-ones",
        Arc::new(move |queried: &[usize], bits: &[bool]| {
            let fresh = unqueried(n, queried);
            fresh[bits.iter().filter(|&&b| b).count() % fresh.len()]
        }),
    )?);
    for salt in 0..6u64 {
        let salt = salt ^ rng.gen::<u64>();
        let first = (salt % n as u64) as usize;
        trees.push(DecisionTree::adaptive(
            n,
            first,
            format!("hash-{salt:x}"),
            Arc::new(move |queried: &[usize], bits: &[bool]| {
                let h = queried.iter().zip(bits).fold(salt, |h, (&i, &b)| mix(h, (i as u64) << 1 | b as u64));
                let fresh = unqueried(n, queried);
                fresh[(h % fresh.len() as u64) as usize]
            }),
        )?);
    }
    Ok(trees)
}
