//! The exploration algorithm for `1[0 ↔ ∂Λ_n]`: grow the clusters of
//! `∂Λ_k` one revealed edge at a time, then scan whatever is left, and stop
//! as soon as the revealed edges decide whether the origin reaches `∂Λ_n`.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::boolfn::validate_permutation;
use crate::config::Configuration;
use crate::decisiontree::{DecisionTree, QueryRule, QueryTarget};
use crate::error::{Error, Result};
use crate::lattice::BoxRegion;
use crate::rng::{derive_seed, run_blocks};
use crate::stats::{wilson, Moments};

use super::events::MAX_ENUMERATION_EDGES;

/// Exact revealment checks enumerate at most this many edges.
pub const MAX_EXACT_EXPLORE_EDGES: usize = 14;

const HOLDS_SLACK: f64 = 1e-12;

/// Breadth-first reachability inside a box over a caller-chosen edge set.
struct Reach<'r> {
    region: &'r BoxRegion,
    incidence: Vec<Vec<usize>>,
    norm: Vec<usize>,
}

impl<'r> Reach<'r> {
    fn new(region: &'r BoxRegion) -> Self {
        let norm = (0..region.graph().num_vertices()).map(|v| region.sup_norm(v)).collect();
        Self { region, incidence: region.graph().incidence(), norm }
    }

    /// Largest sup-norm in the cluster of `from` using edges where
    /// `usable(e)` holds, stopping early once `stop_at` is reached.
    fn radius(&self, from: usize, stop_at: usize, usable: impl Fn(usize) -> bool) -> usize {
        let mut seen = vec![false; self.norm.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        let mut best = self.norm[from];
        while let Some(x) = queue.pop_front() {
            if best >= stop_at {
                break;
            }
            for &e in &self.incidence[x] {
                if !usable(e) {
                    continue;
                }
                let (u, v) = self.region.graph().edge(e);
                let y = if u == x { v } else { u };
                if !seen[y] {
                    seen[y] = true;
                    best = best.max(self.norm[y]);
                    queue.push_back(y);
                }
            }
        }
        best
    }

    fn reaches(&self, from: usize, level: usize, usable: impl Fn(usize) -> bool) -> bool {
        self.radius(from, level, usable) >= level
    }
}

/// The one-arm event `0 ↔ ∂Λ_n` on a box with at most 64 edges, as a
/// decision-tree target.
pub struct OneArmTarget<'r> {
    reach: Reach<'r>,
}

impl<'r> OneArmTarget<'r> {
    pub fn new(region: &'r BoxRegion) -> Result<Self> {
        if region.num_edges() > 64 {
            return Err(Error::TooLarge { what: "one-arm target edge count".into(), cap: 64 });
        }
        Ok(Self { reach: Reach::new(region) })
    }
}

impl QueryTarget for OneArmTarget<'_> {
    fn n(&self) -> usize {
        self.reach.region.num_edges()
    }

    fn value(&self, omega: u64) -> bool {
        let r = self.reach.region;
        self.reach.reaches(r.origin(), r.radius(), |e| omega >> e & 1 == 1)
    }

    fn determined(&self, revealed: u64, values: u64) -> Option<bool> {
        let r = self.reach.region;
        let open = revealed & values;
        if self.reach.reaches(r.origin(), r.radius(), |e| open >> e & 1 == 1) {
            return Some(true);
        }
        let possible = !revealed | values;
        if !self.reach.reaches(r.origin(), r.radius(), |e| possible >> e & 1 == 1) {
            return Some(false);
        }
        None
    }
}

/// Record of one exploration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExploreTranscript {
    pub k: usize,
    /// Revealed edges in order, up to and including step `τ`.
    pub revealed: Vec<usize>,
    pub bits: Vec<bool>,
    /// Position in `revealed` where the scan phase began, if it did.
    pub scan_from: Option<usize>,
    pub tau: usize,
    pub value: bool,
}

impl ExploreTranscript {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Edge order by (smaller endpoint, axis), i.e. construction order.
pub fn lexicographic_order(region: &BoxRegion) -> Vec<usize> {
    (0..region.num_edges()).collect()
}

fn check_k(region: &BoxRegion, k: usize) -> Result<()> {
    if k == 0 || k > region.radius() {
        return Err(Error::Input(format!("need 1 <= k <= n = {}, got k = {k}", region.radius())));
    }
    Ok(())
}

/// Runs the exploration on `ω` with edges ranked by `order`.
pub fn explore(region: &BoxRegion, k: usize, omega: &Configuration, order: &[usize]) -> Result<ExploreTranscript> {
    check_k(region, k)?;
    if omega.len() != region.num_edges() {
        return Err(Error::SizeMismatch { expected: region.num_edges(), actual: omega.len() });
    }
    validate_permutation(region.num_edges(), order)?;
    let reach = Reach::new(region);
    explore_with(&reach, k, omega, order)
}

fn explore_with(reach: &Reach<'_>, k: usize, omega: &Configuration, order: &[usize]) -> Result<ExploreTranscript> {
    let region = reach.region;
    let graph = region.graph();
    let (origin, n) = (region.origin(), region.radius());
    let mut in_v: Vec<bool> = (0..graph.num_vertices()).map(|v| reach.norm[v] == k).collect();
    let mut revealed_flag = vec![false; graph.num_edges()];
    let mut transcript =
        ExploreTranscript { k, revealed: Vec::new(), bits: Vec::new(), scan_from: None, tau: 0, value: false };
    // only an open reveal can complete a path, only a closed one can cut
    let decided = |flags: &[bool], step: Option<bool>| -> Option<bool> {
        if step != Some(false) && reach.reaches(origin, n, |e| flags[e] && omega.get(e)) {
            return Some(true);
        }
        if step != Some(true) && !reach.reaches(origin, n, |e| !flags[e] || omega.get(e)) {
            return Some(false);
        }
        None
    };
    if let Some(v) = decided(&revealed_flag, None) {
        transcript.value = v;
        return Ok(transcript);
    }
    let mut scan_pos = 0usize;
    loop {
        let growth = if transcript.scan_from.is_none() {
            order.iter().copied().find(|&e| {
                let (u, v) = graph.edge(e);
                !revealed_flag[e] && (in_v[u] || in_v[v])
            })
        } else {
            None
        };
        let e = match growth {
            Some(e) => e,
            None => {
                if transcript.scan_from.is_none() {
                    transcript.scan_from = Some(transcript.revealed.len());
                }
                while scan_pos < order.len() && revealed_flag[order[scan_pos]] {
                    scan_pos += 1;
                }
                match order.get(scan_pos) {
                    Some(&e) => e,
                    None => return Err(Error::Contract("exploration ran out of edges undecided".into())),
                }
            }
        };
        let bit = omega.get(e);
        revealed_flag[e] = true;
        transcript.revealed.push(e);
        transcript.bits.push(bit);
        if growth.is_some() && bit {
            let (u, v) = graph.edge(e);
            in_v[u] = true;
            in_v[v] = true;
        }
        if let Some(value) = decided(&revealed_flag, Some(bit)) {
            transcript.tau = transcript.revealed.len();
            transcript.value = value;
            return Ok(transcript);
        }
    }
}

/// The exploration as a [`DecisionTree`] whose rule replays the transcript
/// to rebuild the grown set. Boxes with at most 64 edges.
pub fn explore_tree(region: &BoxRegion, k: usize, order: &[usize]) -> Result<DecisionTree> {
    check_k(region, k)?;
    if region.num_edges() > 64 {
        return Err(Error::TooLarge { what: "exploration tree edge count".into(), cap: 64 });
    }
    validate_permutation(region.num_edges(), order)?;
    let edges: Vec<(usize, usize)> = region.graph().edges().to_vec();
    let start: Vec<bool> = (0..region.graph().num_vertices()).map(|v| region.sup_norm(v) == k).collect();
    let order = order.to_vec();
    let next = move |queried: &[usize], bits: &[bool]| -> usize {
        let mut in_v = start.clone();
        let mut seen = vec![false; edges.len()];
        for (&e, &b) in queried.iter().zip(bits) {
            let (u, v) = edges[e];
            if (in_v[u] || in_v[v]) && b {
                in_v[u] = true;
                in_v[v] = true;
            }
            seen[e] = true;
        }
        order
            .iter()
            .copied()
            .find(|&e| !seen[e] && (in_v[edges[e].0] || in_v[edges[e].1]))
            .or_else(|| order.iter().copied().find(|&e| !seen[e]))
            .unwrap_or(usize::MAX)
    };
    let first = next(&[], &[]);
    let rule: QueryRule = Arc::new(next);
    DecisionTree::adaptive(region.num_edges(), first, format!("explore(k={k})"), rule)
}

/// Per-edge revealment against the one-arm bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeBound {
    pub edge: usize,
    pub endpoints: (usize, usize),
    pub delta: f64,
    pub delta_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub holds: bool,
}

/// `δ_e(T) ≤ P[u ↔ ∂Λ_k] + P[v ↔ ∂Λ_k]` for every edge `e = {u, v}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevealmentBoundReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub exact: bool,
    pub samples: u64,
    pub edges: Vec<EdgeBound>,
    pub holds: bool,
}

fn planar_box(n: usize) -> Result<BoxRegion> {
    if n == 0 {
        return Err(Error::Input("box radius must be at least 1".into()));
    }
    BoxRegion::new(2, n)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} is not a probability")));
    }
    Ok(())
}

/// Vertices whose open cluster meets `∂Λ_k`.
fn touches_level(reach: &Reach<'_>, k: usize, omega: &Configuration) -> Vec<bool> {
    let graph = reach.region.graph();
    let mut mark = vec![false; graph.num_vertices()];
    let mut queue: VecDeque<usize> = (0..graph.num_vertices()).filter(|&v| reach.norm[v] == k).collect();
    queue.iter().for_each(|&v| mark[v] = true);
    while let Some(x) = queue.pop_front() {
        for &e in &reach.incidence[x] {
            if !omega.get(e) {
                continue;
            }
            let (u, v) = graph.edge(e);
            let y = if u == x { v } else { u };
            if !mark[y] {
                mark[y] = true;
                queue.push_back(y);
            }
        }
    }
    mark
}

/// Exact revealment bound on `Λ_n` in the plane by enumeration.
pub fn revealment_bound_exact(n: usize, k: usize, p: f64, order: &[usize]) -> Result<RevealmentBoundReport> {
    check_p(p)?;
    let region = planar_box(n)?;
    check_k(&region, k)?;
    validate_permutation(region.num_edges(), order)?;
    let m = region.num_edges();
    if m > MAX_EXACT_EXPLORE_EDGES {
        return Err(Error::TooLarge { what: format!("exact revealment over {m} edges"), cap: MAX_EXACT_EXPLORE_EDGES });
    }
    let reach = Reach::new(&region);
    let weights: Vec<f64> = (0..=m).map(|j| p.powi(j as i32) * (1.0 - p).powi((m - j) as i32)).collect();
    let mut delta = vec![0.0; m];
    let mut arm = vec![0.0; region.graph().num_vertices()];
    for w in 0..1u64 << m {
        let mu = weights[w.count_ones() as usize];
        if mu == 0.0 {
            continue;
        }
        let omega = Configuration::from_u64(m, w);
        for &e in &explore_with(&reach, k, &omega, order)?.revealed {
            delta[e] += mu;
        }
        for (a, t) in arm.iter_mut().zip(touches_level(&reach, k, &omega)) {
            if t {
                *a += mu;
            }
        }
    }
    let edges: Vec<EdgeBound> = region
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            let rhs = arm[u] + arm[v];
            EdgeBound { edge: e, endpoints: (u, v), delta: delta[e], delta_stderr: 0.0, rhs, rhs_stderr: 0.0, holds: delta[e] <= rhs + HOLDS_SLACK }
        })
        .collect();
    let holds = edges.iter().all(|b| b.holds);
    Ok(RevealmentBoundReport { n, k, p, exact: true, samples: 0, edges, holds })
}

/// Monte Carlo revealment bound on `Λ_n` in the plane. Revealments and
/// one-arm probabilities come from independent streams; an edge passes
/// unless `δ_e` exceeds the bound by more than `sigmas` combined errors.
pub fn revealment_bound_mc(n: usize, k: usize, p: f64, order: &[usize], samples: u64, seed: u64, sigmas: f64) -> Result<RevealmentBoundReport> {
    check_p(p)?;
    let region = planar_box(n)?;
    check_k(&region, k)?;
    validate_permutation(region.num_edges(), order)?;
    if samples < 2 {
        return Err(Error::Input("at least two samples are required".into()));
    }
    let m = region.num_edges();
    let reach = Reach::new(&region);
    let delta_blocks = run_blocks(samples, 1024, derive_seed(seed, 0), |rng, _, items| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; m];
        for _ in 0..items {
            let omega = Configuration::bernoulli(m, p, rng);
            for &e in &explore_with(&reach, k, &omega, order)?.revealed {
                counts[e] += 1;
            }
        }
        Ok(counts)
    });
    let mut counts = vec![0u64; m];
    for b in delta_blocks {
        counts.iter_mut().zip(b?).for_each(|(c, x)| *c += x);
    }
    let edge_list = region.graph().edges().to_vec();
    let rhs_blocks = run_blocks(samples, 1024, derive_seed(seed, 1), |rng, _, items| {
        let mut mom = vec![Moments::default(); m];
        for _ in 0..items {
            let omega = Configuration::bernoulli(m, p, rng);
            let t = touches_level(&reach, k, &omega);
            for (e, &(u, v)) in edge_list.iter().enumerate() {
                mom[e].push(t[u] as u8 as f64 + t[v] as u8 as f64);
            }
        }
        mom
    });
    let mut rhs = vec![Moments::default(); m];
    for b in rhs_blocks {
        rhs.iter_mut().zip(&b).for_each(|(a, x)| a.merge(x));
    }
    let edges: Vec<EdgeBound> = (0..m)
        .map(|e| {
            let (c, h) = wilson(counts[e], samples, sigmas);
            let r = rhs[e].estimate();
            let holds = c - r.value <= (h * h + (sigmas * r.stderr).powi(2)).sqrt() + HOLDS_SLACK;
            let d = counts[e] as f64 / samples as f64;
            EdgeBound {
                edge: e,
                endpoints: edge_list[e],
                delta: d,
                delta_stderr: (d * (1.0 - d) / samples as f64).sqrt(),
                rhs: r.value,
                rhs_stderr: r.stderr,
                holds,
            }
        })
        .collect();
    let holds = edges.iter().all(|b| b.holds);
    Ok(RevealmentBoundReport { n, k, p, exact: false, samples, edges, holds })
}

/// Exact when `Λ_n` has at most 14 edges, Monte Carlo with 3σ slack
/// otherwise; lexicographic edge order.
pub fn revealment_bound_check(n: usize, k: usize, p: f64, samples: u64, seed: u64) -> Result<RevealmentBoundReport> {
    let region = planar_box(n)?;
    let order = lexicographic_order(&region);
    if region.num_edges() <= MAX_EXACT_EXPLORE_EDGES {
        revealment_bound_exact(n, k, p, &order)
    } else {
        revealment_bound_mc(n, k, p, &order, samples, seed, 3.0)
    }
}

/// `Σ_e Inf_e ≥ (n / S_n) θ_n (1 − θ_n)` for `1[0 ↔ ∂Λ_n]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceSumReport {
    pub n: usize,
    pub p: f64,
    pub exact: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of `lhs − rhs` (0 when exact).
    pub stderr: f64,
    pub theta_n: f64,
    pub s_n: f64,
    pub holds: bool,
}

fn rhs_of(n: usize, theta: &[f64]) -> (f64, f64) {
    // theta[k] for k = 0..=n with theta[0] = 1
    let s: f64 = theta[..n].iter().sum();
    (n as f64 / s * theta[n] * (1.0 - theta[n]), s)
}

/// Pivotal edges of the one-arm event and the origin's cluster radius.
fn pivotal_count_and_radius(reach: &Reach<'_>, omega: &Configuration) -> (usize, usize) {
    let region = reach.region;
    let (origin, n) = (region.origin(), region.radius());
    let radius = reach.radius(origin, n, |e| omega.get(e));
    let pivotal = (0..region.num_edges())
        .filter(|&f| {
            let with = reach.reaches(origin, n, |e| e == f || omega.get(e));
            let without = reach.reaches(origin, n, |e| e != f && omega.get(e));
            with != without
        })
        .count();
    (pivotal, radius)
}

/// Exact influence-sum bound on a planar box with few edges.
pub fn influence_sum_bound_exact(n: usize, p: f64) -> Result<InfluenceSumReport> {
    check_p(p)?;
    let region = planar_box(n)?;
    let m = region.num_edges();
    if m > MAX_ENUMERATION_EDGES.min(20) {
        return Err(Error::TooLarge { what: format!("exact influence sum over {m} edges"), cap: 20 });
    }
    let reach = Reach::new(&region);
    let weights: Vec<f64> = (0..=m).map(|j| p.powi(j as i32) * (1.0 - p).powi((m - j) as i32)).collect();
    let mut lhs = 0.0;
    let mut theta = vec![0.0; n + 1];
    for w in 0..1u64 << m {
        let mu = weights[w.count_ones() as usize];
        let omega = Configuration::from_u64(m, w);
        let (piv, radius) = pivotal_count_and_radius(&reach, &omega);
        lhs += mu * piv as f64;
        theta.iter_mut().take(radius + 1).for_each(|t| *t += mu);
    }
    theta[0] = 1.0;
    let (rhs, s_n) = rhs_of(n, &theta);
    Ok(InfluenceSumReport { n, p, exact: true, lhs, rhs, stderr: 0.0, theta_n: theta[n], s_n, holds: lhs >= rhs - HOLDS_SLACK })
}

/// Monte Carlo influence-sum bound: both sides from the same samples, the
/// verdict allowing `sigmas` standard errors of the difference
/// (delta method for the right-hand side).
pub fn influence_sum_bound_mc(n: usize, p: f64, samples: u64, seed: u64, sigmas: f64) -> Result<InfluenceSumReport> {
    check_p(p)?;
    let region = planar_box(n)?;
    if samples < 2 {
        return Err(Error::Input("at least two samples are required".into()));
    }
    let m = region.num_edges();
    let reach = Reach::new(&region);
    let rows: Vec<(usize, usize)> = run_blocks(samples, 1024, seed, |rng, _, items| {
        (0..items).map(|_| pivotal_count_and_radius(&reach, &Configuration::bernoulli(m, p, rng))).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let count = rows.len() as f64;
    let lhs = rows.iter().map(|r| r.0 as f64).sum::<f64>() / count;
    let mut theta = vec![0.0; n + 1];
    for &(_, radius) in &rows {
        theta.iter_mut().take(radius + 1).for_each(|t| *t += 1.0);
    }
    theta.iter_mut().for_each(|t| *t /= count);
    theta[0] = 1.0;
    let (rhs, s_n) = rhs_of(n, &theta);
    // gradient of rhs in θ_1..θ_n
    let tn = theta[n];
    let grad: Vec<f64> = (0..=n)
        .map(|j| match j {
            0 => 0.0,
            j if j == n => n as f64 * (1.0 - 2.0 * tn) / s_n,
            _ => -(n as f64) * tn * (1.0 - tn) / (s_n * s_n),
        })
        .collect();
    let mut diff = Moments::default();
    for &(piv, radius) in &rows {
        let lin: f64 = (1..=n).map(|j| grad[j] * ((radius >= j) as u8 as f64 - theta[j])).sum();
        diff.push(piv as f64 - lin);
    }
    let stderr = diff.estimate().stderr;
    let holds = lhs - rhs >= -sigmas * stderr - HOLDS_SLACK;
    Ok(InfluenceSumReport { n, p, exact: false, lhs, rhs, stderr, theta_n: tn, s_n, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::ProductMeasure;
    use crate::decisiontree::{revealment_exact, run};
    use crate::percolation::connected;

    fn lambda(n: usize) -> BoxRegion {
        BoxRegion::new(2, n).unwrap()
    }

    #[test]
    fn trivial_configurations() {
        let b = lambda(2);
        let order = lexicographic_order(&b);
        let t = explore(&b, 2, &Configuration::zeros(b.num_edges()), &order).unwrap();
        assert!(!t.value);
        let t = explore(&b, 1, &Configuration::ones(b.num_edges()), &order).unwrap();
        assert!(t.value);
        assert!(explore(&b, 0, &Configuration::ones(b.num_edges()), &order).is_err());
        assert!(explore(&b, 3, &Configuration::ones(b.num_edges()), &order).is_err());
    }

    #[test]
    fn lambda1_value_matches_connectivity_for_every_k_and_order() {
        let b = lambda(1);
        let orders = [lexicographic_order(&b), (0..12).rev().collect::<Vec<_>>()];
        for order in &orders {
            for w in 0..1u64 << 12 {
                let omega = Configuration::from_u64(12, w);
                let direct = connected(b.graph(), &omega, &[b.origin()], &b.boundary(1)).unwrap();
                let t = explore(&b, 1, &omega, order).unwrap();
                assert_eq!(t.value, direct, "ω = {w:012b}");
                assert_eq!(t.tau, t.revealed.len());
            }
        }
    }

    #[test]
    fn tree_form_matches_direct_form() {
        let b = lambda(1);
        let order = lexicographic_order(&b);
        let tree = explore_tree(&b, 1, &order).unwrap();
        let target = OneArmTarget::new(&b).unwrap();
        for w in 0..1u64 << 12 {
            let t = explore(&b, 1, &Configuration::from_u64(12, w), &order).unwrap();
            let r = run(&tree, &target, w).unwrap();
            assert_eq!((r.order, r.value), (t.revealed, t.value));
        }
    }

    #[test]
    fn growth_phase_stays_on_the_grown_set() {
        let b = lambda(2);
        let order = lexicographic_order(&b);
        let mut rng = crate::rng::replica_rng(3, 0);
        for k in 1..=2 {
            for _ in 0..300 {
                let omega = Configuration::bernoulli(b.num_edges(), 0.5, &mut rng);
                let t = explore(&b, k, &omega, &order).unwrap();
                let mut in_v: Vec<bool> = (0..25).map(|v| b.sup_norm(v) == k).collect();
                let growth = t.scan_from.unwrap_or(t.revealed.len());
                for (&e, &bit) in t.revealed[..growth].iter().zip(&t.bits) {
                    let (u, v) = b.graph().edge(e);
                    assert!(in_v[u] || in_v[v]);
                    if bit {
                        in_v[u] = true;
                        in_v[v] = true;
                    }
                }
            }
        }
    }

    #[test]
    fn growth_phase_decides_the_value() {
        let b = lambda(3);
        let order = lexicographic_order(&b);
        let mut rng = crate::rng::replica_rng(4, 0);
        for k in 1..=3 {
            for p in [0.3, 0.5, 0.7] {
                for _ in 0..200 {
                    let omega = Configuration::bernoulli(b.num_edges(), p, &mut rng);
                    let t = explore(&b, k, &omega, &order).unwrap();
                    assert_eq!(t.scan_from, None);
                }
            }
        }
    }

    #[test]
    fn exact_bound_on_lambda1() {
        for p in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let r = revealment_bound_check(1, 1, p, 0, 0).unwrap();
            assert!(r.exact && r.holds, "p = {p}");
            assert_eq!(r.edges.len(), 12);
        }
        // at k = n = 1 every vertex but the origin is on ∂Λ_1
        let r = revealment_bound_check(1, 1, 0.0, 0, 0).unwrap();
        assert!(r.edges.iter().all(|e| e.rhs >= 1.0));
    }

    #[test]
    fn exact_walk_agrees_with_enumeration() {
        let b = lambda(1);
        let order = lexicographic_order(&b);
        let tree = explore_tree(&b, 1, &order).unwrap();
        let target = OneArmTarget::new(&b).unwrap();
        let mu = ProductMeasure::new(0.4, 12).unwrap();
        let walk = revealment_exact(&tree, &target, &mu).unwrap().revealment.values;
        let direct = revealment_bound_exact(1, 1, 0.4, &order).unwrap();
        for (a, e) in walk.iter().zip(&direct.edges) {
            assert!((a - e.delta).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_bound_on_lambda2() {
        for k in [1, 2] {
            let r = revealment_bound_check(2, k, 0.5, 20_000, 4).unwrap();
            assert!(!r.exact && r.holds, "k = {k}");
            assert_eq!(r.edges.len(), 40);
        }
    }

    #[test]
    fn influence_sum_exact_lambda1() {
        let r = influence_sum_bound_exact(1, 0.5).unwrap();
        let q: f64 = 0.5;
        assert!((r.lhs - 4.0 * q.powi(3)).abs() < 1e-12);
        assert!((r.theta_n - (1.0 - q.powi(4))).abs() < 1e-12);
        assert!(r.holds);
        let r = influence_sum_bound_exact(1, 1.0).unwrap();
        assert!(r.rhs == 0.0 && r.holds);
    }

    #[test]
    fn influence_sum_mc_lambda2() {
        for p in [0.4, 0.5, 0.6] {
            let r = influence_sum_bound_mc(2, p, 20_000, 9, 3.0).unwrap();
            assert!(r.holds, "p = {p}: {r:?}");
        }
    }

    #[test]
    fn transcript_json() {
        let b = lambda(1);
        let t = explore(&b, 1, &Configuration::ones(12), &lexicographic_order(&b)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v["value"], true);
        assert_eq!(v["tau"].as_u64().unwrap() as usize, t.revealed.len());
    }
}
