//! The random-cluster model with free boundary on a finite graph:
//! `φ(ω) ∝ p^{|ω|} (1−p)^{|E|−|ω|} q^{k(ω)}`, where `k(ω)` counts the open
//! clusters including isolated vertices.

use std::io::Write;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanFunctionTable, ConfigMeasure};
use crate::config::Configuration;
use crate::cylinder::TernaryTable;
use crate::decisiontree::{revealment_exact, TabulatedTarget, DecisionTree, OsssReport};
use crate::error::{Error, Result};
use crate::lattice::{Graph, RectangleRegion};
use crate::percolation::{open_clusters, UnionFind};
use crate::rng::replica_rng;
use crate::threshold::talagrand_term;

/// Exact tables hold at most this many edges.
pub const MAX_EXACT_EDGES: usize = 20;
/// Exhaustive conditional checks run on at most this many edges.
pub const MAX_MONOTONICITY_EDGES: usize = 14;
/// FKG checks run on at most this many edges.
pub const MAX_FKG_EDGES: usize = 16;
/// Default burn-in of the heat-bath sampler, in sweeps.
pub const DEFAULT_BURN_IN: usize = 100;

const HOLDS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomClusterParams {
    pub p: f64,
    pub q: f64,
}

impl RandomClusterParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} is not a probability")));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::Domain(format!("cluster weight q = {q} must be positive")));
        }
        Ok(Self { p, q })
    }

    fn require_monotonic(&self) -> Result<()> {
        if self.q < 1.0 {
            return Err(Error::Domain(format!("q = {} < 1: the measure need not be monotonic", self.q)));
        }
        Ok(())
    }
}

/// `k(ω)`, isolated vertices included.
pub fn component_count(graph: &Graph, omega: &Configuration) -> Result<usize> {
    Ok(open_clusters(graph, omega)?.components())
}

fn components_of_mask(graph: &Graph, uf: &mut UnionFind, mask: u64) -> usize {
    uf.reset();
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if mask >> e & 1 == 1 {
            uf.union(u, v);
        }
    }
    uf.components()
}

/// The full probability table of a small random-cluster measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMeasure {
    graph: Graph,
    params: RandomClusterParams,
    probs: Vec<f64>,
    partition: f64,
    cylinders: OnceLock<TernaryTable<f64>>,
}

impl ExactMeasure {
    pub fn new(graph: &Graph, params: RandomClusterParams) -> Result<Self> {
        let m = graph.num_edges();
        if m > MAX_EXACT_EDGES {
            return Err(Error::TooLarge { what: format!("exact random-cluster table over {m} edges"), cap: MAX_EXACT_EDGES });
        }
        let RandomClusterParams { p, q } = params;
        let mut uf = UnionFind::new(graph.num_vertices());
        let mut probs: Vec<f64> = (0..1u64 << m)
            .map(|w| {
                let open = w.count_ones() as i32;
                let k = components_of_mask(graph, &mut uf, w) as i32;
                p.powi(open) * (1.0 - p).powi(m as i32 - open) * q.powi(k)
            })
            .collect();
        let partition: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|x| *x /= partition);
        Ok(Self { graph: graph.clone(), params, probs, partition, cylinders: OnceLock::new() })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> RandomClusterParams {
        self.params
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// `Z_{G,p,q}`.
    pub fn partition_function(&self) -> f64 {
        self.partition
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, omega: u64) -> f64 {
        self.probs[omega as usize]
    }

    /// Masses of all cylinders, built on first use (at most 14 edges).
    pub fn cylinder_table(&self) -> Result<&TernaryTable<f64>> {
        let m = self.num_edges();
        if m > MAX_MONOTONICITY_EDGES {
            return Err(Error::TooLarge { what: format!("cylinder table over {m} edges"), cap: MAX_MONOTONICITY_EDGES });
        }
        if let Some(t) = self.cylinders.get() {
            return Ok(t);
        }
        let table = TernaryTable::build(m, |w| self.probs[w as usize], |a, b| a + b)?;
        Ok(self.cylinders.get_or_init(|| table))
    }

    /// `φ[f]` for a table over the edges.
    pub fn expectation(&self, f: &BooleanFunctionTable) -> Result<f64> {
        if f.n() != self.num_edges() {
            return Err(Error::SizeMismatch { expected: self.num_edges(), actual: f.n() });
        }
        Ok(self.probs.iter().enumerate().filter(|&(w, _)| f.get(w as u64)).map(|(_, x)| x).sum())
    }

    pub fn variance(&self, f: &BooleanFunctionTable) -> Result<f64> {
        let m = self.expectation(f)?;
        Ok(m * (1.0 - m))
    }

    pub fn edge_marginals(&self) -> Vec<f64> {
        (0..self.num_edges())
            .map(|e| self.probs.iter().enumerate().filter(|&(w, _)| w >> e & 1 == 1).map(|(_, x)| x).sum())
            .collect()
    }

    /// `φ[ω_e = 1 | ω = rest off e]`, from the table.
    pub fn conditional_open(&self, e: usize, rest: u64) -> f64 {
        let base = rest & !(1u64 << e);
        let (closed, open) = (self.probs[base as usize], self.probs[(base | 1 << e) as usize]);
        open / (open + closed)
    }

    /// Writes `mask,probability` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mask", "probability"])?;
        for (mask, x) in self.probs.iter().enumerate() {
            w.write_record([mask.to_string(), format!("{x:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl ConfigMeasure for ExactMeasure {
    fn n(&self) -> usize {
        self.num_edges()
    }

    fn weight(&self, omega: u64) -> f64 {
        self.probs[omega as usize]
    }

    fn cylinder(&self, fixed: u64, values: u64) -> f64 {
        match self.cylinder_table() {
            Ok(t) => *t.get(fixed, values),
            Err(_) => {
                let free = crate::boolfn::low_mask(self.num_edges()) & !fixed;
                crate::boolfn::subsets(free).map(|s| self.probs[((values & fixed) | s) as usize]).sum()
            }
        }
    }
}

/// Open probability of `e` given the other edges of `ω`: `p` if the
/// endpoints of `e` are joined off `e`, else `p / (p + q(1−p))`.
pub fn heat_bath_conditional(graph: &Graph, omega: &Configuration, e: usize, params: RandomClusterParams) -> Result<f64> {
    if omega.len() != graph.num_edges() {
        return Err(Error::SizeMismatch { expected: graph.num_edges(), actual: omega.len() });
    }
    let mut uf = UnionFind::new(graph.num_vertices());
    Ok(conditional_with(graph, omega, e, params, &mut uf))
}

fn conditional_with(graph: &Graph, omega: &Configuration, e: usize, params: RandomClusterParams, uf: &mut UnionFind) -> f64 {
    let RandomClusterParams { p, q } = params;
    uf.reset();
    for f in omega.iter_ones().filter(|&f| f != e) {
        let (u, v) = graph.edge(f);
        uf.union(u, v);
    }
    let (u, v) = graph.edge(e);
    if uf.same(u, v) {
        p
    } else {
        p / (p + q * (1.0 - p))
    }
}

/// Resamples `ω_e` from its conditional law using the uniform draw `u`.
pub fn heat_bath_step(graph: &Graph, omega: &mut Configuration, e: usize, params: RandomClusterParams, u: f64) -> Result<()> {
    let c = heat_bath_conditional(graph, omega, e, params)?;
    omega.set(e, u < c);
    Ok(())
}

/// Single-owner heat-bath chain with systematic scan.
pub struct HeatBathChain<'g> {
    graph: &'g Graph,
    params: RandomClusterParams,
    state: Configuration,
    uf: UnionFind,
    rng: crate::rng::ReplicaRng,
}

impl<'g> HeatBathChain<'g> {
    /// Starts from Bernoulli(`p`) drawn from stream `stream` of `seed`.
    pub fn new(graph: &'g Graph, params: RandomClusterParams, seed: u64, stream: u64) -> Self {
        let mut rng = replica_rng(seed, stream);
        let state = Configuration::bernoulli(graph.num_edges(), params.p, &mut rng);
        Self { graph, params, state, uf: UnionFind::new(graph.num_vertices()), rng }
    }

    pub fn state(&self) -> &Configuration {
        &self.state
    }

    /// One pass over the edges in index order.
    pub fn sweep(&mut self) {
        for e in 0..self.graph.num_edges() {
            let c = conditional_with(self.graph, &self.state, e, self.params, &mut self.uf);
            let u: f64 = self.rng.gen();
            self.state.set(e, u < c);
        }
    }

    pub fn components(&mut self) -> usize {
        self.uf.reset();
        for e in self.state.iter_ones() {
            let (u, v) = self.graph.edge(e);
            self.uf.union(u, v);
        }
        self.uf.components()
    }
}

/// Heat-bath sample after `burn_in + sweeps` sweeps from Bernoulli(`p`).
pub fn sample(graph: &Graph, params: RandomClusterParams, sweeps: usize, burn_in: usize, seed: u64) -> Configuration {
    let mut chain = HeatBathChain::new(graph, params, seed, 0);
    for _ in 0..burn_in + sweeps {
        chain.sweep();
    }
    chain.state
}

/// `(sweep, |ω|, k(ω))` after each recorded sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub open: usize,
    pub components: usize,
}

/// Time-averaged edge marginals over `sweeps` sweeps after `burn_in`,
/// with the per-sweep trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub marginals: Vec<f64>,
    pub trace: Vec<TraceRow>,
}

impl ChainSummary {
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sweep", "open_edges", "components"])?;
        for r in &self.trace {
            w.write_record([r.sweep.to_string(), r.open.to_string(), r.components.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_chain(graph: &Graph, params: RandomClusterParams, sweeps: usize, burn_in: usize, seed: u64) -> ChainSummary {
    let mut chain = HeatBathChain::new(graph, params, seed, 0);
    for _ in 0..burn_in {
        chain.sweep();
    }
    let mut counts = vec![0u64; graph.num_edges()];
    let mut trace = Vec::with_capacity(sweeps);
    for s in 0..sweeps {
        chain.sweep();
        chain.state.iter_ones().for_each(|e| counts[e] += 1);
        let components = chain.components();
        trace.push(TraceRow { sweep: burn_in + s + 1, open: chain.state.count_ones(), components });
    }
    let marginals = counts.iter().map(|&c| c as f64 / sweeps.max(1) as f64).collect();
    ChainSummary { marginals, trace }
}

/// Applies one full systematic sweep of the heat-bath kernel to the exact
/// distribution and returns the largest change of any probability.
pub fn stationarity_defect(measure: &ExactMeasure) -> f64 {
    let m = measure.num_edges();
    let mut dist = measure.probs.clone();
    let mut next = vec![0.0; dist.len()];
    for e in 0..m {
        next.fill(0.0);
        for w in 0..dist.len() as u64 {
            let mass = dist[w as usize];
            if mass == 0.0 {
                continue;
            }
            let c = conditional_from_graph(measure, e, w);
            next[(w | 1 << e) as usize] += mass * c;
            next[(w & !(1u64 << e)) as usize] += mass * (1.0 - c);
        }
        std::mem::swap(&mut dist, &mut next);
    }
    dist.iter().zip(&measure.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn conditional_from_graph(measure: &ExactMeasure, e: usize, w: u64) -> f64 {
    let omega = Configuration::from_u64(measure.num_edges(), w);
    let mut uf = UnionFind::new(measure.graph.num_vertices());
    conditional_with(&measure.graph, &omega, e, measure.params, &mut uf)
}

/// Largest gap between the heat-bath conditional and the exact table's
/// conditional over every edge and every configuration of the others.
pub fn conditional_table_defect(measure: &ExactMeasure) -> f64 {
    let m = measure.num_edges();
    let mut worst = 0.0f64;
    for e in 0..m {
        for w in 0..1u64 << m {
            if w >> e & 1 == 1 {
                continue;
            }
            let exact = measure.conditional_open(e, w);
            if exact.is_nan() {
                continue;
            }
            worst = worst.max((exact - conditional_from_graph(measure, e, w)).abs());
        }
    }
    worst
}

/// A violating triple: `φ[ω_e = 1 | ξ] > φ[ω_e = 1 | ζ]` with `ξ ≤ ζ` on
/// the same conditioned set. Codes are ternary: digit 0 closed, 1 open,
/// 2 unconditioned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityWitness {
    pub edge: usize,
    pub lower: Vec<u8>,
    pub upper: Vec<u8>,
    pub p_lower: f64,
    pub p_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub comparisons: u64,
    pub witness: Option<MonotonicityWitness>,
}

/// Exhaustive check of monotonicity: every conditional open probability
/// is nondecreasing in the conditioning configuration. Comparing
/// configurations that differ by one closed-to-open flip suffices when all
/// cylinders have positive mass.
pub fn monotonicity_check(measure: &ExactMeasure) -> Result<MonotonicityReport> {
    let m = measure.num_edges();
    if m > MAX_MONOTONICITY_EDGES {
        return Err(Error::TooLarge { what: format!("monotonicity check over {m} edges"), cap: MAX_MONOTONICITY_EDGES });
    }
    let table = measure.cylinder_table()?;
    let pow: Vec<usize> = (0..m).map(|i| table.power(i)).collect();
    let mut comparisons = 0u64;
    for c in 0..table.len() {
        let d = table.digits(c);
        for e in (0..m).filter(|&e| d[e] == 2) {
            let cond = |code: usize| {
                let all = *table.at(code);
                (all > 0.0).then(|| table.at(code - pow[e]) / all)
            };
            let Some(lo) = cond(c) else { continue };
            for j in (0..m).filter(|&j| d[j] == 0) {
                let up = c + pow[j];
                let Some(hi) = cond(up) else { continue };
                comparisons += 1;
                if lo > hi + HOLDS_SLACK {
                    let witness = MonotonicityWitness { edge: e, lower: d.clone(), upper: table.digits(up), p_lower: lo, p_upper: hi };
                    return Ok(MonotonicityReport { monotone: false, comparisons, witness: Some(witness) });
                }
            }
        }
    }
    Ok(MonotonicityReport { monotone: true, comparisons, witness: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FkgReport {
    pub e_fg: f64,
    pub e_f: f64,
    pub e_g: f64,
    pub holds: bool,
}

/// `φ[fg] ≥ φ[f] φ[g]` for increasing `f`, `g`.
pub fn fkg_check(measure: &ExactMeasure, f: &BooleanFunctionTable, g: &BooleanFunctionTable) -> Result<FkgReport> {
    let m = measure.num_edges();
    if m > MAX_FKG_EDGES {
        return Err(Error::TooLarge { what: format!("FKG check over {m} edges"), cap: MAX_FKG_EDGES });
    }
    measure.params.require_monotonic()?;
    f.verify_monotone()?;
    g.verify_monotone()?;
    let fg = BooleanFunctionTable::from_fn(m, |w| f.get(w) && g.get(w))?;
    let (e_fg, e_f, e_g) = (measure.expectation(&fg)?, measure.expectation(f)?, measure.expectation(g)?);
    Ok(FkgReport { e_fg, e_f, e_g, holds: e_fg >= e_f * e_g - HOLDS_SLACK })
}

/// `φ[f | ω_i = 1] − φ[f | ω_i = 0]`.
pub fn conditional_influence(f: &BooleanFunctionTable, measure: &ExactMeasure, i: usize) -> Result<f64> {
    if f.n() != measure.num_edges() {
        return Err(Error::SizeMismatch { expected: measure.num_edges(), actual: f.n() });
    }
    if i >= f.n() {
        return Err(Error::Input(format!("edge {i} out of range")));
    }
    let (mut open, mut open_f, mut closed, mut closed_f) = (0.0, 0.0, 0.0, 0.0);
    for (w, &x) in measure.probs.iter().enumerate() {
        let hit = f.get(w as u64);
        if w >> i & 1 == 1 {
            open += x;
            if hit {
                open_f += x;
            }
        } else {
            closed += x;
            if hit {
                closed_f += x;
            }
        }
    }
    if open <= 0.0 || closed <= 0.0 {
        return Err(Error::Domain(format!("edge {i} is almost surely {}", if open > 0.0 { "open" } else { "closed" })));
    }
    Ok(open_f / open - closed_f / closed)
}

pub fn conditional_influences(f: &BooleanFunctionTable, measure: &ExactMeasure) -> Result<Vec<f64>> {
    (0..f.n()).map(|i| conditional_influence(f, measure, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrahamGrimmettReport {
    pub variance: f64,
    /// `Σ_i Inf_i / log(1/Inf_i)`
    pub bound_sum: f64,
    pub min_edge_variance: f64,
    /// The constant realized by this instance:
    /// `variance · min_edge_variance / bound_sum`.
    pub ratio: f64,
}

pub fn graham_grimmett_report(f: &BooleanFunctionTable, measure: &ExactMeasure) -> Result<GrahamGrimmettReport> {
    measure.params.require_monotonic()?;
    f.verify_monotone()?;
    let variance = measure.variance(f)?;
    let infs = conditional_influences(f, measure)?;
    let bound_sum: f64 = infs.iter().map(|&x| talagrand_term(x)).sum();
    let min_edge_variance = measure.edge_marginals().iter().map(|&m| m * (1.0 - m)).fold(f64::INFINITY, f64::min);
    let ratio = if variance == 0.0 || bound_sum.is_infinite() { 0.0 } else { variance * min_edge_variance / bound_sum };
    Ok(GrahamGrimmettReport { variance, bound_sum, min_edge_variance, ratio })
}

/// `Var_φ(f) ≤ Σ_i δ_i(T) Inf_i^φ(f)` with revealments under `φ`.
pub fn monotonic_osss_check(f: &BooleanFunctionTable, measure: &ExactMeasure, tree: &DecisionTree) -> Result<OsssReport> {
    Ok(monotonic_osss_suite(f, measure, std::slice::from_ref(tree))?.remove(0))
}

/// [`monotonic_osss_check`] over several trees, sharing the tables.
pub fn monotonic_osss_suite(f: &BooleanFunctionTable, measure: &ExactMeasure, trees: &[DecisionTree]) -> Result<Vec<OsssReport>> {
    let m = measure.num_edges();
    if m > MAX_MONOTONICITY_EDGES {
        return Err(Error::TooLarge { what: format!("monotonic OSSS over {m} edges"), cap: MAX_MONOTONICITY_EDGES });
    }
    measure.params.require_monotonic()?;
    f.verify_monotone()?;
    let variance = measure.variance(f)?;
    let infs = conditional_influences(f, measure)?;
    let target = TabulatedTarget::new(f)?;
    trees
        .iter()
        .map(|tree| {
            let delta = revealment_exact(tree, &target, measure)?.revealment.values;
            let rhs: f64 = delta.iter().zip(&infs).map(|(d, i)| d * i).sum();
            Ok(OsssReport { variance, rhs, holds: variance <= rhs + HOLDS_SLACK })
        })
        .collect()
}

/// One colour in `1..=q` per vertex, constant on open clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PottsColoring {
    pub q: u32,
    pub colors: Vec<u32>,
}

pub fn potts_coloring_with<R: Rng + ?Sized>(graph: &Graph, omega: &Configuration, q: u32, rng: &mut R) -> Result<PottsColoring> {
    if q < 2 {
        return Err(Error::Domain(format!("Potts colouring needs q >= 2, got {q}")));
    }
    let mut uf = open_clusters(graph, omega)?;
    let mut root_color = vec![0u32; graph.num_vertices()];
    let colors = (0..graph.num_vertices())
        .map(|v| {
            let r = uf.find(v);
            if root_color[r] == 0 {
                root_color[r] = rng.gen_range(1..=q);
            }
            root_color[r]
        })
        .collect();
    Ok(PottsColoring { q, colors })
}

pub fn potts_coloring(graph: &Graph, omega: &Configuration, q: u32, seed: u64) -> Result<PottsColoring> {
    potts_coloring_with(graph, omega, q, &mut replica_rng(seed, 0))
}

/// `√q / (1 + √q)`.
pub fn self_dual_point(q: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("q = {q} must be positive")));
    }
    Ok(q.sqrt() / (1.0 + q.sqrt()))
}

/// The small instances used by the exact checks: the 4-cycle, the 2×2
/// grid `R(2, 2)` and the path with 3 edges.
pub fn small_instances() -> Vec<(&'static str, Graph)> {
    vec![
        ("4-cycle", Graph::cycle(4).expect("valid cycle")),
        ("2x2-grid", RectangleRegion::new(2, 2).expect("valid rectangle").graph().clone()),
        ("3-path", Graph::path(3).expect("valid path")),
    ]
}
