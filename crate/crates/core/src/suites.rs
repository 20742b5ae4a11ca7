//! Exhaustive exact-identity suites. Each suite runs a fixed battery of
//! checks and counts violations; a passing suite has none.

use serde::Serialize;

use crate::boolfn::{self, BooleanFunctionTable, ProductMeasure};
use crate::config::Configuration;
use crate::decisiontree::{revealment_exact, tree_suite, DecisionTree, TabulatedTarget};
use crate::error::{Error, Result};
use crate::families::{all_monotone, named_monotone, random_function, random_monotone};
use crate::lattice::{BoxRegion, Graph, RectangleRegion};
use crate::percolation::{
    connected, crossing_h, crossing_v, duality_complement_check, exact_probability, explore, influence_sum_bound_exact,
    lexicographic_order, revealment_bound_exact,
};
use crate::randomcluster::{
    conditional_table_defect, fkg_check, graham_grimmett_report, monotonic_osss_suite, monotonicity_check,
    small_instances, stationarity_defect, ExactMeasure, RandomClusterParams,
};
use crate::rng::{derive_seed, replica_rng};
use crate::spectral::{fourier_walsh, gradient_spectrum_check};
use crate::threshold::{covariance_derivative, russo_derivative, talagrand_bound};

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 7] = ["parseval", "russo", "osss-exact", "talagrand", "rcm-exact", "duality", "explore-exact"];

const P_VALUES: [f64; 3] = [0.2, 0.5, 0.8];
const Q_VALUES: [f64; 4] = [1.0, 1.5, 2.0, 4.0];
const RANDOM_FUNCTIONS: usize = 500;
const MAX_DETAILS: usize = 20;
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub checks: u64,
    pub violations: u64,
    /// Largest deviation seen by the suite's tolerance-based checks.
    pub max_error: f64,
    /// The first few violations.
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> Self {
        Self { name: name.to_string(), seed, checks: 0, violations: 0, max_error: 0.0, details: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(detail());
            }
        }
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, detail: impl FnOnce() -> String) {
        let err = (got - want).abs();
        if err.is_finite() {
            self.max_error = self.max_error.max(err);
        }
        self.check(err <= tol, || format!("{}: got {got}, want {want}", detail()));
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "parseval" => parseval(seed),
        "russo" => russo(seed),
        "osss-exact" => osss_exact(seed),
        "talagrand" => talagrand(seed),
        "rcm-exact" => rcm_exact(seed),
        "duality" => duality(seed),
        "explore-exact" => explore_exact(seed),
        _ => Err(Error::Input(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", ")))),
    }
}

fn parseval(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("parseval", seed);
    let mut rng = replica_rng(seed, 0);
    for k in 0..RANDOM_FUNCTIONS {
        let n = 1 + k % 10;
        let f = random_function(n, &mut rng)?;
        let spectrum = fourier_walsh(&f);
        let mean = f.count_ones() as f64 / f.len() as f64;
        r.close(spectrum.energy(), mean, 1e-10, || format!("energy of function {k} (n = {n})"));
        r.close(spectrum.variance(), mean * (1.0 - mean), 1e-10, || format!("variance of function {k} (n = {n})"));
        for i in 0..n {
            let ok = gradient_spectrum_check(&f, i)?;
            r.check(ok, || format!("gradient spectrum of function {k} (n = {n}) at bit {i}"));
        }
    }
    Ok(r)
}

fn monotone_catalogue(max_named: usize) -> Result<Vec<BooleanFunctionTable>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.extend(all_monotone(n)?);
    }
    for n in 1..=max_named {
        out.extend(named_monotone(n)?);
    }
    Ok(out)
}

fn russo(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("russo", seed);
    for (k, f) in monotone_catalogue(12)?.iter().enumerate() {
        for p in P_VALUES {
            let mu = ProductMeasure::new(p, f.n())?;
            let (a, b) = (russo_derivative(f, &mu)?, covariance_derivative(f, &mu)?);
            r.close(a, b, 1e-9, || format!("function {k} (n = {}) at p = {p}", f.n()));
        }
    }
    Ok(r)
}

/// Checks OSSS for `f` against every tree at every `p`.
fn osss_battery(r: &mut SuiteReport, f: &BooleanFunctionTable, trees: &[DecisionTree], label: &str) -> Result<()> {
    let target = TabulatedTarget::new(f)?;
    for p in P_VALUES {
        let mu = ProductMeasure::new(p, f.n())?;
        let variance = boolfn::variance(f, &mu)?;
        let inf = boolfn::influences(f, &mu)?.values;
        for tree in trees {
            let delta = revealment_exact(tree, &target, &mu)?.revealment.values;
            let rhs = p * (1.0 - p) * delta.iter().zip(&inf).map(|(d, i)| d * i).sum::<f64>();
            r.check(variance <= rhs + SLACK, || {
                format!("{label}, tree {}, p = {p}: Var = {variance} > {rhs}", tree.label())
            });
        }
    }
    Ok(())
}

fn osss_exact(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("osss-exact", seed);
    for n in 1..=4 {
        let trees = tree_suite(n, seed)?;
        for (k, f) in all_monotone(n)?.iter().enumerate() {
            osss_battery(&mut r, f, &trees, &format!("monotone #{k} on {n} bits"))?;
        }
    }
    for (stage, n) in [6usize, 8].into_iter().enumerate() {
        let mut rng = replica_rng(seed, 1 + stage as u64);
        for k in 0..RANDOM_FUNCTIONS {
            let f = random_monotone(n, &mut rng)?;
            let trees = tree_suite(n, derive_seed(seed, (n * RANDOM_FUNCTIONS + k) as u64))?;
            osss_battery(&mut r, &f, &trees, &format!("random monotone #{k} on {n} bits"))?;
        }
    }
    Ok(r)
}

fn talagrand(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("talagrand", seed);
    let mut functions = monotone_catalogue(12)?;
    let mut rng = replica_rng(seed, 0);
    for k in 0..RANDOM_FUNCTIONS {
        functions.push(random_function(1 + k % 10, &mut rng)?);
    }
    for (k, f) in functions.iter().enumerate() {
        let rep = talagrand_bound(f, &ProductMeasure::new(0.5, f.n())?)?;
        if rep.bound_sum.is_finite() {
            r.max_error = r.max_error.max(rep.variance - rep.bound_sum);
        }
        r.check(rep.holds_at_half == Some(true), || {
            format!("function {k} (n = {}): Var = {} > {}", f.n(), rep.variance, rep.bound_sum)
        });
    }
    Ok(r)
}

/// Increasing test functions on the edges of a small instance: the
/// instance's crossing event, "at least half the edges open", and the
/// first edge.
fn rcm_functions(name: &str, graph: &Graph) -> Result<Vec<(String, BooleanFunctionTable)>> {
    let m = graph.num_edges();
    let crossing = match name {
        "4-cycle" => BooleanFunctionTable::from_fn(m, |w| w & 0b101 != 0)?,
        "2x2-grid" => {
            let rect = RectangleRegion::new(2, 2)?;
            BooleanFunctionTable::from_fn(m, |w| crossing_h(&rect, &Configuration::from_u64(m, w)).unwrap_or(false))?
        }
        _ => {
            let last = graph.num_vertices() - 1;
            BooleanFunctionTable::from_fn(m, |w| {
                connected(graph, &Configuration::from_u64(m, w), &[0], &[last]).unwrap_or(false)
            })?
        }
    };
    Ok(vec![
        ("crossing".to_string(), crossing.into_monotone()?),
        ("half-open".to_string(), BooleanFunctionTable::from_fn(m, |w| 2 * w.count_ones() as usize >= m)?.into_monotone()?),
        ("first-edge".to_string(), BooleanFunctionTable::dictator(m, 0)?.into_monotone()?),
    ])
}

fn rcm_exact(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("rcm-exact", seed);
    for (name, graph) in small_instances() {
        let m = graph.num_edges();
        let functions = rcm_functions(name, &graph)?;
        let trees = tree_suite(m, seed)?;
        for q in Q_VALUES {
            for p in P_VALUES {
                let at = || format!("{name}, p = {p}, q = {q}");
                let measure = ExactMeasure::new(&graph, RandomClusterParams::new(p, q)?)?;
                if q == 1.0 {
                    let mu = ProductMeasure::new(p, m)?;
                    let gap = (0..1u64 << m).map(|w| (measure.probability(w) - boolfn::ConfigMeasure::weight(&mu, w)).abs()).fold(0.0, f64::max);
                    r.close(gap, 0.0, 1e-12, || format!("{}: product reduction", at()));
                }
                r.close(conditional_table_defect(&measure), 0.0, 1e-10, || format!("{}: heat-bath conditionals", at()));
                r.close(stationarity_defect(&measure), 0.0, 1e-10, || format!("{}: stationarity", at()));
                let mono = monotonicity_check(&measure)?;
                r.check(mono.monotone, || format!("{}: monotonicity witness {:?}", at(), mono.witness));
                for (i, (fname, f)) in functions.iter().enumerate() {
                    for (gname, g) in &functions[i..] {
                        let fkg = fkg_check(&measure, f, g)?;
                        r.check(fkg.holds, || format!("{}: FKG for ({fname}, {gname})", at()));
                    }
                    let gg = graham_grimmett_report(f, &measure)?;
                    r.check(gg.ratio.is_finite(), || format!("{}: Graham-Grimmett ratio for {fname}", at()));
                    for (tree, rep) in trees.iter().zip(monotonic_osss_suite(f, &measure, &trees)?) {
                        r.check(rep.holds, || {
                            format!("{}: OSSS for {fname} with tree {}: {} > {}", at(), tree.label(), rep.variance, rep.rhs)
                        });
                    }
                }
            }
            let marginals: Vec<Vec<f64>> = [0.1, 0.3, 0.5, 0.7, 0.9]
                .iter()
                .map(|&p| Ok(ExactMeasure::new(&graph, RandomClusterParams::new(p, q)?)?.edge_marginals()))
                .collect::<Result<_>>()?;
            for w in marginals.windows(2) {
                for e in 0..m {
                    r.check(w[0][e] < w[1][e], || format!("{name}, q = {q}: marginal of edge {e} not increasing in p"));
                }
            }
        }
    }
    Ok(r)
}

fn duality(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("duality", seed);
    for n in [2usize, 3] {
        let m = RectangleRegion::new(n - 1, n)?.num_edges();
        for w in 0..1u64 << m {
            let ok = duality_complement_check(n, &Configuration::from_u64(m, w))?;
            r.check(ok, || format!("R({}, {n}): configuration {w:#b}", n - 1));
        }
        let rect = RectangleRegion::new(n - 1, n)?;
        let half = exact_probability(m, 0.5, |c| crossing_v(&rect, c).unwrap_or(false))?;
        r.close(half, 0.5, 1e-12, || format!("P_1/2[V({}, {n})]", n - 1));
    }
    Ok(r)
}

fn explore_exact(seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("explore-exact", seed);
    let region = BoxRegion::new(2, 1)?;
    let m = region.num_edges();
    let order = lexicographic_order(&region);
    let reversed: Vec<usize> = order.iter().rev().copied().collect();
    for w in 0..1u64 << m {
        let omega = Configuration::from_u64(m, w);
        let truth = connected(region.graph(), &omega, &[region.origin()], &region.boundary(1))?;
        for ord in [&order, &reversed] {
            let t = explore(&region, 1, &omega, ord)?;
            r.check(t.value == truth, || format!("exploration value at {w:#b}"));
        }
    }
    for p in [0.3, 0.5, 0.7] {
        let rep = revealment_bound_exact(1, 1, p, &order)?;
        r.check(rep.holds, || format!("revealment bound on the unit box at p = {p}"));
        let inf = influence_sum_bound_exact(1, p)?;
        r.check(inf.holds, || format!("influence-sum bound on the unit box at p = {p}: {} < {}", inf.lhs, inf.rhs));
    }
    Ok(r)
}
