//! Newman-Ziff sweeps: open the edges one at a time in a uniformly random
//! order, record when an increasing event first holds, and reweight the
//! hitting counts binomially to get `f(p)` on a whole grid at once.

use rand::seq::SliceRandom;

use crate::config::Configuration;
use crate::curve::SweepCurve;
use crate::error::{Error, Result};
use crate::lattice::Graph;
use crate::rng::run_replicas;
use crate::stats::{proportion, wilson, Moments};

use super::unionfind::UnionFind;

/// An increasing event evaluated while edges open one at a time.
pub trait IncrementalEvent {
    /// Back to the all-closed configuration.
    fn reset(&mut self);

    fn open_edge(&mut self, e: usize);

    fn holds(&mut self) -> bool;
}

/// `A ↔ B` in a fixed graph.
#[derive(Debug, Clone)]
pub struct ConnectionEvent<'g> {
    graph: &'g Graph,
    a: Vec<usize>,
    b: Vec<usize>,
    uf: UnionFind,
}

impl<'g> ConnectionEvent<'g> {
    pub fn new(graph: &'g Graph, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Input("connection sets must be nonempty".into()));
        }
        if a.iter().chain(&b).any(|&v| v >= graph.num_vertices()) {
            return Err(Error::Input("connection set vertex outside the graph".into()));
        }
        let mut ev = Self { graph, a, b, uf: UnionFind::new(graph.num_vertices() + 2) };
        ev.reset();
        Ok(ev)
    }
}

impl IncrementalEvent for ConnectionEvent<'_> {
    fn reset(&mut self) {
        self.uf.reset();
        let (src, dst) = (self.graph.num_vertices(), self.graph.num_vertices() + 1);
        for &v in &self.a {
            self.uf.union(src, v);
        }
        for &v in &self.b {
            self.uf.union(dst, v);
        }
    }

    fn open_edge(&mut self, e: usize) {
        let (u, v) = self.graph.edge(e);
        self.uf.union(u, v);
    }

    fn holds(&mut self) -> bool {
        let n = self.graph.num_vertices();
        self.uf.same(n, n + 1)
    }
}

/// At least `threshold` edges are open.
#[derive(Debug, Clone)]
pub struct CountEvent {
    pub threshold: usize,
    open: usize,
}

impl CountEvent {
    pub fn new(threshold: usize) -> Self {
        Self { threshold, open: 0 }
    }
}

impl IncrementalEvent for CountEvent {
    fn reset(&mut self) {
        self.open = 0;
    }

    fn open_edge(&mut self, _e: usize) {
        self.open += 1;
    }

    fn holds(&mut self) -> bool {
        self.open >= self.threshold
    }
}

/// `ln k!` for `k = 0..=m`.
pub fn log_factorials(m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=m {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `P[Bin(m, p) = k]` for `k = 0..=m`, computed in log space and
/// renormalized to sum to 1.
pub fn binomial_weights(m: usize, p: f64, log_fact: &[f64]) -> Vec<f64> {
    assert!(log_fact.len() > m, "log-factorial table too short");
    let mut w = vec![0.0; m + 1];
    if p <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if p >= 1.0 {
        w[m] = 1.0;
        return w;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let logs: Vec<f64> =
        (0..=m).map(|k| log_fact[m] - log_fact[k] - log_fact[m - k] + k as f64 * lp + (m - k) as f64 * lq).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (wk, &l) in w.iter_mut().zip(&logs) {
        let x = l - top;
        *wk = if x < -745.0 { 0.0 } else { x.exp() };
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// `P[Bin(m, p) ≥ k]` for `k = 0..=m + 1`.
pub fn binomial_tail(m: usize, p: f64, log_fact: &[f64]) -> Vec<f64> {
    let w = binomial_weights(m, p, log_fact);
    let mut tail = vec![0.0; m + 2];
    for k in (0..=m).rev() {
        tail[k] = tail[k + 1] + w[k];
    }
    tail.iter_mut().for_each(|t| *t = t.min(1.0));
    tail
}

/// Scratch edge orders are reused across replicas; each replica must start
/// from the identity so its shuffle depends on its own stream only.
pub(crate) fn reset_order(order: &mut [usize]) {
    order.iter_mut().enumerate().for_each(|(i, x)| *x = i);
}

/// Per-replica number of open edges at which the event first holds
/// (`None` if it never does).
pub fn hitting_counts<E, F>(num_edges: usize, make_event: F, replicas: u64, seed: u64) -> Result<Vec<Option<usize>>>
where
    E: IncrementalEvent,
    F: Fn() -> E + Sync,
{
    let results = run_replicas(
        replicas,
        seed,
        || (make_event(), (0..num_edges).collect::<Vec<usize>>()),
        |(event, order), rng, r| -> Result<Option<usize>> {
            reset_order(order);
            order.shuffle(rng);
            event.reset();
            let mut hit = event.holds().then_some(0);
            for (k, &e) in order.iter().enumerate() {
                event.open_edge(e);
                let now = event.holds();
                match (hit, now) {
                    (None, true) => hit = Some(k + 1),
                    (Some(h), false) => {
                        return Err(Error::Contract(format!(
                            "event turned off after {} openings having held at {h} (replica {r})",
                            k + 1
                        )))
                    }
                    _ => {}
                }
            }
            Ok(hit)
        },
    );
    results.into_iter().collect()
}

/// Turns hitting counts into `f(p) = mean_r P[Bin(m, p) ≥ h_r]` with the
/// replica standard error.
pub fn curve_from_hits(hits: &[Option<usize>], num_edges: usize, p_grid: &[f64], seed: u64) -> Result<SweepCurve> {
    validate_grid(p_grid)?;
    let log_fact = log_factorials(num_edges);
    let mut estimate = Vec::with_capacity(p_grid.len());
    let mut stderr = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let tail = binomial_tail(num_edges, p, &log_fact);
        let mut m = Moments::default();
        hits.iter().for_each(|h| m.push(h.map_or(0.0, |h| tail[h])));
        let e = m.estimate();
        estimate.push(e.value.clamp(0.0, 1.0));
        stderr.push(e.stderr);
    }
    SweepCurve::new(p_grid.to_vec(), estimate, stderr, hits.len() as u64, seed)
}

pub(crate) fn validate_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() {
        return Err(Error::Input("empty p grid".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("grid value {p} is not a probability")));
    }
    Ok(())
}

/// Newman-Ziff estimate of `p ↦ P_p[event]` over `num_edges` edges.
pub fn newman_ziff_sweep<E, F>(num_edges: usize, make_event: F, p_grid: &[f64], replicas: u64, seed: u64) -> Result<SweepCurve>
where
    E: IncrementalEvent,
    F: Fn() -> E + Sync,
{
    validate_grid(p_grid)?;
    if replicas == 0 {
        return Err(Error::Input("at least one replica is required".into()));
    }
    let hits = hitting_counts(num_edges, make_event, replicas, seed)?;
    curve_from_hits(&hits, num_edges, p_grid, seed)
}

/// Direct Monte Carlo curve: fresh Bernoulli(`p`) samples at each grid
/// point. Keeps the raw success counts for Wilson intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSweep {
    pub curve: SweepCurve,
    pub successes: Vec<u64>,
}

impl DirectSweep {
    /// Whether an independent estimate `other` agrees at grid point `j`
    /// within `sigmas`, combining its standard error with the Wilson
    /// half-width of this sweep.
    pub fn agrees_with(&self, j: usize, other_value: f64, other_stderr: f64, sigmas: f64) -> bool {
        let (c, h) = wilson(self.successes[j], self.curve.replicas, sigmas);
        (other_value - c).abs() <= (h * h + (sigmas * other_stderr).powi(2)).sqrt() + 1e-12
    }
}

pub fn direct_sweep<F>(num_edges: usize, event: F, p_grid: &[f64], replicas: u64, seed: u64) -> Result<DirectSweep>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    validate_grid(p_grid)?;
    if replicas == 0 {
        return Err(Error::Input("at least one replica is required".into()));
    }
    let rows = run_replicas(replicas, seed, || (), |_, rng, _| {
        p_grid.iter().map(|&p| event(&Configuration::bernoulli(num_edges, p, rng))).collect::<Vec<bool>>()
    });
    let successes: Vec<u64> =
        (0..p_grid.len()).map(|j| rows.iter().filter(|row| row[j]).count() as u64).collect();
    let est: Vec<_> = successes.iter().map(|&s| proportion(s, replicas)).collect();
    let curve = SweepCurve::new(
        p_grid.to_vec(),
        est.iter().map(|e| e.value).collect(),
        est.iter().map(|e| e.stderr).collect(),
        replicas,
        seed,
    )?;
    Ok(DirectSweep { curve, successes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RectangleRegion;
    use crate::percolation::crossing_h;

    #[test]
    fn independent_of_thread_count() {
        let r = RectangleRegion::new(5, 5).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                hitting_counts(r.num_edges(), || ConnectionEvent::new(r.graph(), r.left(), r.right()).unwrap(), 500, 9).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn weights_sum_to_one_and_match_closed_form() {
        let lf = log_factorials(2000);
        for (m, p) in [(10usize, 0.3), (2000, 0.01), (2000, 0.5), (7, 0.0), (7, 1.0)] {
            let w = binomial_weights(m, p, &lf);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let w = binomial_weights(4, 0.25, &lf);
        let exact = [81.0 / 256.0, 108.0 / 256.0, 54.0 / 256.0, 12.0 / 256.0, 1.0 / 256.0];
        for (a, b) in w.iter().zip(exact) {
            assert!((a - b).abs() < 1e-14);
        }
        let t = binomial_tail(4, 0.25, &lf);
        assert!((t[0] - 1.0).abs() < 1e-15 && t[5] == 0.0);
    }

    #[test]
    fn at_least_one_edge() {
        let m = 12;
        let grid = [0.0, 0.05, 0.1, 0.3, 1.0];
        let c = newman_ziff_sweep(m, || CountEvent::new(1), &grid, 200, 3).unwrap();
        for (j, &p) in grid.iter().enumerate() {
            // hitting count is always exactly 1, so the estimate is exact
            assert!((c.estimate[j] - (1.0 - (1.0 - p).powi(m as i32))).abs() < 1e-12);
        }
    }

    #[test]
    fn all_edges_open() {
        let m = 9;
        let grid = [0.2, 0.5, 0.9];
        let c = newman_ziff_sweep(m, || CountEvent::new(m), &grid, 50, 3).unwrap();
        for (j, &p) in grid.iter().enumerate() {
            assert!((c.estimate[j] - p.powi(m as i32)).abs() < 1e-12);
            assert!(c.stderr[j] < 1e-12);
        }
    }

    struct Flicker(usize);

    impl IncrementalEvent for Flicker {
        fn reset(&mut self) {
            self.0 = 0;
        }
        fn open_edge(&mut self, _e: usize) {
            self.0 += 1;
        }
        fn holds(&mut self) -> bool {
            self.0 == 2
        }
    }

    #[test]
    fn decreasing_event_is_a_contract_violation() {
        let err = newman_ziff_sweep(5, || Flicker(0), &[0.5], 3, 1).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn sweep_is_reproducible() {
        let r = RectangleRegion::new(4, 3).unwrap();
        let make = || ConnectionEvent::new(r.graph(), r.left(), r.right()).unwrap();
        let a = newman_ziff_sweep(r.num_edges(), make, &[0.3, 0.5], 100, 8).unwrap();
        let b = newman_ziff_sweep(r.num_edges(), make, &[0.3, 0.5], 100, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn crossing_sweep_matches_direct() {
        let r = RectangleRegion::new(6, 3).unwrap();
        let grid = [0.4, 0.5, 0.6];
        let nz = newman_ziff_sweep(r.num_edges(), || ConnectionEvent::new(r.graph(), r.left(), r.right()).unwrap(), &grid, 4000, 1)
            .unwrap();
        let direct = direct_sweep(r.num_edges(), |c| crossing_h(&r, c).unwrap(), &grid, 4000, 2).unwrap();
        for j in 0..grid.len() {
            assert!(direct.agrees_with(j, nz.estimate[j], nz.stderr[j], 3.0), "p = {}", grid[j]);
        }
        assert!(nz.monotonicity_violations(3.0).is_empty());
    }
}
