//! Sampling, connectivity, crossings and planar duality.

use std::collections::VecDeque;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{dual_configuration, DualMap, Graph, RectangleRegion};
use crate::rng::replica_rng;

use super::unionfind::UnionFind;

/// Largest edge count for exhaustive enumeration over configurations.
pub const MAX_ENUMERATION_EDGES: usize = 24;

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} is not a probability")));
    }
    Ok(())
}

fn check_len(graph: &Graph, omega: &Configuration) -> Result<()> {
    if omega.len() != graph.num_edges() {
        return Err(Error::SizeMismatch { expected: graph.num_edges(), actual: omega.len() });
    }
    Ok(())
}

fn check_sets(graph: &Graph, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("connection sets must be nonempty".into()));
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| v >= graph.num_vertices()) {
        return Err(Error::Input(format!("vertex {v} outside the region")));
    }
    Ok(())
}

/// Bernoulli(`p`) configuration on the edges of `graph`, from stream 0 of
/// `seed`.
pub fn sample(graph: &Graph, p: f64, seed: u64) -> Result<Configuration> {
    check_p(p)?;
    Ok(Configuration::bernoulli(graph.num_edges(), p, &mut replica_rng(seed, 0)))
}

/// Union-find over the open edges of `ω`.
pub fn open_clusters(graph: &Graph, omega: &Configuration) -> Result<UnionFind> {
    check_len(graph, omega)?;
    let mut uf = UnionFind::new(graph.num_vertices());
    for e in omega.iter_ones() {
        let (u, v) = graph.edge(e);
        uf.union(u, v);
    }
    Ok(uf)
}

/// `A ↔ B`: some open path joins a vertex of `a` to a vertex of `b`.
pub fn connected(graph: &Graph, omega: &Configuration, a: &[usize], b: &[usize]) -> Result<bool> {
    check_sets(graph, a, b)?;
    let mut uf = open_clusters(graph, omega)?;
    let mut roots: Vec<usize> = a.iter().map(|&v| uf.find(v)).collect();
    roots.sort_unstable();
    Ok(b.iter().any(|&v| {
        let r = uf.find(v);
        roots.binary_search(&r).is_ok()
    }))
}

/// Breadth-first search version of [`connected`].
pub fn connected_bfs(graph: &Graph, omega: &Configuration, a: &[usize], b: &[usize]) -> Result<bool> {
    check_sets(graph, a, b)?;
    check_len(graph, omega)?;
    let inc = graph.incidence();
    let mut seen = vec![false; graph.num_vertices()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &v in a {
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let mut target = vec![false; graph.num_vertices()];
    b.iter().for_each(|&v| target[v] = true);
    while let Some(x) = queue.pop_front() {
        if target[x] {
            return Ok(true);
        }
        for &e in &inc[x] {
            if !omega.get(e) {
                continue;
            }
            let (u, v) = graph.edge(e);
            let y = if u == x { v } else { u };
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    Ok(false)
}

/// `H(n, m)`: an open left-right crossing using edges of the rectangle.
pub fn crossing_h(rect: &RectangleRegion, omega: &Configuration) -> Result<bool> {
    connected(rect.graph(), omega, &rect.left(), &rect.right())
}

/// `V(n, m)`: an open bottom-top crossing using edges of the rectangle.
pub fn crossing_v(rect: &RectangleRegion, omega: &Configuration) -> Result<bool> {
    connected(rect.graph(), omega, &rect.bottom(), &rect.top())
}

/// Top-bottom crossing of the dual graph by open dual edges.
pub fn dual_crossing_tb(dual: &DualMap, omega_star: &Configuration) -> Result<bool> {
    connected(dual.graph(), omega_star, &dual.top(), &dual.bottom())
}

/// Exactly one of `H(n−1, n)` in `ω` and a top-bottom dual crossing in
/// `ω*` occurs.
pub fn duality_complement_check(n: usize, omega: &Configuration) -> Result<bool> {
    if n < 2 {
        return Err(Error::Input(format!("R(n-1, n) needs n >= 2, got {n}")));
    }
    let rect = RectangleRegion::new(n - 1, n)?;
    let dual = DualMap::for_rectangle(&rect);
    let primal = crossing_h(&rect, omega)?;
    let star = dual_configuration(&dual, omega)?;
    Ok(primal != dual_crossing_tb(&dual, &star)?)
}

/// `P_p[event]` by summing over all `2^m` configurations.
pub fn exact_probability(m: usize, p: f64, event: impl Fn(&Configuration) -> bool) -> Result<f64> {
    check_p(p)?;
    if m > MAX_ENUMERATION_EDGES {
        return Err(Error::TooLarge { what: format!("enumeration over {m} edges"), cap: MAX_ENUMERATION_EDGES });
    }
    let weights: Vec<f64> = (0..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect();
    Ok((0..1u64 << m)
        .map(|w| {
            let c = Configuration::from_u64(m, w);
            if event(&c) { weights[w.count_ones() as usize] } else { 0.0 }
        })
        .sum())
}

/// `(E[fg], E[f], E[g])` under the product measure, by enumeration.
pub fn product_correlation(
    m: usize,
    p: f64,
    f: impl Fn(&Configuration) -> bool,
    g: impl Fn(&Configuration) -> bool,
) -> Result<(f64, f64, f64)> {
    let fg = exact_probability(m, p, |c| f(c) && g(c))?;
    Ok((fg, exact_probability(m, p, &f)?, exact_probability(m, p, &g)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoxRegion;

    #[test]
    fn sample_extremes_and_fraction() {
        let g = Graph::path(100_000).unwrap();
        assert_eq!(sample(&g, 0.0, 1).unwrap().count_ones(), 0);
        assert_eq!(sample(&g, 1.0, 1).unwrap().count_ones(), 100_000);
        let k = sample(&g, 0.5, 1).unwrap().count_ones() as u64;
        assert!(crate::stats::wilson_contains(k, 100_000, 0.5, 3.0));
        assert_eq!(sample(&g, 0.5, 4).unwrap(), sample(&g, 0.5, 4).unwrap());
        assert!(sample(&g, 1.5, 1).is_err());
    }

    #[test]
    fn connected_trivial_cases() {
        let b = BoxRegion::new(2, 2).unwrap();
        let g = b.graph();
        let all = Configuration::ones(g.num_edges());
        let none = Configuration::zeros(g.num_edges());
        assert!(connected(g, &all, &[0], &[24]).unwrap());
        assert!(!connected(g, &none, &[0, 1], &[24, 23]).unwrap());
        assert!(connected(g, &none, &[0, 5], &[5]).unwrap());
        assert!(connected(g, &all, &[], &[5]).is_err());
    }

    #[test]
    fn straight_row_crosses() {
        let r = RectangleRegion::new(3, 2).unwrap();
        let mut omega = Configuration::zeros(r.num_edges());
        for x in 0..3 {
            omega.set(r.edge_between((x, 0), (x + 1, 0)).unwrap(), true);
        }
        assert!(crossing_h(&r, &omega).unwrap());
        assert!(!crossing_v(&r, &omega).unwrap());
        let none = Configuration::zeros(r.num_edges());
        assert!(!crossing_h(&r, &none).unwrap() && !crossing_v(&r, &none).unwrap());
    }

    #[test]
    fn duality_on_every_configuration_of_r12() {
        let m = RectangleRegion::new(1, 2).unwrap().num_edges();
        assert_eq!(m, 7);
        for w in 0..1u64 << m {
            assert!(duality_complement_check(2, &Configuration::from_u64(m, w)).unwrap(), "ω = {w:07b}");
        }
        assert!(duality_complement_check(2, &Configuration::ones(m)).unwrap());
        assert!(duality_complement_check(2, &Configuration::zeros(m)).unwrap());
    }

    #[test]
    fn r12_crossing_probabilities_at_half() {
        let r = RectangleRegion::new(1, 2).unwrap();
        let v = exact_probability(7, 0.5, |c| crossing_v(&r, c).unwrap()).unwrap();
        assert_eq!(v, 0.5);
        // the short crossing: any one of the three rungs
        let h = exact_probability(7, 0.5, |c| crossing_h(&r, c).unwrap()).unwrap();
        assert_eq!(h, 7.0 / 8.0);
    }

    #[test]
    fn fkg_on_r22() {
        let r = RectangleRegion::new(2, 2).unwrap();
        let m = r.num_edges();
        for p in [0.3, 0.5, 0.7] {
            let (fg, f, g) = product_correlation(m, p, |c| crossing_h(&r, c).unwrap(), |c| crossing_v(&r, c).unwrap()).unwrap();
            assert!(fg >= f * g - 1e-15);
            for e in 0..m {
                let (fg, f, g) = product_correlation(m, p, |c| crossing_h(&r, c).unwrap(), |c| c.get(e)).unwrap();
                assert!(fg >= f * g - 1e-15, "edge {e}");
            }
        }
    }

    #[test]
    fn bfs_agrees_with_union_find() {
        use rand::Rng;
        let mut rng = replica_rng(11, 0);
        for _ in 0..500 {
            let r = RectangleRegion::new(rng.gen_range(1..6), rng.gen_range(1..6)).unwrap();
            let g = r.graph();
            let omega = Configuration::bernoulli(g.num_edges(), rng.gen_range(0.0..1.0), &mut rng);
            let a = vec![rng.gen_range(0..g.num_vertices())];
            let b = vec![rng.gen_range(0..g.num_vertices()), rng.gen_range(0..g.num_vertices())];
            assert_eq!(connected(g, &omega, &a, &b).unwrap(), connected_bfs(g, &omega, &a, &b).unwrap());
        }
    }
}
