//! One-arm probabilities `θ_n(p) = P_p[0 ↔ ∂Λ_n]` and their partial sums
//! `S_n = Σ_{k<n} θ_k`.
//!
//! A single sweep on `Λ_N` gives `θ_n` for every `n ≤ N` at once: the
//! origin reaches `∂Λ_n` inside `Λ_N` exactly when its open cluster has
//! sup-norm radius at least `n`, and any such path stays in `Λ_n` up to its
//! first visit of `∂Λ_n`. We track the radius of every union-find root.

use rand::seq::SliceRandom;

use crate::curve::SweepCurve;
use crate::error::{Error, Result};
use crate::lattice::BoxRegion;
use crate::rng::run_replicas;
use crate::stats::Moments;
use crate::threshold::CurveFamily;

use super::sweep::{binomial_tail, log_factorials, reset_order, validate_grid};
use super::unionfind::UnionFind;

/// `θ_n` and `S_n` for `n = 0..=N` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSweep {
    pub dimension: usize,
    pub max_n: usize,
    /// `theta[n]` is the curve of `θ_n`; `θ_0 = 1`.
    pub theta: Vec<SweepCurve>,
    /// `partial_sums[n]` is the curve of `S_n`; `S_0 = 0`.
    pub partial_sums: Vec<SweepCurve>,
}

impl ThetaSweep {
    pub fn grid(&self) -> &[f64] {
        &self.theta[0].p
    }

    pub fn theta(&self, n: usize) -> Option<&SweepCurve> {
        self.theta.get(n)
    }

    pub fn partial_sum(&self, n: usize) -> Option<&SweepCurve> {
        self.partial_sums.get(n)
    }

    /// The `θ_n` curves as a family indexed by `n`.
    pub fn family(&self) -> Result<CurveFamily> {
        let mut fam = CurveFamily::new(self.grid().to_vec())?;
        for (n, c) in self.theta.iter().enumerate() {
            fam.insert(n, c.estimate.clone(), c.stderr.clone())?;
        }
        Ok(fam)
    }
}

/// Hitting counts per level for one replica: `hits[n]` is the number of
/// open edges when the origin first reaches `∂Λ_n`.
fn one_arm_hits(region: &BoxRegion, radius: &[u32], uf: &mut UnionFind, order: &[usize], root_radius: &mut [u32]) -> Vec<u32> {
    let n_max = region.radius();
    let origin = region.origin();
    uf.reset();
    root_radius.copy_from_slice(radius);
    let mut hits = vec![u32::MAX; n_max + 1];
    hits[0] = 0;
    let mut reached = 0usize;
    for (k, &e) in order.iter().enumerate() {
        let (u, v) = region.graph().edge(e);
        let (ru, rv) = (uf.find(u), uf.find(v));
        if let Some(root) = uf.union(ru, rv) {
            root_radius[root] = root_radius[ru].max(root_radius[rv]);
            let r0 = uf.find(origin);
            let now = root_radius[r0] as usize;
            while reached < now {
                reached += 1;
                hits[reached] = (k + 1) as u32;
            }
            if reached == n_max {
                break;
            }
        }
    }
    hits
}

/// Newman-Ziff estimate of `θ_n(p)` for all `n ≤ max_n` in dimension `d`.
pub fn theta_sweep(d: usize, max_n: usize, p_grid: &[f64], replicas: u64, seed: u64) -> Result<ThetaSweep> {
    validate_grid(p_grid)?;
    if max_n == 0 {
        return Err(Error::Input("need a box radius of at least 1".into()));
    }
    if replicas < 2 {
        return Err(Error::Input("at least two replicas are required".into()));
    }
    let region = BoxRegion::new(d, max_n)?;
    let m = region.num_edges();
    let radius: Vec<u32> = (0..region.graph().num_vertices()).map(|v| region.sup_norm(v) as u32).collect();
    let hits = run_replicas(
        replicas,
        seed,
        || (UnionFind::new(region.graph().num_vertices()), (0..m).collect::<Vec<usize>>(), radius.clone()),
        |(uf, order, root_radius), rng, _| {
            reset_order(order);
            order.shuffle(rng);
            one_arm_hits(&region, &radius, uf, order, root_radius)
        },
    );
    let log_fact = log_factorials(m);
    let levels = max_n + 1;
    let mut theta_est = vec![Vec::with_capacity(p_grid.len()); levels];
    let mut theta_se = vec![Vec::with_capacity(p_grid.len()); levels];
    let mut sum_est = vec![Vec::with_capacity(p_grid.len()); levels];
    let mut sum_se = vec![Vec::with_capacity(p_grid.len()); levels];
    for &p in p_grid {
        let tail = binomial_tail(m, p, &log_fact);
        let mut th = vec![Moments::default(); levels];
        let mut sm = vec![Moments::default(); levels];
        for h in &hits {
            let mut acc = 0.0;
            for n in 0..levels {
                sm[n].push(acc);
                let g = if h[n] == u32::MAX { 0.0 } else { tail[h[n] as usize] };
                th[n].push(g);
                acc += g;
            }
        }
        for n in 0..levels {
            let (t, s) = (th[n].estimate(), sm[n].estimate());
            theta_est[n].push(t.value.clamp(0.0, 1.0));
            theta_se[n].push(t.stderr);
            sum_est[n].push(s.value);
            sum_se[n].push(s.stderr);
        }
    }
    let mut theta = Vec::with_capacity(levels);
    let mut partial_sums = Vec::with_capacity(levels);
    for n in 0..levels {
        theta.push(SweepCurve::new(p_grid.to_vec(), std::mem::take(&mut theta_est[n]), std::mem::take(&mut theta_se[n]), replicas, seed)?);
        partial_sums.push(SweepCurve::new(p_grid.to_vec(), std::mem::take(&mut sum_est[n]), std::mem::take(&mut sum_se[n]), replicas, seed)?);
    }
    Ok(ThetaSweep { dimension: d, max_n, theta, partial_sums })
}

/// `θ_n` curves for the requested radii, from one sweep at the largest.
pub fn theta_curve(d: usize, n_list: &[usize], p_grid: &[f64], replicas: u64, seed: u64) -> Result<ThetaSweep> {
    if n_list.iter().any(|&n| n == 0) {
        return Err(Error::Input("radii must be at least 1 (θ_0 = 1 by convention)".into()));
    }
    let max_n = n_list.iter().copied().max().ok_or_else(|| Error::Input("empty radius list".into()))?;
    theta_sweep(d, max_n, p_grid, replicas, seed)
}
