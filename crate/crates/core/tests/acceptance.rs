//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p sharp-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use sharp_core::curve::linspace;
use sharp_core::graphprops::{threshold_experiment, GraphProperty, RandomGraphSpec};
use sharp_core::percolation::{
    connected, crossing_direct, crossing_sweep, direct_sweep, influence_sum_bound_exact, influence_sum_bound_mc,
    lexicographic_order, revealment_bound_exact, revealment_bound_mc, theta_curve, theta_sweep, Direction,
};
use sharp_core::randomcluster::{run_chain, small_instances, ExactMeasure, RandomClusterParams, DEFAULT_BURN_IN};
use sharp_core::threshold::{critical_estimator, crossing_point, window_from_curve};
use sharp_core::{run_suite, BoxRegion, Configuration, RectangleRegion, Result, SweepCurve};

const SIGMAS: f64 = 3.0;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn info(&mut self, line: String) {
        self.lines.push(format!("info {line}"));
    }
}

/// Direct Monte Carlo agreement with a Newman-Ziff curve at every grid point.
fn agree_rect(out: &mut Outcome, rect: &RectangleRegion, dir: Direction, nz: &SweepCurve, replicas: u64, seed: u64) -> Result<()> {
    let direct = crossing_direct(rect, dir, &nz.p, replicas, seed)?;
    for j in 0..nz.len() {
        let ok = direct.agrees_with(j, nz.estimate[j], nz.stderr[j], SIGMAS);
        out.check(
            ok,
            format!(
                "{} at p = {}: sweep {:.4} vs direct {:.4} ({replicas} samples)",
                dir.event_name(rect),
                nz.p[j],
                nz.estimate[j],
                direct.curve.estimate[j]
            ),
        );
    }
    Ok(())
}

fn exact_suites() -> Result<Outcome> {
    let mut out = Outcome::new();
    for name in ["parseval", "russo", "osss-exact", "talagrand"] {
        let r = run_suite(name, 1)?;
        out.check(
            r.passed(),
            format!("{name}: {} checks, {} violations, max error {:.1e}", r.checks, r.violations, r.max_error),
        );
    }
    Ok(out)
}

fn duality() -> Result<Outcome> {
    let mut out = Outcome::new();
    let r = run_suite("duality", 1)?;
    out.check(
        r.passed(),
        format!("complement identity on all configurations of R(1,2) and R(2,3), exact P[V] = 1/2: {} checks", r.checks),
    );
    for (i, n) in [8usize, 16, 32].into_iter().enumerate() {
        let rect = RectangleRegion::new(n - 1, n)?;
        let c = crossing_sweep(&rect, Direction::Vertical, &[0.5], 100_000, 20 + i as u64)?;
        let e = c.point(0);
        out.check(
            e.within_sigmas(0.5, SIGMAS),
            format!("P_1/2[V({}, {n})] = {:.4} ± {:.4}", n - 1, e.value, e.stderr),
        );
        agree_rect(&mut out, &rect, Direction::Vertical, &c, 20_000, 120 + i as u64)?;
    }
    Ok(out)
}

fn rsw() -> Result<Outcome> {
    let mut out = Outcome::new();
    for (i, n) in [8usize, 16].into_iter().enumerate() {
        let rect = RectangleRegion::new(2 * n, 3 * n)?;
        let c = crossing_sweep(&rect, Direction::Vertical, &[0.5], 10_000, 30 + i as u64)?;
        let e = c.point(0);
        let low = e.value - SIGMAS * e.stderr;
        out.check(low > 1.0 / 128.0, format!("P_1/2[V({}, {})] = {:.4} ± {:.4}, lower bound {low:.4} > 1/128", 2 * n, 3 * n, e.value, e.stderr));
        agree_rect(&mut out, &rect, Direction::Vertical, &c, 10_000, 130 + i as u64)?;
    }
    Ok(out)
}

fn sharp_crossing() -> Result<Outcome> {
    let mut out = Outcome::new();
    let n = 64;
    let rect = RectangleRegion::new(2 * n, n)?;
    let c = crossing_sweep(&rect, Direction::Horizontal, &[0.4, 0.6], 10_000, 40)?;
    out.check(c.estimate[0] <= 0.1, format!("P_0.4[H(128, 64)] = {:.2e} <= 0.1", c.estimate[0]));
    out.check(c.estimate[1] >= 0.9, format!("P_0.6[H(128, 64)] = {:.6} >= 0.9", c.estimate[1]));
    agree_rect(&mut out, &rect, Direction::Horizontal, &c, 10_000, 140)?;
    Ok(out)
}

fn subcritical_decay() -> Result<Outcome> {
    let mut out = Outcome::new();
    let ns = [4usize, 8, 16, 32];
    let s = theta_curve(2, &ns, &[0.4], 10_000, 50)?;
    let th: Vec<f64> = ns.iter().map(|&n| s.theta(n).expect("level computed").estimate[0]).collect();
    for w in 0..ns.len() - 1 {
        let ratio = th[w + 1] / th[w];
        out.check(ratio <= 0.6, format!("θ_{}(0.4) / θ_{}(0.4) = {:.4} / {:.4} = {ratio:.3} <= 0.6", ns[w + 1], ns[w], th[w + 1], th[w]));
    }
    out.check(th[3] <= 0.05, format!("θ_32(0.4) = {:.2e} <= 0.05", th[3]));
    let region = BoxRegion::new(2, 8)?;
    for (j, n) in [4usize, 8].into_iter().enumerate() {
        let boundary = region.boundary(n);
        let direct = direct_sweep(
            region.num_edges(),
            |c: &Configuration| connected(region.graph(), c, &[region.origin()], &boundary).expect("sized sample"),
            &[0.4],
            20_000,
            150 + j as u64,
        )?;
        let e = s.theta(n).expect("level computed").point(0);
        out.check(
            direct.agrees_with(0, e.value, e.stderr, SIGMAS),
            format!("θ_{n}(0.4): sweep {:.4} vs direct {:.4}", e.value, direct.curve.estimate[0]),
        );
    }
    Ok(out)
}

fn critical_point() -> Result<Outcome> {
    let mut out = Outcome::new();
    let start = Instant::now();
    let s = theta_sweep(2, 32, &linspace(0.3, 0.7, 41), 10_000, 60)?;
    let fam = s.family()?;
    let est = critical_estimator(&fam, 43.0 / 48.0)?;
    out.check(
        !est.right_censored && (0.45..=0.55).contains(&est.x_hat),
        format!("p̂_c = {:.4} in [0.45, 0.55] (level 43/48, N = 32, {:.1} s)", est.x_hat, start.elapsed().as_secs_f64()),
    );
    let literal = critical_estimator(&fam, 1.0)?;
    out.info(format!("at level 1 the estimate is {:.3} (right censored: {})", literal.x_hat, literal.right_censored));
    Ok(out)
}

fn random_cluster() -> Result<Outcome> {
    let mut out = Outcome::new();
    let r = run_suite("rcm-exact", 1)?;
    out.check(
        r.passed(),
        format!(
            "conditionals, stationarity, monotonicity, FKG, Graham-Grimmett, monotonic OSSS: {} checks, {} violations, max error {:.1e}",
            r.checks, r.violations, r.max_error
        ),
    );
    for (name, graph) in small_instances().into_iter().filter(|(n, _)| *n != "3-path") {
        for (i, q) in [1.0, 2.0, 4.0].into_iter().enumerate() {
            let params = RandomClusterParams::new(0.5, q)?;
            let exact = ExactMeasure::new(&graph, params)?.edge_marginals();
            let chain = run_chain(&graph, params, 100_000, DEFAULT_BURN_IN, 70 + i as u64);
            let gap = exact.iter().zip(&chain.marginals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            out.check(gap <= 0.02, format!("{name}, q = {q}: sampler marginals within {gap:.4} of exact (<= 0.02)"));
        }
    }
    Ok(out)
}

fn revealment() -> Result<Outcome> {
    let mut out = Outcome::new();
    let unit = BoxRegion::new(2, 1)?;
    let two = BoxRegion::new(2, 2)?;
    for (i, p) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let rep = revealment_bound_exact(1, 1, p, &lexicographic_order(&unit))?;
        out.check(rep.holds, format!("revealment bound, unit box, k = 1, p = {p}: exact over 4096 configurations"));
        for k in [1usize, 2] {
            let rep = revealment_bound_mc(2, k, p, &lexicographic_order(&two), 20_000, 80 + 10 * i as u64 + k as u64, SIGMAS)?;
            out.check(rep.holds, format!("revealment bound, radius-2 box, k = {k}, p = {p}: Monte Carlo within 3σ"));
        }
        let inf = influence_sum_bound_exact(1, p)?;
        out.check(inf.holds, format!("influence sum, unit box, p = {p}: {:.4} >= {:.4} (exact)", inf.lhs, inf.rhs));
        let inf = influence_sum_bound_mc(2, p, 20_000, 90 + i as u64, SIGMAS)?;
        out.check(inf.holds, format!("influence sum, radius-2 box, p = {p}: {:.4} vs {:.4} ± {:.4}", inf.lhs, inf.rhs, inf.stderr));
    }
    Ok(out)
}

fn erdos_renyi() -> Result<Outcome> {
    let mut out = Outcome::new();
    let replicas = 2_000;
    let n = 1000;
    for (property, lo, hi, unit) in
        [(GraphProperty::Connectivity, 0.5, 1.5, "log n / n"), (GraphProperty::giant(n), 0.5, 2.0, "1 / n")]
    {
        let exp = threshold_experiment(property, n, &property.default_grid(n), replicas, 100)?;
        let x = crossing_point(&exp.curve, 0.5)? / property.scale(n);
        out.check((lo..=hi).contains(&x), format!("{property:?}, n = {n}: crosses 1/2 at {x:.3} × {unit}, in [{lo}, {hi}]"));
    }
    for property in [GraphProperty::Connectivity, GraphProperty::Giant { r: 0 }] {
        let widths: Vec<f64> = [500usize, 2000]
            .into_iter()
            .map(|m| {
                let prop = if property == GraphProperty::Connectivity { property } else { GraphProperty::giant(m) };
                let exp = threshold_experiment(prop, m, &prop.default_grid(m), replicas, 110)?;
                Ok(window_from_curve(&exp.curve, 0.1)?.width)
            })
            .collect::<Result<_>>()?;
        let label = if property == GraphProperty::Connectivity { "connectivity" } else { "giant" };
        out.check(widths[1] < widths[0], format!("{label}: 0.1-window width {:.3e} at n = 2000 < {:.3e} at n = 500", widths[1], widths[0]));
    }
    let m = 500;
    let spec = RandomGraphSpec::new(m)?;
    let prop = GraphProperty::Connectivity;
    let grid: Vec<f64> = [0.8, 1.0, 1.2].iter().map(|c| c * prop.scale(m)).collect();
    let nz = threshold_experiment(prop, m, &grid, 10_000, 120)?.curve;
    let direct = direct_sweep(spec.num_pairs(), |c: &Configuration| prop.evaluate(&spec, c).expect("sized sample"), &grid, 1_000, 121)?;
    for j in 0..grid.len() {
        out.check(
            direct.agrees_with(j, nz.estimate[j], nz.stderr[j], SIGMAS),
            format!("connectivity n = {m} at p = {:.5}: sweep {:.4} vs direct {:.4}", grid[j], nz.estimate[j], direct.curve.estimate[j]),
        );
    }
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("exact-identity suites", exact_suites),
        ("duality", duality),
        ("RSW lower bound", rsw),
        ("sharp crossing threshold", sharp_crossing),
        ("subcritical decay", subcritical_decay),
        ("critical estimator", critical_point),
        ("random-cluster exactness", random_cluster),
        ("revealment and influence-sum bounds", revealment),
        ("Erdős–Rényi thresholds", erdos_renyi),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, lines) = match run() {
            Ok(o) => (o.passed, o.lines),
            Err(e) => (false, vec![format!("FAIL error: {e}")]),
        };
        if !passed {
            failures += 1;
        }
        println!("{} criterion {}: {name} ({:.1} s)", if passed { "PASS" } else { "FAIL" }, k + 1, start.elapsed().as_secs_f64());
        for line in lines {
            println!("       {line}");
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
