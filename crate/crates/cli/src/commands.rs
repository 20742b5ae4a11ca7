use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;

use sharp_core::graphprops::{threshold_experiment, GraphProperty};
use sharp_core::percolation::{crossing_direct, crossing_sweep, theta_sweep, Direction};
use sharp_core::threshold::{critical_estimator, crossing_point};
use sharp_core::{run_suite, RectangleRegion, SUITES};

use crate::args::{CrossingArgs, ErArgs, InequalitiesArgs, PropertyArg, ThetaArgs};
use crate::output::{Artifacts, Assertion, Meta};

fn grid_index(grid: &[f64], at: f64) -> Result<usize> {
    match grid.iter().position(|&x| (x - at).abs() < 1e-9) {
        Some(j) => Ok(j),
        None => bail!("--at {at} is not a point of the p grid"),
    }
}

pub fn crossing(a: &CrossingArgs, seed: u64, out: Option<&Path>) -> Result<Vec<Assertion>> {
    let rect = RectangleRegion::new(a.width, a.height)?;
    let dir: Direction = a.direction.into();
    let grid = &a.p_grid.0;
    let at = if a.expect.is_some() || a.at_least.is_some() { Some(grid_index(grid, a.at)?) } else { None };
    let art = Artifacts::new(out, Meta::new("crossing", a, seed, a.replicas)?)?;

    let curve = crossing_sweep(&rect, dir, grid, a.replicas, seed)?;
    let mut assertions = Vec::new();
    if let (Some(j), Some(v)) = (at, a.expect) {
        let e = curve.point(j);
        assertions.push(Assertion::new(
            format!("estimate at p = {} within {} sigma of {v}", a.at, a.sigmas),
            e.within_sigmas(v, a.sigmas),
            format!("{} ± {}", e.value, e.stderr),
        ));
    }
    if let (Some(j), Some(v)) = (at, a.at_least) {
        let e = curve.point(j);
        let low = e.value - a.sigmas * e.stderr;
        assertions.push(Assertion::new(
            format!("estimate at p = {} minus {} sigma exceeds {v}", a.at, a.sigmas),
            low > v,
            format!("{} - {} * {} = {low}", e.value, a.sigmas, e.stderr),
        ));
    }
    let mut direct = None;
    if a.direct_replicas > 0 {
        let d = crossing_direct(&rect, dir, grid, a.direct_replicas, sharp_core::rng::derive_seed(seed, 1))?;
        let disagree: Vec<f64> = (0..grid.len())
            .filter(|&j| !d.agrees_with(j, curve.estimate[j], curve.stderr[j], a.sigmas))
            .map(|j| grid[j])
            .collect();
        assertions.push(Assertion::new(
            "sweep agrees with direct Monte Carlo",
            disagree.is_empty(),
            format!("disagreeing p values: {disagree:?}"),
        ));
        direct = Some(json!({ "replicas": a.direct_replicas, "estimate": d.curve.estimate, "successes": d.successes }));
    }

    let mut body = Vec::new();
    curve.write_csv(&mut body)?;
    art.csv(&body)?;
    let report = json!({
        "event": dir.event_name(&rect),
        "region": rect.describe(),
        "curve": curve,
        "direct": direct,
    });
    art.report(&report, &assertions)?;
    Ok(assertions)
}

pub fn theta(a: &ThetaArgs, seed: u64, out: Option<&Path>) -> Result<Vec<Assertion>> {
    let grid = &a.p_grid.0;
    let art = Artifacts::new(out, Meta::new("theta", a, seed, a.replicas)?)?;
    let sweep = theta_sweep(a.dimension, a.max_n, grid, a.replicas, seed)?;
    let family = sweep.family()?;
    let estimate = critical_estimator(&family, a.threshold_ratio)?;
    let literal = critical_estimator(&family, 1.0)?;

    let mut assertions = Vec::new();
    if let Some(r) = a.pc_range {
        let ok = !estimate.right_censored && (r.lo..=r.hi).contains(&estimate.x_hat);
        assertions.push(Assertion::new(
            format!("critical estimate in [{}, {}]", r.lo, r.hi),
            ok,
            format!("x_hat = {} (right censored: {})", estimate.x_hat, estimate.right_censored),
        ));
    }

    let mut body = String::from("n,p,theta,theta_stderr,partial_sum,partial_sum_stderr,n_replicas\n");
    for n in 0..=a.max_n {
        let (t, s) = (&sweep.theta[n], &sweep.partial_sums[n]);
        for j in 0..grid.len() {
            writeln!(body, "{n},{},{},{},{},{},{}", grid[j], t.estimate[j], t.stderr[j], s.estimate[j], s.stderr[j], a.replicas)?;
        }
    }
    art.csv(body.as_bytes())?;
    let report = json!({
        "dimension": a.dimension,
        "max_n": a.max_n,
        "estimate": estimate,
        "at_level_one": { "x_hat": literal.x_hat, "right_censored": literal.right_censored },
    });
    art.report(&report, &assertions)?;
    Ok(assertions)
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    suites: &'a [sharp_core::SuiteReport],
}

pub fn inequalities(a: &InequalitiesArgs, seed: u64, out: Option<&Path>) -> Result<Vec<Assertion>> {
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let art = Artifacts::new(out, Meta::new("inequalities", a, seed, 0)?)?;
    let reports = names.iter().map(|n| run_suite(n, seed)).collect::<Result<Vec<_>, _>>()?;
    let assertions = reports
        .iter()
        .map(|r| {
            Assertion::new(
                format!("suite {} has no violations", r.name),
                r.passed(),
                format!("{} checks, {} violations, max error {:e}", r.checks, r.violations, r.max_error),
            )
        })
        .collect::<Vec<_>>();
    art.report(&SuiteSummary { suites: &reports }, &assertions)?;
    Ok(assertions)
}

pub fn er(a: &ErArgs, seed: u64, out: Option<&Path>) -> Result<Vec<Assertion>> {
    let property = match (a.property, a.r) {
        (PropertyArg::Connectivity, None) => GraphProperty::Connectivity,
        (PropertyArg::Connectivity, Some(_)) => bail!("--r only applies to the giant property"),
        (PropertyArg::Giant, None) => GraphProperty::giant(a.n),
        (PropertyArg::Giant, Some(r)) => GraphProperty::Giant { r },
    };
    let grid = match &a.p_grid {
        Some(g) => g.0.clone(),
        None => property.default_grid(a.n),
    };
    let config = json!({ "args": a, "property": property, "grid": grid });
    let art = Artifacts::new(out, Meta::new("er", &config, seed, a.replicas)?)?;
    let exp = threshold_experiment(property, a.n, &grid, a.replicas, seed)?;
    let scale = property.scale(a.n);
    let half = crossing_point(&exp.curve, 0.5).ok();
    let window = sharp_core::threshold::window_from_curve(&exp.curve, a.epsilon).ok();

    let mut assertions = Vec::new();
    if let Some(r) = a.expect_crossing {
        let scaled = half.map(|x| x / scale);
        assertions.push(Assertion::new(
            format!("crossing of 1/2 in [{}, {}] x scale", r.lo, r.hi),
            scaled.is_some_and(|x| (r.lo..=r.hi).contains(&x)),
            format!("crossing / scale = {scaled:?}"),
        ));
    }

    let mut body = Vec::new();
    exp.curve.write_csv(&mut body)?;
    art.csv(&body)?;
    let report = json!({
        "property": property,
        "n": a.n,
        "scale": scale,
        "half_crossing": half,
        "half_crossing_scaled": half.map(|x| x / scale),
        "window": window,
    });
    art.report(&report, &assertions)?;
    Ok(assertions)
}
