use sharp_core::graphprops::{has_component_of_size, is_connected, threshold_experiment, GraphProperty, RandomGraphSpec};
use sharp_core::percolation::{crossing_sweep, crossing_v, exact_probability, explore, lexicographic_order, Direction};
use sharp_core::randomcluster::{component_count, heat_bath_conditional};
use sharp_core::{BoxRegion, Configuration, ExactMeasure, Graph, RandomClusterParams, RectangleRegion};

#[test]
fn sweep_agrees_with_enumeration_on_a_small_rectangle() {
    let rect = RectangleRegion::new(2, 3).unwrap();
    let grid = [0.3, 0.5, 0.7];
    let curve = crossing_sweep(&rect, Direction::Vertical, &grid, 40_000, 5).unwrap();
    for (j, &p) in grid.iter().enumerate() {
        let exact = exact_probability(rect.num_edges(), p, |w| crossing_v(&rect, w).unwrap()).unwrap();
        assert!(curve.point(j).within_sigmas(exact, 4.0), "p = {p}: {} vs {exact}", curve.estimate[j]);
    }
}

#[test]
fn three_vertex_random_graph() {
    let spec = RandomGraphSpec::new(3).unwrap();
    for p in [0.2, 0.5, 0.9] {
        let conn = exact_probability(3, p, |w| is_connected(&spec, w).unwrap()).unwrap();
        assert!((conn - (3.0 * p * p * (1.0 - p) + p.powi(3))).abs() < 1e-12);
        let pair = exact_probability(3, p, |w| has_component_of_size(&spec, w, 2).unwrap()).unwrap();
        assert!((pair - (1.0 - (1.0 - p).powi(3))).abs() < 1e-12);
    }
    let exp = threshold_experiment(GraphProperty::Connectivity, 3, &[0.5], 20_000, 3).unwrap();
    assert!(exp.curve.point(0).within_sigmas(0.5, 4.0));
}

#[test]
fn random_cluster_q1_is_bernoulli() {
    let g = Graph::cycle(4).unwrap();
    let m = ExactMeasure::new(&g, RandomClusterParams::new(0.3, 1.0).unwrap()).unwrap();
    for w in 0..16u64 {
        let k = w.count_ones() as i32;
        assert!((m.probability(w) - 0.3f64.powi(k) * 0.7f64.powi(4 - k)).abs() < 1e-14);
    }
}

#[test]
fn heat_bath_matches_exact_conditionals() {
    let g = Graph::cycle(4).unwrap();
    let params = RandomClusterParams::new(0.5, 2.0).unwrap();
    let m = ExactMeasure::new(&g, params).unwrap();
    for rest in 0..16u64 {
        let omega = Configuration::from_u64(4, rest);
        for e in 0..4 {
            let hb = heat_bath_conditional(&g, &omega, e, params).unwrap();
            assert!((hb - m.conditional_open(e, rest)).abs() < 1e-12);
        }
    }
    // the other three edges closed: opening e merges two clusters
    let hb = heat_bath_conditional(&g, &Configuration::zeros(4), 0, params).unwrap();
    assert!((hb - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(component_count(&g, &Configuration::zeros(4)).unwrap(), 4);
}

#[test]
fn exploration_reveals_only_edges_next_to_the_level_set_clusters() {
    let b = BoxRegion::new(2, 3).unwrap();
    let order = lexicographic_order(&b);
    let mut rng = sharp_core::rng::replica_rng(12, 0);
    for k in 1..=3 {
        for _ in 0..200 {
            let omega = Configuration::bernoulli(b.num_edges(), 0.5, &mut rng);
            let t = explore(&b, k, &omega, &order).unwrap();
            let level = b.boundary(k);
            for &e in &t.revealed {
                let (u, v) = b.graph().edge(e);
                let touches = |x| sharp_core::percolation::connected(b.graph(), &omega, &[x], &level).unwrap();
                assert!(touches(u) || touches(v));
            }
        }
    }
}
