use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sharp_core::boolfn::{expectation, expectation_direct, influences, variance};
use sharp_core::decisiontree::{run, tree_suite};
use sharp_core::families::{random_function, random_monotone, random_permutation};
use sharp_core::percolation::{
    binomial_weights, connected, connected_bfs, crossing_h, crossing_v, duality_complement_check, log_factorials,
};
use sharp_core::spectral::{fourier_walsh, transform};
use sharp_core::threshold::{critical_estimator, russo_derivative};
use sharp_core::{BooleanFunctionTable, Configuration, CurveFamily, ProductMeasure, RealTable, RectangleRegion};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mu(p: f64, n: usize) -> ProductMeasure {
    ProductMeasure::new(p, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_find_matches_bfs(w in 1usize..9, h in 1usize..9, p in 0.0f64..=1.0, seed: u64) {
        let rect = RectangleRegion::new(w, h).unwrap();
        let omega = Configuration::bernoulli(rect.num_edges(), p, &mut rng(seed));
        let g = rect.graph();
        for (a, b) in [(rect.left(), rect.right()), (rect.bottom(), rect.top()), (vec![0], rect.top())] {
            prop_assert_eq!(connected(g, &omega, &a, &b).unwrap(), connected_bfs(g, &omega, &a, &b).unwrap());
        }
    }

    #[test]
    fn primal_and_dual_crossings_are_exclusive(p in 0.0f64..=1.0, seed: u64) {
        let omega = Configuration::bernoulli(RectangleRegion::new(15, 16).unwrap().num_edges(), p, &mut rng(seed));
        prop_assert!(duality_complement_check(16, &omega).unwrap());
    }

    #[test]
    fn crossings_are_increasing(w in 1usize..7, h in 1usize..7, p in 0.0f64..=1.0, flip in 0usize..64, seed: u64) {
        let rect = RectangleRegion::new(w, h).unwrap();
        let lo = Configuration::bernoulli(rect.num_edges(), p, &mut rng(seed));
        let mut hi = lo.clone();
        hi.set(flip % rect.num_edges(), true);
        prop_assert!(crossing_h(&rect, &lo).unwrap() <= crossing_h(&rect, &hi).unwrap());
        prop_assert!(crossing_v(&rect, &lo).unwrap() <= crossing_v(&rect, &hi).unwrap());
    }

    #[test]
    fn russo_matches_finite_difference(n in 1usize..9, p in 0.05f64..0.95, seed: u64) {
        let f = random_monotone(n, &mut rng(seed)).unwrap();
        let h = 1e-5;
        let fd = (expectation(&f, &mu(p + h, n)).unwrap() - expectation(&f, &mu(p - h, n)).unwrap()) / (2.0 * h);
        let d = russo_derivative(&f, &mu(p, n)).unwrap();
        prop_assert!((d - fd).abs() < 1e-6, "russo {} vs {}", d, fd);
        prop_assert!((d - influences(&f, &mu(p, n)).unwrap().total()).abs() < 1e-12);
    }

    #[test]
    fn expectation_paths_agree(n in 1usize..11, p in 0.0f64..=1.0, seed: u64) {
        let f = random_function(n, &mut rng(seed)).unwrap();
        let m = mu(p, n);
        let e = expectation(&f, &m).unwrap();
        prop_assert!((e - expectation_direct(&f, &m).unwrap()).abs() < 1e-12);
        prop_assert!((variance(&f, &m).unwrap() - e * (1.0 - e)).abs() < 1e-12);
    }

    #[test]
    fn walsh_transform_is_an_involution(n in 0usize..9, seed: u64) {
        let mut r = rng(seed);
        let values: Vec<f64> = (0..1usize << n).map(|_| rand::Rng::gen_range(&mut r, -1.0..1.0)).collect();
        let g = RealTable::new(n, values.clone()).unwrap();
        let back = transform(&g).inverse();
        for (a, b) in values.iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval(n in 1usize..11, seed: u64) {
        let f = random_function(n, &mut rng(seed)).unwrap();
        let c = fourier_walsh(&f);
        let mean = f.count_ones() as f64 / f.len() as f64;
        prop_assert!((c.energy() - mean).abs() < 1e-12);
        prop_assert!((c.variance() - mean * (1.0 - mean)).abs() < 1e-12);
    }

    #[test]
    fn stopped_runs_determine_the_value(n in 1usize..8, pick in 0usize..64, omega: u64, seed: u64) {
        let f = random_function(n, &mut rng(seed)).unwrap();
        let trees = tree_suite(n, seed).unwrap();
        let tree = &trees[pick % trees.len()];
        let omega = omega & ((1u64 << n) - 1);
        let t = run(tree, &f, omega).unwrap();
        prop_assert_eq!(t.value, f.get(omega));
        let mask = t.revealed_mask();
        for other in 0..1u64 << n {
            if other & mask == omega & mask {
                prop_assert_eq!(f.get(other), t.value);
            }
        }
    }

    #[test]
    fn permuting_inputs_preserves_the_law(n in 1usize..9, p in 0.0f64..=1.0, seed: u64) {
        let mut r = rng(seed);
        let f = random_function(n, &mut r).unwrap();
        let g = f.permute(&random_permutation(n, &mut r)).unwrap();
        prop_assert!((expectation(&f, &mu(p, n)).unwrap() - expectation(&g, &mu(p, n)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn binomial_weights_are_a_distribution(m in 0usize..400, p in 0.0f64..=1.0) {
        let lf = log_factorials(m);
        let w = binomial_weights(m, p, &lf);
        prop_assert_eq!(w.len(), m + 1);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mean: f64 = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        prop_assert!((mean - m as f64 * p).abs() < 1e-6 * (m as f64 + 1.0));
    }

    #[test]
    fn critical_estimate_increases_with_level(c in 0.3f64..0.7, a in 0.5f64..0.9, b in 0.5f64..0.9) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let x: Vec<f64> = (0..=40).map(|j| j as f64 / 40.0).collect();
        let fam = CurveFamily::from_fn(x, [2, 4, 8, 16, 32], |n, x| {
            if x >= c { 1.0 } else { (-(n as f64) * (c - x) * 4.0).exp() }
        })
        .unwrap();
        let e_lo = critical_estimator(&fam, lo).unwrap();
        let e_hi = critical_estimator(&fam, hi).unwrap();
        prop_assert!(e_lo.x_hat <= e_hi.x_hat + 1e-12);
        prop_assert!(!e_hi.right_censored && e_hi.x_hat <= c + 1.0 / 40.0);
    }

    #[test]
    fn configuration_order_and_complement(len in 1usize..200, p in 0.0f64..=1.0, seed: u64) {
        let mut r = rng(seed);
        let a = Configuration::bernoulli(len, p, &mut r);
        let c = a.complement();
        prop_assert_eq!(a.count_ones() + c.count_ones(), len);
        prop_assert!(Configuration::zeros(len).le(&a) && a.le(&Configuration::ones(len)));
        prop_assert_eq!(c.complement(), a);
    }
}

#[test]
fn monotone_functions_have_nonnegative_influence_totals() {
    let mut r = rng(9);
    for n in 1..8 {
        for _ in 0..20 {
            let f: BooleanFunctionTable = random_monotone(n, &mut r).unwrap();
            assert!(f.is_monotone());
            for p in [0.1, 0.5, 0.9] {
                assert!(russo_derivative(&f, &mu(p, n)).unwrap() >= 0.0);
            }
        }
    }
}
