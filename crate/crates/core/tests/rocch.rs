mod common;

use chemoa::par::Execution;
use chemoa::problems::{sample_true_front, Problem};
use chemoa::rocch::{
    delta_vus, select_operating_point, vus, vus_contributions, OperatingPointQuery, RocchError,
};
use chemoa::{ObjectiveVector, RocSpace};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn without(points: &[ObjectiveVector], i: usize) -> Vec<ObjectiveVector> {
    let mut rest = points.to_vec();
    rest.remove(i);
    rest
}

/// Random points on the feasible side of the guess plane.
fn feasible_points<R: Rng>(rng: &mut R, n: usize, space: &RocSpace) -> Vec<ObjectiveVector> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_points(rng, 1)[0];
        if space.feasible().contains(&p) {
            out.push(p);
        }
    }
    out
}

#[test]
fn extreme_values() {
    let aug = RocSpace::augmented();
    let tri = RocSpace::three_class();
    assert!((vus(&[ObjectiveVector::ZERO], &aug) - 0.5).abs() < 1e-12);
    assert!((vus(&[ObjectiveVector::ONES], &tri) - 5.0 / 6.0).abs() < 1e-12);
    assert!(vus(&[v(0.4, 0.4, 0.2)], &tri).abs() < 1e-12);
    assert_eq!(vus(&[], &aug), 0.0);
}

#[test]
fn guess_plane_subsets_have_zero_vus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(1..8);
        let tri: Vec<ObjectiveVector> = (0..n)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
                v(a, b, 1.0 - a - b)
            })
            .collect();
        assert!(vus(&tri, &RocSpace::three_class()).abs() < 1e-12, "{tri:?}");
        let aug: Vec<ObjectiveVector> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen();
                v(a, 1.0 - a, rng.gen())
            })
            .collect();
        assert!(vus(&aug, &RocSpace::augmented()).abs() < 1e-12, "{aug:?}");
    }
}

#[test]
fn vus_matches_monte_carlo_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for space in [RocSpace::augmented(), RocSpace::three_class()] {
        for _ in 0..4 {
            let n = rng.gen_range(1..=5);
            let pts = feasible_points(&mut rng, n, &space);
            let exact = vus(&pts, &space);
            let (mc, se) = mc_vus(&pts, space.references(), space.feasible(), space.sense(), 20_000, &mut rng);
            assert!((exact - mc).abs() <= 4.0 * se, "{:?} {pts:?}: {exact} vs {mc} ± {se}", space.label());
        }
    }
}

#[test]
fn delta_vus_examples() {
    let tri = RocSpace::three_class();
    let d = delta_vus(&[ObjectiveVector::ONES, v(0.9, 0.9, 0.9)], &tri);
    assert_eq!(d[1], 0.0);
    assert!((d[0] - (5.0 / 6.0 - vus(&[v(0.9, 0.9, 0.9)], &tri))).abs() < 1e-12);
    let d = delta_vus(&[v(0.8, 0.6, 0.6), v(0.6, 0.8, 0.6)], &tri);
    assert!((d[0] - d[1]).abs() < 1e-12, "{d:?}");
}

#[test]
fn delta_vus_of_eight_random_points_matches_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for space in [RocSpace::augmented(), RocSpace::three_class()] {
        let pts = feasible_points(&mut rng, 8, &space);
        let total = vus(&pts, &space);
        for (i, d) in delta_vus(&pts, &space).into_iter().enumerate() {
            assert!((d - (total - vus(&without(&pts, i), &space))).abs() < 1e-12);
        }
    }
}

#[test]
fn delta_vus_matches_leave_one_out_on_fronts() {
    for (problem, n) in [("zejd1", 50), ("zejd2", 50), ("zed1", 100), ("zed3", 100)] {
        let problem: Problem = problem.parse().unwrap();
        let space = problem.roc_space();
        let pts = sample_true_front(&problem, n, 5).unwrap();
        let c = vus_contributions(&pts, space, Execution::Sequential);
        assert_eq!(c.total, vus(&pts, space));
        for i in 0..n {
            let loo = vus(&without(&pts, i), space);
            assert!((c.without[i] - loo).abs() < 1e-12, "{problem} point {i}");
            assert!(c.delta[i] >= 0.0);
        }
    }
}

#[test]
fn contributions_do_not_depend_on_execution_mode() {
    let problem = Problem::zed(2).unwrap();
    let pts = sample_true_front(&problem, 80, 9).unwrap();
    let seq = vus_contributions(&pts, problem.roc_space(), Execution::Sequential);
    let par = vus_contributions(&pts, problem.roc_space(), Execution::Parallel);
    assert_eq!(seq, par);
}

#[test]
fn dense_front_samples_converge() {
    let problem = Problem::zed(1).unwrap();
    let space = problem.roc_space();
    let dense = vus(&sample_true_front(&problem, 10_000, 1).unwrap(), space);
    let sparse = vus(&sample_true_front(&problem, 1_000, 1).unwrap(), space);
    assert!((dense - sparse).abs() < 1e-3, "{dense} vs {sparse}");
}

#[test]
fn operating_point_examples() {
    let tri = RocSpace::three_class();
    let p = [v(0.6, 0.6, 0.6)];
    let (best, acc) = select_operating_point(&p, &tri, &OperatingPointQuery::accuracy([1.0 / 3.0; 3])).unwrap();
    assert_eq!(best, p[0]);
    assert!((acc - 0.6).abs() < 1e-12);
    let (best, acc) = select_operating_point(&p, &tri, &OperatingPointQuery::accuracy([1.0, 0.0, 0.0])).unwrap();
    assert_eq!(best, v(1.0, 0.0, 0.0));
    assert_eq!(acc, 1.0);
    let q = OperatingPointQuery::cost([1.0 / 3.0; 3], [1.0; 3], 300);
    let (best, cost) = select_operating_point(&p, &tri, &q).unwrap();
    assert_eq!(best, p[0]);
    assert!((cost - 120.0).abs() < 1e-9);
}

#[test]
fn operating_point_rejects_bad_queries() {
    let tri = RocSpace::three_class();
    let p = [v(0.6, 0.6, 0.6)];
    let bad = OperatingPointQuery::accuracy([0.5, 0.5, 0.5]);
    assert!(matches!(select_operating_point(&p, &tri, &bad), Err(RocchError::InvalidPriors(_))));
    let ok = OperatingPointQuery::accuracy([1.0 / 3.0; 3]);
    assert!(select_operating_point(&p, &RocSpace::augmented(), &ok).is_err());
    assert!(select_operating_point(&[], &tri, &ok).is_err());
}

fn unit_point() -> impl Strategy<Value = ObjectiveVector> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b, c)| v(a, b, c))
}

fn any_space() -> impl Strategy<Value = RocSpace> {
    prop_oneof![Just(RocSpace::augmented()), Just(RocSpace::three_class())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn vus_is_bounded(space in any_space(), pts in prop::collection::vec(unit_point(), 0..20)) {
        let x = vus(&pts, &space);
        prop_assert!(x >= 0.0 && x <= space.max_vus() + 1e-12);
    }

    #[test]
    fn vus_is_monotone(space in any_space(), pts in prop::collection::vec(unit_point(), 0..15), q in unit_point()) {
        let mut more = pts.clone();
        more.push(q);
        prop_assert!(vus(&more, &space) >= vus(&pts, &space) - 1e-12);
    }

    #[test]
    fn duplicated_references_change_nothing(space in any_space(), pts in prop::collection::vec(unit_point(), 0..15), r in 0usize..3) {
        let mut more = pts.clone();
        more.push(space.references()[r]);
        prop_assert_eq!(vus(&more, &space), vus(&pts, &space));
    }

    #[test]
    fn vus_ignores_order(space in any_space(), pts in prop::collection::vec(unit_point(), 1..15)) {
        let mut rev = pts.clone();
        rev.reverse();
        prop_assert!((vus(&rev, &space) - vus(&pts, &space)).abs() < 1e-12);
    }

    #[test]
    fn contributions_match_leave_one_out(space in any_space(), pts in prop::collection::vec(unit_point(), 1..12)) {
        let c = vus_contributions(&pts, &space, Execution::Sequential);
        for i in 0..pts.len() {
            let loo = vus(&without(&pts, i), &space);
            prop_assert!((c.without[i] - loo).abs() < 1e-12, "point {}: {} vs {}", i, c.without[i], loo);
            prop_assert!(c.delta[i] >= 0.0);
        }
    }

    #[test]
    fn operating_point_is_the_best_candidate(pts in prop::collection::vec(unit_point(), 1..12), w in unit_point(), cost_mode: bool) {
        prop_assume!(w.0.iter().sum::<f64>() > 1e-3);
        let s: f64 = w.0.iter().sum();
        let mut priors = w.0.map(|x| x / s);
        priors[2] = 1.0 - priors[0] - priors[1];
        prop_assume!(priors[2] >= 0.0);
        let tri = RocSpace::three_class();
        let q = if cost_mode {
            OperatingPointQuery::cost(priors, [1.0, 2.0, 3.0], 100)
        } else {
            OperatingPointQuery::accuracy(priors)
        };
        let (_, score) = select_operating_point(&pts, &tri, &q).unwrap();
        // the optimum of a linear score over the hull is at a point or a reference
        let scores = pts.iter().chain(tri.references()).map(|p| q.score(p));
        let best = if cost_mode { scores.fold(f64::INFINITY, f64::min) } else { scores.fold(f64::NEG_INFINITY, f64::max) };
        prop_assert!((score - best).abs() < 1e-9, "{} vs {}", score, best);
    }
}
