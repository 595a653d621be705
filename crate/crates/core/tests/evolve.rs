mod common;

use chemoa::evolve::{
    ch_sort_objectives, crowding_distance, non_descending_reduce, nondominated_sort, polynomial_mutation,
    sbx_crossover, Algorithm, AlgorithmConfig, Genotype, Individual, OperatorParams, REDUNDANCY_TOLERANCE,
};
use chemoa::geometry::{closure_support, quickhull};
use chemoa::problems::{sample_true_front, Problem};
use chemoa::rocch::{delta_vus, vus};
use chemoa::{ObjectiveVector, RocSpace, Sense};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run(problem: &Problem, algo: Algorithm, n: usize, evals: usize, seed: u64) -> chemoa::evolve::RunResult {
    let config = AlgorithmConfig::new(problem, n, evals);
    algo.run(problem, &config, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn individual(objectives: ObjectiveVector) -> Individual {
    Individual {
        genotype: Genotype::Real(vec![0.0; 3]),
        objectives,
    }
}

#[test]
fn vus_traces_never_descend() {
    let mut problems = Problem::benchmarks();
    problems.push("rules(30,4)".parse().unwrap());
    for run_id in 0..100u64 {
        let problem = &problems[run_id as usize % problems.len()];
        let result = run(problem, Algorithm::ChEmoa, 20, 500, run_id);
        assert_eq!(result.trace.len(), 500 - 20 + 1);
        assert_eq!(result.population.len(), 20);
        for w in result.trace.windows(2) {
            assert!(w[1] >= w[0], "{problem} seed {run_id}: {} then {}", w[0], w[1]);
        }
        let last = *result.trace.last().unwrap();
        assert!((last - result.metrics.vus).abs() < 1e-12);
    }
}

#[test]
fn runs_are_reproducible() {
    for algo in Algorithm::ALL {
        let problem = Problem::zed(2).unwrap();
        let a = run(&problem, algo, 12, 300, 9);
        let b = run(&problem, algo, 12, 300, 9);
        assert_eq!(a, b, "{algo}");
        let c = run(&problem, algo, 12, 300, 10);
        assert_ne!(a.population, c.population, "{algo}");
    }
}

#[test]
fn baselines_keep_their_population_size() {
    for algo in [Algorithm::Nsga2, Algorithm::SmsEmoa] {
        for problem in Problem::benchmarks() {
            let r = run(&problem, algo, 10, 200, 1);
            assert_eq!(r.population.len(), 10);
            assert_eq!(r.levels.len(), 10);
            assert_eq!(r.dvus.len(), 10);
            assert!(r.metrics.vus >= 0.0 && r.metrics.gini >= 0.0 && r.metrics.hypervolume >= 0.0);
        }
    }
}

#[test]
fn first_level_members_touch_improving_facets() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for space in [RocSpace::augmented(), RocSpace::three_class()] {
        for _ in 0..50 {
            let n = rng.gen_range(1..25);
            let pts = random_points(&mut rng, n);
            let levels = ch_sort_objectives(&pts, &space);
            let mut all = pts.clone();
            all.extend_from_slice(space.references());
            let hull = quickhull(&closure_support(&all, space.sense()));
            let sign = if space.sense() == Sense::Min { -1.0 } else { 1.0 };
            let first = &levels.levels()[0];
            if first.iter().all(|&i| hull.vertices().contains(&pts[i])) {
                for &i in first {
                    let v = hull.vertices().iter().position(|q| *q == pts[i]).unwrap();
                    let touches = hull
                        .facets()
                        .iter()
                        .any(|f| f.vertices.contains(&v) && (0..3).all(|k| sign * f.normal[k] >= -1e-9));
                    assert!(touches, "{pts:?}: {i}");
                    assert!(!all.iter().any(|q| space.sense().dominates(q, &pts[i])));
                }
            }
        }
    }
}

#[test]
fn levels_partition_the_points_and_isolate_duplicates() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let space = RocSpace::augmented();
    for _ in 0..50 {
        let n = rng.gen_range(2..20);
        let mut pts = random_points(&mut rng, n);
        let dup = pts[rng.gen_range(0..pts.len())];
        pts.push(dup);
        let la = ch_sort_objectives(&pts, &space);
        let mut seen: Vec<usize> = la.levels().iter().flatten().chain(la.redundant()).copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..pts.len()).collect::<Vec<_>>());
        assert!(la.redundant().contains(&(pts.len() - 1)));
        for level in la.levels() {
            for (a, &i) in level.iter().enumerate() {
                for &j in &level[a + 1..] {
                    assert!(pts[i].distance(&pts[j]) >= REDUNDANCY_TOLERANCE);
                }
            }
        }
    }
}

#[test]
fn multi_level_reduce_drops_the_smallest_last_level_contributor() {
    let tri = RocSpace::three_class();
    let problem = Problem::zed(1).unwrap();
    let front = sample_true_front(&problem, 12, 2).unwrap();
    let mut pop: Vec<Individual> = front.iter().map(|p| individual(*p)).collect();
    // an inner layer that sits strictly below the front
    let inner = [v(0.5, 0.3, 0.4), v(0.3, 0.5, 0.4), v(0.4, 0.4, 0.45), v(0.45, 0.35, 0.3)];
    pop.extend(inner.iter().map(|p| individual(*p)));
    let offspring = individual(v(0.9, 0.6, 0.5));

    let mut all = pop.clone();
    all.push(offspring.clone());
    let points: Vec<ObjectiveVector> = all.iter().map(|i| i.objectives).collect();
    let levels = ch_sort_objectives(&points, &tri);
    assert!(levels.len() > 1);
    let last = levels.levels().last().unwrap();
    let members: Vec<ObjectiveVector> = last.iter().map(|&i| points[i]).collect();
    let delta = delta_vus(&members, &tri);
    let min = delta.iter().copied().fold(f64::INFINITY, f64::min);

    let reduced = non_descending_reduce(&pop, offspring, &tri, &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(reduced.len(), pop.len());
    let removed: Vec<usize> = (0..all.len()).filter(|&i| !reduced.contains(&all[i])).collect();
    assert_eq!(removed.len(), 1);
    let k = last.iter().position(|&i| i == removed[0]).expect("removed from the last level");
    assert_eq!(delta[k], min);
    let before: Vec<ObjectiveVector> = pop.iter().map(|i| i.objectives).collect();
    let after: Vec<ObjectiveVector> = reduced.iter().map(|i| i.objectives).collect();
    assert!(vus(&after, &tri) >= vus(&before, &tri));
}

#[test]
fn a_useless_offspring_is_rejected() {
    let aug = RocSpace::augmented();
    let problem = Problem::zejd(1).unwrap();
    let pop: Vec<Individual> = sample_true_front(&problem, 10, 3).unwrap().into_iter().map(individual).collect();
    let child = individual(v(0.9, 0.9, 0.9));
    let reduced = non_descending_reduce(&pop, child, &aug, &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(reduced, pop);
}

fn brute_fronts(points: &[ObjectiveVector], sense: Sense) -> Vec<usize> {
    // front index = length of the longest dominance chain ending at the point
    let n = points.len();
    let mut rank = vec![0usize; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if sense.dominates(&points[j], &points[i]) && rank[i] < rank[j] + 1 {
                    rank[i] = rank[j] + 1;
                    changed = true;
                }
            }
        }
    }
    rank
}

#[test]
fn nondominated_sort_matches_dominance_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let pts: Vec<ObjectiveVector> = (0..rng.gen_range(1..30)).map(|_| dyadic_point(&mut rng)).collect();
        for sense in [Sense::Min, Sense::Max] {
            let fronts = nondominated_sort(&pts, sense);
            let rank = brute_fronts(&pts, sense);
            for (f, front) in fronts.iter().enumerate() {
                for &i in front {
                    assert_eq!(rank[i], f);
                }
            }
            assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), pts.len());
        }
    }
}

#[test]
fn crowding_distance_example() {
    let pts = [v(0.0, 1.0, 0.5), v(0.25, 0.75, 0.5), v(0.5, 0.5, 0.5), v(1.0, 0.0, 0.5)];
    let d = crowding_distance(&pts, &[0, 1, 2, 3]);
    assert_eq!(d[0], f64::INFINITY);
    assert_eq!(d[3], f64::INFINITY);
    // gaps 0.5 and 0.75 over a unit range in two objectives, none in the third
    assert!((d[1] - 1.0).abs() < 1e-12);
    assert!((d[2] - 1.5).abs() < 1e-12);
}

fn params() -> impl Strategy<Value = OperatorParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.5..50.0f64, 0.5..50.0f64).prop_map(|(pc, pm, ec, em)| OperatorParams {
        crossover_probability: pc,
        mutation_probability: pm,
        eta_c: ec,
        eta_m: em,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn variation_respects_bounds(
        x in prop::collection::vec(0.0..=1.0f64, 3),
        y in prop::collection::vec(0.0..=1.0f64, 3),
        p in params(),
        seed: u64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = sbx_crossover(&x, &y, (0.0, 1.0), &p, &mut rng);
        for c in [a, b] {
            prop_assert!(c.iter().all(|g| (0.0..=1.0).contains(g)));
            let m = polynomial_mutation(&c, (0.0, 1.0), &p, &mut rng);
            prop_assert!(m.iter().all(|g| (0.0..=1.0).contains(g)));
        }
    }

    #[test]
    fn sbx_preserves_the_midpoint(
        x in prop::collection::vec(0.0..=1.0f64, 3),
        y in prop::collection::vec(0.0..=1.0f64, 3),
        seed: u64,
    ) {
        // unbounded in effect: parents far from the box edges are not clipped
        let x: Vec<f64> = x.iter().map(|g| 0.45 + 0.1 * g).collect();
        let y: Vec<f64> = y.iter().map(|g| 0.45 + 0.1 * g).collect();
        let p = OperatorParams { crossover_probability: 1.0, mutation_probability: 0.0, eta_c: 20.0, eta_m: 20.0 };
        let (a, b) = sbx_crossover(&x, &y, (-100.0, 100.0), &p, &mut ChaCha8Rng::seed_from_u64(seed));
        for k in 0..3 {
            prop_assert!(((a[k] + b[k]) - (x[k] + y[k])).abs() < 1e-9);
        }
    }
}
