//! The steady-state 3DCH-EMOA and the NSGA-II / SMS-EMOA baselines.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operators::{offspring, OperatorParams};
use super::ranking::{ch_sort_objectives, crowding_distance, nondominated_sort};
use super::reduce::{argmin_random, reduce_step};
use super::{EvolveError, Individual};
use crate::geometry::{ObjectiveVector, Sense};
use crate::metrics::{gini, hypervolume_contributions, population_hypervolume, MetricRecord, HV_REFERENCE};
use crate::par::Execution;
use crate::problems::{Genotype, Problem};
use crate::rocch::{vus, vus_contributions, LossCache};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "3dch")]
    ChEmoa,
    #[serde(rename = "nsga2")]
    Nsga2,
    #[serde(rename = "sms")]
    SmsEmoa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::ChEmoa, Algorithm::Nsga2, Algorithm::SmsEmoa];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ChEmoa => "3dch",
            Algorithm::Nsga2 => "nsga2",
            Algorithm::SmsEmoa => "sms",
        }
    }

    pub fn run<R: Rng + ?Sized>(
        self,
        problem: &Problem,
        config: &AlgorithmConfig,
        rng: &mut R,
    ) -> Result<RunResult, EvolveError> {
        match self {
            Algorithm::ChEmoa => run_3dch_emoa(problem, config, rng),
            Algorithm::Nsga2 => run_nsga2(problem, config, rng),
            Algorithm::SmsEmoa => run_sms_emoa(problem, config, rng),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = EvolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim().to_lowercase())
            .ok_or_else(|| EvolveError::Config(format!("unknown algorithm `{s}` (expected 3dch, nsga2 or sms)")))
    }
}

/// Budget and operators of a single run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub population: usize,
    pub evaluations: usize,
    pub operators: OperatorParams,
    /// How ΔVUS loops are executed; never affects results.
    #[serde(skip)]
    pub execution: Execution,
}

impl AlgorithmConfig {
    /// Default operators for `problem`'s genotype.
    pub fn new(problem: &Problem, population: usize, evaluations: usize) -> Self {
        Self {
            population,
            evaluations,
            operators: OperatorParams::for_genotype(&problem.genotype_kind()),
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.population < 4 {
            return Err(EvolveError::Config(format!(
                "population size must be at least 4, got {}",
                self.population
            )));
        }
        if self.evaluations < self.population {
            return Err(EvolveError::Config(format!(
                "evaluation budget {} is smaller than the population size {}",
                self.evaluations, self.population
            )));
        }
        self.operators.validate()
    }
}

/// Final state of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub problem: String,
    pub population: Vec<Individual>,
    /// 1-based hull level of each individual (see [`super::ch_sort`]).
    pub levels: Vec<usize>,
    /// VUS contribution of each individual within the whole population.
    pub dvus: Vec<f64>,
    /// VUS after initialization, then after every iteration (3DCH-EMOA) or
    /// generation (baselines).
    pub trace: Vec<f64>,
    /// `wall_time_ms` is left at 0 here; the caller times the run.
    pub metrics: MetricRecord,
}

impl RunResult {
    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.population.iter().map(|i| i.objectives).collect()
    }
}

fn evaluate(problem: &Problem, genotype: Genotype) -> Result<Individual, EvolveError> {
    let objectives = problem.evaluate(&genotype)?;
    if !objectives.is_finite() {
        return Err(EvolveError::NonFinite {
            objectives: objectives.0,
        });
    }
    Ok(Individual { genotype, objectives })
}

fn initial_population<R: Rng + ?Sized>(
    problem: &Problem,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<Vec<Individual>, EvolveError> {
    config.validate()?;
    let kind = problem.genotype_kind();
    (0..config.population)
        .map(|_| evaluate(problem, kind.sample(rng)))
        .collect()
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn objectives_of(pop: &[Individual]) -> Vec<ObjectiveVector> {
    pop.iter().map(|i| i.objectives).collect()
}

fn finish(
    algorithm: Algorithm,
    problem: &Problem,
    population: Vec<Individual>,
    trace: Vec<f64>,
    evaluations: usize,
    exec: Execution,
) -> RunResult {
    let space = problem.roc_space();
    let points = objectives_of(&population);
    let levels = ch_sort_objectives(&points, space).level_of(points.len());
    let contributions = vus_contributions(&points, space, exec);
    let metrics = MetricRecord {
        vus: contributions.total,
        gini: gini(&points),
        hypervolume: population_hypervolume(&points, space.sense()),
        wall_time_ms: 0,
        evaluations: evaluations as u64,
    };
    RunResult {
        algorithm,
        problem: problem.to_string(),
        population,
        levels,
        dvus: contributions.delta,
        trace,
        metrics,
    }
}

/// Steady-state 3DCH-EMOA: one offspring per iteration from two distinct
/// uniformly chosen parents, followed by the non-descending reduce.
pub fn run_3dch_emoa<R: Rng + ?Sized>(
    problem: &Problem,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<RunResult, EvolveError> {
    let space = problem.roc_space();
    let kind = problem.genotype_kind();
    let mut pop = initial_population(problem, config, rng)?;
    let mut points = objectives_of(&pop);
    let mut vol = vus(&points, space);
    let mut trace = Vec::with_capacity(config.evaluations - config.population + 1);
    trace.push(vol);
    let mut cache = LossCache::default();

    let mut evaluations = config.population;
    while evaluations < config.evaluations {
        let (a, b) = distinct_pair(pop.len(), rng);
        let (child, _) = offspring(&kind, &pop[a].genotype, &pop[b].genotype, &config.operators, rng);
        let child = evaluate(problem, child)?;
        evaluations += 1;

        points.push(child.objectives);
        let step = reduce_step(&points, vol, space, config.execution, &mut cache, rng);
        points.remove(step.removed);
        if step.removed < pop.len() {
            pop.remove(step.removed);
            pop.push(child);
        }
        vol = step.vus;
        trace.push(vol);
    }
    Ok(finish(Algorithm::ChEmoa, problem, pop, trace, evaluations, config.execution))
}

/// Pareto rank (0-based) and crowding distance of every individual.
fn rank_and_crowding(points: &[ObjectiveVector], sense: Sense) -> (Vec<usize>, Vec<f64>) {
    let mut rank = vec![0; points.len()];
    let mut crowd = vec![0.0; points.len()];
    for (r, front) in nondominated_sort(points, sense).iter().enumerate() {
        for (&i, d) in front.iter().zip(crowding_distance(points, front)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

fn tournament<R: Rng + ?Sized>(rank: &[usize], crowd: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..rank.len());
    let b = rng.gen_range(0..rank.len());
    if rank[a] != rank[b] {
        return if rank[a] < rank[b] { a } else { b };
    }
    if crowd[a] != crowd[b] {
        return if crowd[a] > crowd[b] { a } else { b };
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Generational NSGA-II with binary tournaments on (rank, crowding distance).
pub fn run_nsga2<R: Rng + ?Sized>(
    problem: &Problem,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<RunResult, EvolveError> {
    let space = problem.roc_space();
    let sense = space.sense();
    let kind = problem.genotype_kind();
    let n = config.population;
    let mut pop = initial_population(problem, config, rng)?;
    let mut trace = vec![vus(&objectives_of(&pop), space)];

    let mut evaluations = n;
    while evaluations < config.evaluations {
        let (rank, crowd) = rank_and_crowding(&objectives_of(&pop), sense);
        let mut children = Vec::with_capacity(n);
        while children.len() < n && evaluations < config.evaluations {
            let a = tournament(&rank, &crowd, rng);
            let b = tournament(&rank, &crowd, rng);
            let (c1, c2) = offspring(&kind, &pop[a].genotype, &pop[b].genotype, &config.operators, rng);
            for c in [c1, c2] {
                if children.len() < n && evaluations < config.evaluations {
                    children.push(evaluate(problem, c)?);
                    evaluations += 1;
                }
            }
        }

        pop.extend(children);
        let points = objectives_of(&pop);
        let mut survivors = Vec::with_capacity(n);
        for front in nondominated_sort(&points, sense) {
            if survivors.len() + front.len() <= n {
                survivors.extend(front);
                continue;
            }
            let crowd = crowding_distance(&points, &front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
            survivors.extend(order.into_iter().take(n - survivors.len()).map(|k| front[k]));
            break;
        }
        survivors.sort_unstable();
        let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
        pop = survivors.iter().map(|&i| slots[i].take().expect("survivor taken once")).collect();
        trace.push(vus(&objectives_of(&pop), space));
    }
    Ok(finish(Algorithm::Nsga2, problem, pop, trace, evaluations, config.execution))
}

/// Steady-state SMS-EMOA: one offspring per iteration, then removal of the
/// last Pareto level's smallest exclusive hypervolume contributor.
pub fn run_sms_emoa<R: Rng + ?Sized>(
    problem: &Problem,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<RunResult, EvolveError> {
    let space = problem.roc_space();
    let sense = space.sense();
    let kind = problem.genotype_kind();
    let n = config.population;
    let reference = ObjectiveVector::splat(HV_REFERENCE);
    let mut pop = initial_population(problem, config, rng)?;
    let mut trace = vec![vus(&objectives_of(&pop), space)];

    let mut evaluations = n;
    while evaluations < config.evaluations {
        let (a, b) = distinct_pair(n, rng);
        let (child, _) = offspring(&kind, &pop[a].genotype, &pop[b].genotype, &config.operators, rng);
        pop.push(evaluate(problem, child)?);
        evaluations += 1;

        let points: Vec<ObjectiveVector> = pop.iter().map(|i| sense.to_min(&i.objectives)).collect();
        let fronts = nondominated_sort(&points, Sense::Min);
        let last = &fronts[fronts.len() - 1];
        let victim = if last.len() == 1 {
            last[0]
        } else {
            let members: Vec<ObjectiveVector> = last.iter().map(|&i| points[i]).collect();
            last[argmin_random(&hypervolume_contributions(&members, &reference), rng)]
        };
        pop.remove(victim);

        if (evaluations - n).is_multiple_of(n) || evaluations == config.evaluations {
            trace.push(vus(&objectives_of(&pop), space));
        }
    }
    Ok(finish(Algorithm::SmsEmoa, problem, pop, trace, evaluations, config.execution))
}
