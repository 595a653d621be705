//! Survival selection of 3DCH-EMOA: drop one of `N + 1` individuals without
//! letting the population's VUS decrease.

use rand::Rng;

use super::ranking::ch_sort_with_hull;
use super::Individual;
use crate::geometry::ObjectiveVector;
use crate::par::Execution;
use crate::geometry::clipped_volume;
use crate::rocch::{contributions_on_hull, vus, vus_contributions, LossCache, RocSpace};

/// Which of the `N + 1` candidates to drop, and the VUS of the survivors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Reduction {
    pub removed: usize,
    pub vus: f64,
}

/// Index of the smallest value; exact ties are broken uniformly at random.
pub(crate) fn argmin_random<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> usize {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = (0..values.len()).filter(|&i| values[i] == min).collect();
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[rng.gen_range(0..n)],
    }
}

fn without(points: &[ObjectiveVector], skip: usize) -> Vec<ObjectiveVector> {
    points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, p)| *p)
        .collect()
}

/// One reduce step over `candidates` = population followed by the offspring.
///
/// `vol_ori` is the VUS of the population before the offspring was added.
/// Removing the offspring (the last candidate) leaves the population as it
/// was; that is also the fallback whenever another removal would lower VUS.
pub(crate) fn reduce_step<R: Rng + ?Sized>(
    candidates: &[ObjectiveVector],
    vol_ori: f64,
    space: &RocSpace,
    exec: Execution,
    cache: &mut LossCache,
    rng: &mut R,
) -> Reduction {
    let offspring = candidates.len() - 1;
    let keep_old = Reduction {
        removed: offspring,
        vus: vol_ori,
    };
    let (levels, hull) = ch_sort_with_hull(candidates, space);

    let proposal = if !levels.redundant().is_empty() {
        let r = levels.redundant()[rng.gen_range(0..levels.redundant().len())];
        if r == offspring {
            return keep_old;
        }
        Reduction {
            removed: r,
            vus: vus(&without(candidates, r), space),
        }
    } else if levels.len() == 1 {
        // without redundant points the first ranking hull is the full closure
        if clipped_volume(&hull, space.feasible()).max(0.0) <= vol_ori {
            return keep_old;
        }
        let c = contributions_on_hull(candidates, &hull, space, exec, Some(cache));
        let i = argmin_random(&c.delta, rng);
        Reduction {
            removed: i,
            vus: c.without[i],
        }
    } else {
        let last = &levels.levels()[levels.len() - 1];
        let members: Vec<ObjectiveVector> = last.iter().map(|&i| candidates[i]).collect();
        let delta = vus_contributions(&members, space, exec).delta;
        let i = last[argmin_random(&delta, rng)];
        if i == offspring {
            return keep_old;
        }
        Reduction {
            removed: i,
            vus: vus(&without(candidates, i), space),
        }
    };

    if proposal.vus < vol_ori {
        keep_old
    } else {
        proposal
    }
}

/// Adds `offspring` to `population` and removes one individual: a random
/// redundant one if any exist; otherwise the smallest VUS contributor of the
/// last hull level, or, with a single level, of the whole set if the
/// offspring raised the VUS (else the offspring itself). The result never has
/// a lower VUS than `population`.
pub fn non_descending_reduce<R: Rng + ?Sized>(
    population: &[Individual],
    offspring: Individual,
    space: &RocSpace,
    rng: &mut R,
) -> Vec<Individual> {
    let mut all = population.to_vec();
    all.push(offspring);
    let points: Vec<ObjectiveVector> = all.iter().map(|i| i.objectives).collect();
    let vol_ori = vus(&points[..population.len()], space);
    let r = reduce_step(&points, vol_ori, space, Execution::default(), &mut LossCache::default(), rng);
    all.remove(r.removed);
    all
}
