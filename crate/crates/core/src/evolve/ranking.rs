//! Hull-based ranking, Pareto sorting and crowding distance.

use serde::{Deserialize, Serialize};

use super::Individual;
use crate::geometry::{closure_support, quickhull, ConvexHull, ObjectiveVector, Sense};
use crate::rocch::RocSpace;

/// Objective vectors closer than this are redundant copies of each other.
pub const REDUNDANCY_TOLERANCE: f64 = 1e-9;

// facet normals are unit length; this absorbs rounding in their signs
const NORMAL_SLACK: f64 = 1e-9;

/// Hull levels `F_1..F_v` plus the trailing level of redundant individuals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAssignment {
    levels: Vec<Vec<usize>>,
    redundant: Vec<usize>,
}

impl LevelAssignment {
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn redundant(&self) -> &[usize] {
        &self.redundant
    }

    /// Number of hull levels, excluding the redundant level.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty() && self.redundant.is_empty()
    }

    /// 1-based level of every individual; redundant ones get `len() + 1`.
    pub fn level_of(&self, population: usize) -> Vec<usize> {
        let mut out = vec![0; population];
        for (l, level) in self.levels.iter().enumerate() {
            for &i in level {
                out[i] = l + 1;
            }
        }
        for &i in &self.redundant {
            out[i] = self.levels.len() + 1;
        }
        out
    }
}

fn improving(normal: &ObjectiveVector, sense: Sense) -> bool {
    match sense {
        Sense::Min => (0..3).all(|k| normal[k] <= NORMAL_SLACK),
        Sense::Max => (0..3).all(|k| normal[k] >= -NORMAL_SLACK),
    }
}

/// Hull ranking of objective vectors.
///
/// Redundant points (within [`REDUNDANCY_TOLERANCE`] of an earlier kept one)
/// are split off first. The rest are peeled level by level on the dominated
/// closure hull of the remaining points and the reference points: a point
/// joins the current level when it is a vertex of an improving facet and no
/// point of that set strictly dominates it. If no remaining point qualifies,
/// the remaining hull vertices form the level, and failing that all remaining
/// points do, so the loop always terminates.
pub fn ch_sort_objectives(points: &[ObjectiveVector], space: &RocSpace) -> LevelAssignment {
    ch_sort_with_hull(points, space).0
}

/// [`ch_sort_objectives`] together with the first-round closure hull, that of
/// the non-redundant points and the reference points.
pub(crate) fn ch_sort_with_hull(points: &[ObjectiveVector], space: &RocSpace) -> (LevelAssignment, ConvexHull) {
    let mut kept: Vec<usize> = Vec::with_capacity(points.len());
    let mut redundant = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if kept.iter().any(|&j| points[j].distance(p) < REDUNDANCY_TOLERANCE) {
            redundant.push(i);
        } else {
            kept.push(i);
        }
    }

    let sense = space.sense();
    let mut levels = Vec::new();
    let mut first_hull = None;
    let mut remaining = kept;
    let mut input: Vec<ObjectiveVector> = Vec::with_capacity(remaining.len() + space.references().len());
    loop {
        input.clear();
        input.extend(remaining.iter().map(|&i| points[i]));
        input.extend_from_slice(space.references());
        let hull = quickhull(&closure_support(&input, sense));
        if remaining.is_empty() {
            first_hull.get_or_insert(hull);
            break;
        }

        let level: Vec<usize> = if hull.is_degenerate() {
            remaining.clone()
        } else {
            let mut on_front = vec![false; hull.vertices().len()];
            for f in hull.facets().iter().filter(|f| improving(&f.normal, sense)) {
                for &v in &f.vertices {
                    on_front[v] = true;
                }
            }
            let is_vertex = |p: &ObjectiveVector, front_only: bool| {
                hull.vertices()
                    .iter()
                    .zip(&on_front)
                    .any(|(v, &front)| v == p && (front || !front_only))
            };
            let undominated = |p: &ObjectiveVector| !input.iter().any(|q| sense.dominates(q, p));
            let mut level: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| is_vertex(&points[i], true) && undominated(&points[i]))
                .collect();
            if level.is_empty() {
                level = remaining.iter().copied().filter(|&i| is_vertex(&points[i], false)).collect();
            }
            if level.is_empty() {
                level = remaining.clone();
            }
            level
        };
        remaining.retain(|i| !level.contains(i));
        levels.push(level);
        first_hull.get_or_insert(hull);
    }
    let hull = first_hull.expect("the loop runs at least once");
    (LevelAssignment { levels, redundant }, hull)
}

/// [`ch_sort_objectives`] on evaluated individuals.
pub fn ch_sort(population: &[Individual], space: &RocSpace) -> LevelAssignment {
    let points: Vec<ObjectiveVector> = population.iter().map(|i| i.objectives).collect();
    ch_sort_objectives(&points, space)
}

/// Fast non-dominated sorting into Pareto levels of indices.
pub fn nondominated_sort(points: &[ObjectiveVector], sense: Sense) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if sense.dominates(&points[i], &points[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if sense.dominates(&points[j], &points[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front`, in the order of `front`.
/// Boundary members of every objective with a non-zero range get infinity.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(points: &[ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..3 {
        order.sort_by(|&a, &b| points[front[a]][k].total_cmp(&points[front[b]][k]).then(a.cmp(&b)));
        let lo = points[front[order[0]]][k];
        let hi = points[front[order[n - 1]]][k];
        if hi <= lo {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let gap = points[front[order[w + 1]]][k] - points[front[order[w - 1]]][k];
            dist[order[w]] += gap / (hi - lo);
        }
    }
    dist
}
