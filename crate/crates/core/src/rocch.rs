//! ROC-space semantics: reference points, the random-guess plane, the
//! volume-under-surface indicator and iso-performance operating points.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::ch_sort_objectives;
use crate::geometry::{
    closure_support, clipped_volume, is_push_of, quickhull, ConvexHull, Halfspace,
    ObjectiveVector, Sense, HULL_TOLERANCE,
};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Error, PartialEq)]
pub enum RocchError {
    #[error("priors must be non-negative and sum to 1, got {0:?}")]
    InvalidPriors([f64; 3]),
    #[error("costs must be finite and non-negative, got {0:?}")]
    InvalidCosts([f64; 3]),
    #[error("instance count must be positive")]
    NoInstances,
    #[error("operating-point selection needs the three-class space")]
    WrongSpace,
    #[error("operating-point selection needs at least one point")]
    NoPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceLabel {
    /// (fpr, fnr, ccr), minimized.
    Augmented,
    /// (tar, tbr, tcr), maximized.
    ThreeClass,
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceLabel::Augmented => "augmented",
            SpaceLabel::ThreeClass => "three-class",
        })
    }
}

/// A 3-D ROC space: optimization sense, reference classifiers and the
/// feasible side of the random-guess plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocSpace {
    label: SpaceLabel,
    sense: Sense,
    references: Vec<ObjectiveVector>,
    feasible: Halfspace,
}

impl RocSpace {
    /// Binary classification with complexity as third axis; feasible side `fpr + fnr <= 1`.
    pub fn augmented() -> Self {
        Self {
            label: SpaceLabel::Augmented,
            sense: Sense::Min,
            references: vec![
                ObjectiveVector::new(1.0, 0.0, 0.0),
                ObjectiveVector::new(0.0, 1.0, 0.0),
                ObjectiveVector::new(1.0, 0.0, 1.0),
                ObjectiveVector::new(0.0, 1.0, 1.0),
            ],
            feasible: Halfspace::new(ObjectiveVector::new(1.0, 1.0, 0.0), 1.0),
        }
    }

    /// Three-class true rates; feasible side `tar + tbr + tcr >= 1`.
    pub fn three_class() -> Self {
        Self {
            label: SpaceLabel::ThreeClass,
            sense: Sense::Max,
            references: vec![
                ObjectiveVector::new(1.0, 0.0, 0.0),
                ObjectiveVector::new(0.0, 1.0, 0.0),
                ObjectiveVector::new(0.0, 0.0, 1.0),
            ],
            feasible: Halfspace::new(ObjectiveVector::splat(-1.0), -1.0),
        }
    }

    pub fn label(&self) -> SpaceLabel {
        self.label
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn references(&self) -> &[ObjectiveVector] {
        &self.references
    }

    pub fn feasible(&self) -> &Halfspace {
        &self.feasible
    }

    /// The unattainable perfect classifier.
    pub fn perfect_point(&self) -> ObjectiveVector {
        ObjectiveVector::splat(self.sense.best())
    }

    /// VUS of a perfect classifier set.
    pub fn max_vus(&self) -> f64 {
        match self.label {
            SpaceLabel::Augmented => 0.5,
            SpaceLabel::ThreeClass => 5.0 / 6.0,
        }
    }

    fn with_references(&self, points: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
        points.iter().chain(&self.references).copied().collect()
    }
}

fn closure_volume(candidates: &[ObjectiveVector], space: &RocSpace) -> f64 {
    let support = closure_support(candidates, space.sense);
    let hull = quickhull(&support);
    clipped_volume(&hull, &space.feasible).max(0.0)
}

/// Volume under the ROC convex hull.
///
/// The feasible-side volume of the unit box that is weakly dominated by some
/// point of the convex hull of `points` together with the reference points.
pub fn vus(points: &[ObjectiveVector], space: &RocSpace) -> f64 {
    closure_volume(&space.with_references(points), space)
}

/// VUS of a set and of every leave-one-out subset.
#[derive(Clone, Debug, PartialEq)]
pub struct VusContributions {
    pub total: f64,
    /// `without[i]` is the VUS of the set with point `i` removed.
    pub without: Vec<f64>,
    /// `delta[i] = total - without[i]`, never negative.
    pub delta: Vec<f64>,
}

/// Leave-one-out VUS values for every point.
///
/// A point only matters if it is the sole generator of some vertex of the
/// closure hull; every other point keeps the hull, and so the VUS, unchanged
/// and is assigned a contribution of exactly zero without recomputation.
///
/// For the others the lost region is found locally. With `V` the vertices
/// the point alone generates, `B` their hull neighbours and `Q` the pushed
/// copies of the remaining points inside `conv(V ∪ B)`, the region is
/// `conv(V ∪ B) \ conv(B ∪ Q)`, so two small hulls replace a full one.
pub fn vus_contributions(points: &[ObjectiveVector], space: &RocSpace, exec: Execution) -> VusContributions {
    let all = space.with_references(points);
    let hull = quickhull(&closure_support(&all, space.sense));
    contributions_on_hull(points, &hull, space, exec, None)
}

/// [`vus_contributions`] given the closure hull of `points` and the
/// reference points. Losses found in `cache` are reused, and the cache is
/// left holding exactly the neighbourhoods of this call.
pub(crate) fn contributions_on_hull(
    points: &[ObjectiveVector],
    hull: &ConvexHull,
    space: &RocSpace,
    exec: Execution,
    cache: Option<&mut LossCache>,
) -> VusContributions {
    let n = points.len();
    let all = space.with_references(points);
    let total = clipped_volume(hull, &space.feasible).max(0.0);
    if hull.is_degenerate() {
        return VusContributions {
            total,
            without: vec![total; n],
            delta: vec![0.0; n],
        };
    }

    // sole producer of every hull vertex, if there is exactly one
    let owner: Vec<Option<usize>> = hull
        .vertices()
        .iter()
        .map(|v| {
            let mut producers = all
                .iter()
                .enumerate()
                .filter(|(_, p)| is_push_of(v, p, space.sense))
                .map(|(j, _)| j);
            match (producers.next(), producers.next()) {
                (Some(j), None) if j < n => Some(j),
                _ => None,
            }
        })
        .collect();
    let worst = space.sense.worst();
    let pushes: Vec<(ObjectiveVector, usize)> = all
        .iter()
        .enumerate()
        .flat_map(|(j, p)| {
            (0..8u8).map(move |mask| {
                let mut q = *p;
                for k in (0..3).filter(|k| mask & (1 << k) != 0) {
                    q.0[k] = worst;
                }
                (q, j)
            })
        })
        .collect();

    // facets touching a vertex owned by each point
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, facet) in hull.facets().iter().enumerate() {
        let mut seen: Vec<usize> = facet.vertices.iter().filter_map(|&v| owner[v]).collect();
        seen.sort_unstable();
        seen.dedup();
        for i in seen {
            star[i].push(f);
        }
    }
    let regions: Vec<Option<LocalRegion>> = map_indexed(n, exec, |i| {
        (!star[i].is_empty()).then(|| LocalRegion::new(i, hull, &star[i], &owner, &pushes))
    });
    let known = cache.as_deref();
    let losses: Vec<Option<(Vec<u64>, f64)>> = map_indexed(n, exec, |i| {
        let region = regions[i].as_ref()?;
        let key = region.key();
        let loss = match known.and_then(|c| c.entries.get(&key)) {
            Some(&loss) => loss,
            None => region.loss(&space.feasible),
        };
        Some((key, loss))
    });
    let delta: Vec<f64> = losses
        .iter()
        .map(|l| l.as_ref().map_or(0.0, |&(_, loss)| loss.clamp(0.0, total)))
        .collect();
    if let Some(cache) = cache {
        cache.entries = losses.into_iter().flatten().collect();
    }
    let without = delta.iter().map(|d| total - d).collect();
    VusContributions { total, without, delta }
}

/// Closure-volume losses of hull neighbourhoods already evaluated, keyed by
/// the exact coordinates of the neighbourhood.
#[derive(Clone, Debug, Default)]
pub(crate) struct LossCache {
    entries: HashMap<Vec<u64>, f64>,
}

/// What removing one point changes on the closure hull, in a canonical
/// order so that equal neighbourhoods give bit-identical losses.
struct LocalRegion {
    /// Hull vertices the point alone generates.
    lost: Vec<ObjectiveVector>,
    /// Other vertices of the facets around them.
    ring: Vec<ObjectiveVector>,
    /// Pushed copies of the other points within the bounding box of both,
    /// sorted and deduplicated.
    nearby: Vec<ObjectiveVector>,
}

impl LocalRegion {
    fn new(
        i: usize,
        hull: &ConvexHull,
        star: &[usize],
        owner: &[Option<usize>],
        pushes: &[(ObjectiveVector, usize)],
    ) -> Self {
        let verts = hull.vertices();
        let mut own = vec![false; verts.len()];
        let mut ring = vec![false; verts.len()];
        for &f in star {
            for &v in &hull.facets()[f].vertices {
                own[v] = owner[v] == Some(i);
                ring[v] |= owner[v] != Some(i);
            }
        }
        let lost: Vec<ObjectiveVector> = (0..verts.len()).filter(|&v| own[v]).map(|v| verts[v]).collect();
        let ring: Vec<ObjectiveVector> = (0..verts.len()).filter(|&v| ring[v]).map(|v| verts[v]).collect();

        let (mut lo, mut hi) = (ObjectiveVector::splat(f64::INFINITY), ObjectiveVector::splat(f64::NEG_INFINITY));
        for v in lost.iter().chain(&ring) {
            for k in 0..3 {
                lo.0[k] = lo[k].min(v[k]);
                hi.0[k] = hi[k].max(v[k]);
            }
        }
        let mut nearby: Vec<ObjectiveVector> = pushes
            .iter()
            .filter(|&&(q, j)| j != i && (0..3).all(|k| q[k] >= lo[k] && q[k] <= hi[k]))
            .map(|&(q, _)| q)
            .collect();
        nearby.sort_by(|a, b| a.lex_cmp(b));
        nearby.dedup();
        Self { lost, ring, nearby }
    }

    fn key(&self) -> Vec<u64> {
        let mut key = vec![self.lost.len() as u64, self.ring.len() as u64];
        for p in self.lost.iter().chain(&self.ring).chain(&self.nearby) {
            // +0.0 so that -0.0 and 0.0 share a key
            key.extend(p.0.map(|x| (x + 0.0).to_bits()));
        }
        key
    }

    /// Clipped volume of `conv(V ∪ B) \ conv(B ∪ Q)`, with `Q` the nearby
    /// points inside the cap `conv(V ∪ B)`.
    fn loss(&self, feasible: &Halfspace) -> f64 {
        let mut cap_points = self.lost.clone();
        cap_points.extend_from_slice(&self.ring);
        let cap = quickhull(&cap_points);
        if cap.is_degenerate() {
            return 0.0;
        }
        let mut base = self.ring.clone();
        base.extend(self.nearby.iter().filter(|q| cap.contains(q, HULL_TOLERANCE)));
        // every point of Q lies in the cap, so the cap is conv(V ∪ B ∪ Q)
        clipped_volume(&cap, feasible) - clipped_volume(&quickhull(&base), feasible)
    }
}

/// Per-point VUS contribution `vus(P) - vus(P \ {p_i})`, in input order.
pub fn delta_vus(points: &[ObjectiveVector], space: &RocSpace) -> Vec<f64> {
    vus_contributions(points, space, Execution::default()).delta
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerformanceMode {
    /// Maximize `p(a) tar + p(b) tbr + p(c) tcr`.
    Accuracy,
    /// Minimize `N sum_k p(k) c(k) (1 - t_k)`.
    Cost,
}

/// Class priors, misclassification costs and instance count for choosing a
/// classifier on the three-class hull.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPointQuery {
    pub priors: [f64; 3],
    pub costs: [f64; 3],
    pub instances: u64,
    pub mode: PerformanceMode,
}

impl OperatingPointQuery {
    pub fn accuracy(priors: [f64; 3]) -> Self {
        Self {
            priors,
            costs: [1.0; 3],
            instances: 1,
            mode: PerformanceMode::Accuracy,
        }
    }

    pub fn cost(priors: [f64; 3], costs: [f64; 3], instances: u64) -> Self {
        Self {
            priors,
            costs,
            instances,
            mode: PerformanceMode::Cost,
        }
    }

    pub fn validate(&self) -> Result<(), RocchError> {
        let sum: f64 = self.priors.iter().sum();
        if self.priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(RocchError::InvalidPriors(self.priors));
        }
        if self.costs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(RocchError::InvalidCosts(self.costs));
        }
        if self.instances == 0 {
            return Err(RocchError::NoInstances);
        }
        Ok(())
    }

    /// Expected accuracy or total cost of the classifier at `p`.
    pub fn score(&self, p: &ObjectiveVector) -> f64 {
        match self.mode {
            PerformanceMode::Accuracy => (0..3).map(|k| self.priors[k] * p[k]).sum(),
            PerformanceMode::Cost => {
                let n = self.instances as f64;
                (0..3).map(|k| n * self.priors[k] * self.costs[k] * (1.0 - p[k])).sum()
            }
        }
    }

    fn better(&self, a: f64, b: f64) -> Ordering {
        match self.mode {
            PerformanceMode::Accuracy => b.total_cmp(&a),
            PerformanceMode::Cost => a.total_cmp(&b),
        }
    }
}

/// The hull vertex touched first by the iso-performance surface.
///
/// Candidates are the first hull level of `points` plus the reference points;
/// ties go to the lexicographically smallest vector.
pub fn select_operating_point(
    points: &[ObjectiveVector],
    space: &RocSpace,
    query: &OperatingPointQuery,
) -> Result<(ObjectiveVector, f64), RocchError> {
    query.validate()?;
    if space.label != SpaceLabel::ThreeClass {
        return Err(RocchError::WrongSpace);
    }
    if points.is_empty() {
        return Err(RocchError::NoPoints);
    }
    let levels = ch_sort_objectives(points, space);
    levels.levels()[0]
        .iter()
        .map(|&i| points[i])
        .chain(space.references.iter().copied())
        .map(|p| (p, query.score(&p)))
        .min_by(|(pa, sa), (pb, sb)| query.better(*sa, *sb).then(pa.lex_cmp(pb)))
        .ok_or(RocchError::NoPoints)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: f64, b: f64, c: f64) -> ObjectiveVector {
        ObjectiveVector::new(a, b, c)
    }

    #[test]
    fn extreme_values() {
        let aug = RocSpace::augmented();
        let tri = RocSpace::three_class();
        assert!((vus(&[v(0.0, 0.0, 0.0)], &aug) - 0.5).abs() < 1e-12);
        assert!((vus(&[v(1.0, 1.0, 1.0)], &tri) - 5.0 / 6.0).abs() < 1e-12);
        assert!(vus(&[v(0.4, 0.4, 0.2)], &tri).abs() < 1e-12);
        assert_eq!(vus(&[], &aug), 0.0);
        assert_eq!(vus(&[], &tri), 0.0);
    }

    #[test]
    fn reference_points_lie_on_the_guess_plane() {
        for space in [RocSpace::augmented(), RocSpace::three_class()] {
            for r in space.references() {
                assert!(space.feasible().signed_distance(r).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn duplicate_reference_is_exactly_neutral() {
        let tri = RocSpace::three_class();
        let pts = [v(0.7, 0.5, 0.4), v(0.3, 0.8, 0.6)];
        let mut with_ref = pts.to_vec();
        with_ref.push(v(0.0, 1.0, 0.0));
        assert_eq!(vus(&pts, &tri), vus(&with_ref, &tri));
    }

    #[test]
    fn dominated_point_contributes_nothing() {
        let tri = RocSpace::three_class();
        let d = delta_vus(&[v(1.0, 1.0, 1.0), v(0.9, 0.9, 0.9)], &tri);
        assert_eq!(d[1], 0.0);
        assert!(d[0] > 0.0);
    }

    #[test]
    fn symmetric_points_contribute_equally() {
        let tri = RocSpace::three_class();
        let d = delta_vus(&[v(0.8, 0.6, 0.6), v(0.6, 0.8, 0.6)], &tri);
        assert!((d[0] - d[1]).abs() < 1e-12, "{d:?}");
        assert!(d[0] > 0.0);
    }

    #[test]
    fn operating_point_examples() {
        let tri = RocSpace::three_class();
        let pts = [v(0.6, 0.6, 0.6)];
        let third = 1.0 / 3.0;
        let (p, acc) = select_operating_point(&pts, &tri, &OperatingPointQuery::accuracy([third; 3])).unwrap();
        assert_eq!(p, pts[0]);
        assert!((acc - 0.6).abs() < 1e-12);

        let (p, acc) = select_operating_point(&pts, &tri, &OperatingPointQuery::accuracy([1.0, 0.0, 0.0])).unwrap();
        assert_eq!(p, v(1.0, 0.0, 0.0));
        assert_eq!(acc, 1.0);

        let q = OperatingPointQuery::cost([third; 3], [1.0; 3], 300);
        let (p, cost) = select_operating_point(&pts, &tri, &q).unwrap();
        assert_eq!(p, pts[0]);
        assert!((cost - 120.0).abs() < 1e-9);
    }

    #[test]
    fn operating_point_errors() {
        let tri = RocSpace::three_class();
        let pts = [v(0.6, 0.6, 0.6)];
        let bad = OperatingPointQuery::accuracy([0.5, 0.5, 0.5]);
        assert_eq!(
            select_operating_point(&pts, &tri, &bad),
            Err(RocchError::InvalidPriors([0.5; 3]))
        );
        let ok = OperatingPointQuery::accuracy([1.0, 0.0, 0.0]);
        assert_eq!(
            select_operating_point(&pts, &RocSpace::augmented(), &ok),
            Err(RocchError::WrongSpace)
        );
        assert_eq!(select_operating_point(&[], &tri, &ok), Err(RocchError::NoPoints));
    }
}
