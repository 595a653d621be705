//! Solution-set quality metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ObjectiveVector, Sense};

/// Hypervolume reference coordinate, after mapping objectives to min sense.
pub const HV_REFERENCE: f64 = 1.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("cannot summarize an empty sample")]
    Empty,
}

/// Per-run metrics as written to `runs.csv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub vus: f64,
    pub gini: f64,
    pub hypervolume: f64,
    pub wall_time_ms: u64,
    pub evaluations: u64,
}

/// Gini coefficient of a sample of non-negative distances.
///
/// Uses `G = (1/n)(n + 1 - 2 sum_i (n+1-i) d_i / sum_i d_i)` with the `d_i`
/// sorted ascending, evaluated in the equivalent pairwise form
/// `sum_{i <= n/2} (n+1-2i)(d_{n+1-i} - d_i) / (n sum d)` so that identical
/// distances give exactly zero. Fewer than two values, or an all-zero sample,
/// give 0.
pub fn gini_coefficient(distances: &[f64]) -> f64 {
    let n = distances.len();
    if n < 2 {
        return 0.0;
    }
    let mut d = distances.to_vec();
    d.sort_by(f64::total_cmp);
    let total: f64 = d.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let spread: f64 = (0..n / 2)
        .map(|i| (n - 1 - 2 * i) as f64 * (d[n - 1 - i] - d[i]))
        .sum();
    spread / (n as f64 * total)
}

/// Euclidean distance from each point to its nearest other point.
pub fn nearest_neighbor_distances(points: &[ObjectiveVector]) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| p.distance(q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Gini coefficient of the nearest-neighbor spacing of a point set; 0 means
/// perfectly even spacing.
pub fn gini(points: &[ObjectiveVector]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    gini_coefficient(&nearest_neighbor_distances(points))
}

/// Inserts `q` into a 2-D staircase of indices (x ascending, y descending),
/// dropping whatever it dominates. Returns false if `q` is itself dominated.
fn stair_insert(stair: &mut Vec<usize>, points: &[ObjectiveVector], q: usize) -> bool {
    let (x, y) = (points[q][0], points[q][1]);
    if stair.iter().any(|&j| points[j][0] <= x && points[j][1] <= y) {
        return false;
    }
    stair.retain(|&j| !(points[j][0] >= x && points[j][1] >= y));
    let at = stair.partition_point(|&j| points[j][0] < x);
    stair.insert(at, q);
    true
}

/// z-sweep over a 2-D staircase. Returns the dominated volume and each
/// point's exclusive contribution.
///
/// Every staircase point also keeps the staircase of points it hides in the
/// current slice (its "shadow"); its exclusive area is its rectangle between
/// the neighbouring steps minus the part covered by that shadow.
fn sweep(points: &[ObjectiveVector], reference: &ObjectiveVector) -> (f64, Vec<f64>) {
    let (rx, ry) = (reference[0], reference[1]);
    let mut contrib = vec![0.0; points.len()];
    let mut order: Vec<usize> = (0..points.len())
        .filter(|&i| (0..3).all(|k| points[i][k] <= reference[k]))
        .collect();
    order.sort_by(|&a, &b| points[a][2].total_cmp(&points[b][2]).then(a.cmp(&b)));

    let mut stair: Vec<usize> = Vec::with_capacity(order.len());
    let mut shadow: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    let mut total = 0.0;
    let mut z_prev = 0.0;

    let advance = |stair: &[usize], shadow: &[Vec<usize>], dz: f64, contrib: &mut [f64]| -> f64 {
        let mut area = 0.0;
        for (s, &i) in stair.iter().enumerate() {
            let (x, y) = (points[i][0], points[i][1]);
            let xn = stair.get(s + 1).map_or(rx, |&j| points[j][0]);
            let yp = if s == 0 { ry } else { points[stair[s - 1]][1] };
            area += (xn - x) * (ry - y);

            let hidden: Vec<usize> = shadow[i]
                .iter()
                .copied()
                .filter(|&q| points[q][0] < xn && points[q][1] < yp)
                .collect();
            let covered: f64 = hidden
                .iter()
                .enumerate()
                .map(|(h, &q)| {
                    let right = hidden.get(h + 1).map_or(xn, |&r| points[r][0]);
                    (right - points[q][0]) * (yp - points[q][1])
                })
                .sum();
            contrib[i] += ((xn - x) * (yp - y) - covered) * dz;
        }
        area * dz
    };

    for &i in &order {
        let p = points[i];
        if !stair.is_empty() {
            total += advance(&stair, &shadow, p[2] - z_prev, &mut contrib);
        }
        z_prev = p[2];

        let owners: Vec<usize> = stair
            .iter()
            .copied()
            .filter(|&j| points[j][0] <= p[0] && points[j][1] <= p[1])
            .collect();
        if !owners.is_empty() {
            // hidden by two steps at once, it can never be exposed to just one
            if let [owner] = owners[..] {
                stair_insert(&mut shadow[owner], points, i);
            }
            continue;
        }
        let (covered, kept): (Vec<usize>, Vec<usize>) = stair
            .iter()
            .partition(|&&j| points[j][0] >= p[0] && points[j][1] >= p[1]);
        stair = kept;
        for j in covered {
            stair_insert(&mut shadow[i], points, j);
            for q in std::mem::take(&mut shadow[j]) {
                stair_insert(&mut shadow[i], points, q);
            }
        }
        let at = stair.partition_point(|&j| points[j][0] < p[0]);
        stair.insert(at, i);
    }
    if !stair.is_empty() {
        total += advance(&stair, &shadow, reference[2] - z_prev, &mut contrib);
    }
    (total, contrib)
}

/// Volume of the union of boxes `[p, reference]` for min-sense points.
/// Points exceeding the reference in any coordinate are ignored.
pub fn hypervolume3(points: &[ObjectiveVector], reference: &ObjectiveVector) -> f64 {
    sweep(points, reference).0
}

/// Exclusive hypervolume contribution of every point, in input order.
pub fn hypervolume_contributions(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Vec<f64> {
    sweep(points, reference).1
}

/// Hypervolume after mapping to min sense, against `(1.1, 1.1, 1.1)`.
pub fn population_hypervolume(points: &[ObjectiveVector], sense: Sense) -> f64 {
    let mapped: Vec<ObjectiveVector> = points.iter().map(|p| sense.to_min(p)).collect();
    hypervolume3(&mapped, &ObjectiveVector::splat(HV_REFERENCE))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Mean and population standard deviation, computed in two passes.
pub fn summarize(values: &[f64]) -> Result<Summary, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(Summary { mean, std: var.sqrt() })
}
