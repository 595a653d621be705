//! Independent brute-force oracles shared by the integration tests and the
//! acceptance runner. None of them call into the hull or volume code.

#![allow(dead_code)]

use chemoa::{Halfspace, ObjectiveVector, Sense};
use rand::Rng;

pub fn v(a: f64, b: f64, c: f64) -> ObjectiveVector {
    ObjectiveVector::new(a, b, c)
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> Vec<ObjectiveVector> {
    (0..n).map(|_| v(rng.gen(), rng.gen(), rng.gen())).collect()
}

/// A supporting plane `normal · p <= offset` through three input points.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub normal: ObjectiveVector,
    pub offset: f64,
}

/// Every plane through three points that has all points on one side, with
/// the indices of the points it touches.
pub fn supporting_planes(points: &[ObjectiveVector], eps: f64) -> (Vec<Plane>, Vec<usize>) {
    let n = points.len();
    let mut planes = Vec::new();
    let mut on_hull = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (points[j] - points[i]).cross(&(points[k] - points[i]));
                let len = normal.norm();
                if len < 1e-12 {
                    continue;
                }
                let normal = normal * (1.0 / len);
                let offset = normal.dot(&points[i]);
                let d: Vec<f64> = points.iter().map(|p| normal.dot(p) - offset).collect();
                let plane = if d.iter().all(|&x| x <= eps) {
                    Plane { normal, offset }
                } else if d.iter().all(|&x| x >= -eps) {
                    Plane {
                        normal: -normal,
                        offset: -offset,
                    }
                } else {
                    continue;
                };
                planes.push(plane);
                for (m, &x) in d.iter().enumerate() {
                    if x.abs() <= eps {
                        on_hull[m] = true;
                    }
                }
            }
        }
    }
    let touched = (0..n).filter(|&m| on_hull[m]).collect();
    (planes, touched)
}

/// Hull vertices by facet enumeration, for points in general position.
pub fn brute_hull_vertices(points: &[ObjectiveVector]) -> Vec<usize> {
    supporting_planes(points, 1e-12).1
}

pub fn inside_planes(planes: &[Plane], x: &ObjectiveVector) -> bool {
    planes.iter().all(|p| p.normal.dot(x) <= p.offset)
}

/// Monte-Carlo volume of the hull of `points` (optionally cut by `cut`),
/// sampled in the points' bounding box. Returns the estimate and its
/// standard error.
pub fn mc_hull_volume<R: Rng>(
    points: &[ObjectiveVector],
    cut: Option<&Halfspace>,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let (planes, _) = supporting_planes(points, 1e-12);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let box_volume: f64 = (0..3).map(|k| hi[k] - lo[k]).product();
    let hits = (0..samples)
        .filter(|_| {
            let x = v(
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
                rng.gen_range(lo[2]..hi[2]),
            );
            inside_planes(&planes, &x) && cut.is_none_or(|h| h.normal().dot(&x) <= h.offset())
        })
        .count();
    let p = hits as f64 / samples as f64;
    (p * box_volume, box_volume * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` if it is (numerically) singular.
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs()))?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Whether `x` is weakly dominated by some convex combination of `points`.
///
/// This is the feasibility LP `sum l = 1, l >= 0, sum l_j p_j <= x`
/// (min sense), decided by enumerating its basic solutions: `k` points with
/// `k - 1` of the three dominance constraints tight.
pub fn dominated_by_hull(points: &[ObjectiveVector], x: &ObjectiveVector, sense: Sense, eps: f64) -> bool {
    let pts: Vec<ObjectiveVector> = points.iter().map(|p| sense.to_min(p)).collect();
    let x = sense.to_min(x);
    for k in 1..=4.min(pts.len()) {
        for set in subsets(pts.len(), k) {
            for tight in subsets(3, k - 1) {
                let mut a = vec![vec![1.0; k]];
                let mut b = vec![1.0];
                for &c in &tight {
                    a.push(set.iter().map(|&j| pts[j][c]).collect());
                    b.push(x[c]);
                }
                let Some(l) = solve(a, b) else { continue };
                if l.iter().any(|&w| w < -eps) {
                    continue;
                }
                let ok = (0..3).all(|c| set.iter().zip(&l).map(|(&j, w)| w * pts[j][c]).sum::<f64>() <= x[c] + eps);
                if ok {
                    return true;
                }
            }
        }
    }
    false
}

/// Monte-Carlo VUS: the fraction of the unit box that is feasible and
/// dominated by the hull of `points` plus `references`.
pub fn mc_vus<R: Rng>(
    points: &[ObjectiveVector],
    references: &[ObjectiveVector],
    feasible: &Halfspace,
    sense: Sense,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let mut all = points.to_vec();
    all.extend_from_slice(references);
    let hits = (0..samples)
        .filter(|_| {
            let x = random_points(rng, 1)[0];
            feasible.normal().dot(&x) <= feasible.offset() && dominated_by_hull(&all, &x, sense, 1e-12)
        })
        .count();
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

/// Union volume of the boxes `[p, reference]` by inclusion–exclusion.
pub fn hv_inclusion_exclusion(points: &[ObjectiveVector], reference: &ObjectiveVector) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = [f64::NEG_INFINITY; 3];
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for k in 0..3 {
                    corner[k] = corner[k].max(p[k]);
                }
            }
        }
        let vol: f64 = (0..3).map(|k| (reference[k] - corner[k]).max(0.0)).product();
        if mask.count_ones() % 2 == 1 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

/// Random dyadic point with coordinates in `{0, 1/16, ..., 1}`, so that
/// box volumes are computed without rounding.
pub fn dyadic_point<R: Rng>(rng: &mut R) -> ObjectiveVector {
    let c = |rng: &mut R| rng.gen_range(0..=16) as f64 / 16.0;
    v(c(rng), c(rng), c(rng))
}
