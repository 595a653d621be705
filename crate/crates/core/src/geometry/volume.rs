//! Polytope volumes by centroid-fan tetrahedralization.

use super::hull::ConvexHull;
use super::point::{Halfspace, ObjectiveVector};

fn det(a: ObjectiveVector, b: ObjectiveVector, c: ObjectiveVector) -> f64 {
    a.dot(&b.cross(&c))
}

/// Unsigned volume of the tetrahedron `abcd`.
pub fn tetrahedron_volume(a: ObjectiveVector, b: ObjectiveVector, c: ObjectiveVector, d: ObjectiveVector) -> f64 {
    det(b - a, c - a, d - a).abs() / 6.0
}

/// Volume of a prism-like cell with triangles `bottom` and `top`, where
/// `bottom[i]` is joined to `top[i]` and every side face is planar.
fn wedge_volume(bottom: [ObjectiveVector; 3], top: [ObjectiveVector; 3]) -> f64 {
    tetrahedron_volume(bottom[0], bottom[1], bottom[2], top[0])
        + tetrahedron_volume(bottom[1], bottom[2], top[0], top[1])
        + tetrahedron_volume(bottom[2], top[0], top[1], top[2])
}

/// Volume of the part of tetrahedron `tet` inside `h`.
///
/// The retained piece is either empty, the whole tetrahedron, a single
/// smaller tetrahedron, or a wedge split into three tetrahedra.
pub fn clipped_tetrahedron_volume(tet: [ObjectiveVector; 4], h: &Halfspace) -> f64 {
    let s = tet.map(|p| h.signed_distance(&p));
    let inside: Vec<usize> = (0..4).filter(|&i| s[i] <= 0.0).collect();
    let outside: Vec<usize> = (0..4).filter(|&i| s[i] > 0.0).collect();
    // crossing point on edge (i inside, o outside)
    let cut = |i: usize, o: usize| {
        let t = s[i] / (s[i] - s[o]);
        tet[i] + (tet[o] - tet[i]) * t
    };
    match inside.len() {
        0 => 0.0,
        4 => tetrahedron_volume(tet[0], tet[1], tet[2], tet[3]),
        1 => {
            let i = inside[0];
            let [o0, o1, o2] = [outside[0], outside[1], outside[2]];
            tetrahedron_volume(tet[i], cut(i, o0), cut(i, o1), cut(i, o2))
        }
        2 => {
            let (a, b) = (inside[0], inside[1]);
            let (c, d) = (outside[0], outside[1]);
            wedge_volume([tet[a], cut(a, c), cut(a, d)], [tet[b], cut(b, c), cut(b, d)])
        }
        _ => {
            let [a, b, c] = [inside[0], inside[1], inside[2]];
            let d = outside[0];
            wedge_volume([tet[a], tet[b], tet[c]], [cut(a, d), cut(b, d), cut(c, d)])
        }
    }
}

/// Lebesgue volume of the hull; zero for degenerate hulls.
pub fn hull_volume(hull: &ConvexHull) -> f64 {
    if hull.is_degenerate() {
        return 0.0;
    }
    let c = hull.centroid();
    let v = hull.vertices();
    let total: f64 = hull
        .facets()
        .iter()
        .map(|f| {
            let [a, b, d] = f.vertices;
            det(v[a] - c, v[b] - c, v[d] - c) / 6.0
        })
        .sum();
    total.max(0.0)
}

/// Volume of `{p in hull : h contains p}`.
pub fn clipped_volume(hull: &ConvexHull, h: &Halfspace) -> f64 {
    if hull.is_degenerate() {
        return 0.0;
    }
    let c = hull.centroid();
    let v = hull.vertices();
    hull.facets()
        .iter()
        .map(|f| {
            let [a, b, d] = f.vertices;
            clipped_tetrahedron_volume([c, v[a], v[b], v[d]], h)
        })
        .sum()
}
