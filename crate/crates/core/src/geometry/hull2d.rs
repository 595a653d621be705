//! Planar convex hulls (Andrew's monotone chain).

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Returns the indices of the strictly convex hull vertices of `points`,
/// counter-clockwise, starting at the lexicographically smallest point.
///
/// A point whose distance to the chord of its neighbours is at most
/// `tolerance` is dropped, so collinear and duplicate points never appear.
pub fn convex_hull_2d(points: &[[f64; 2]], tolerance: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    order.dedup_by(|a, b| points[*a] == points[*b]);
    if order.len() < 3 {
        return order;
    }

    let turns_left = |o: usize, a: usize, b: usize| {
        let (po, pa, pb) = (points[o], points[a], points[b]);
        let base = ((pb[0] - po[0]).powi(2) + (pb[1] - po[1]).powi(2)).sqrt();
        cross(po, pa, pb) > tolerance * base
    };

    let mut hull: Vec<usize> = Vec::with_capacity(order.len() + 1);
    for &i in &order {
        while hull.len() >= 2 && !turns_left(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower_len && !turns_left(hull[hull.len() - 2], hull[hull.len() - 1], i) {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    if hull.len() == 2 && points[hull[0]] == points[hull[1]] {
        hull.pop();
    }
    hull
}
