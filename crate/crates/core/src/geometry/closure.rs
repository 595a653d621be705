//! Dominated closure of a point set inside the unit box.
//!
//! For a set `P` and an optimization sense, the closure is
//! `(CH(P) + dominated orthant) ∩ [0,1]^3`. It equals the convex hull of the
//! "pushed" copies of each point, obtained by replacing any subset of its
//! coordinates with the worst box bound.

use std::collections::HashSet;

use super::hull2d::convex_hull_2d;
use super::point::{ObjectiveVector, Sense};

/// Pushed copy of `p` with the coordinates flagged in `mask` set to `worst`.
fn push(p: &ObjectiveVector, mask: u8, worst: f64) -> ObjectiveVector {
    let mut c = p.0;
    for (k, x) in c.iter_mut().enumerate() {
        if mask & (1 << k) != 0 {
            *x = worst;
        }
    }
    ObjectiveVector(c)
}

/// All distinct pushed copies of every input point (at most `8n` points),
/// in input order.
pub fn dominated_closure_vertices(points: &[ObjectiveVector], sense: Sense) -> Vec<ObjectiveVector> {
    let worst = sense.worst();
    let mut seen = HashSet::with_capacity(points.len() * 8);
    let mut out: Vec<ObjectiveVector> = Vec::with_capacity(points.len() * 8);
    for p in points {
        for mask in 0..8u8 {
            let q = push(p, mask, worst);
            // +0.0 so that -0.0 and 0.0 share a key
            if seen.insert(q.0.map(|x| (x + 0.0).to_bits())) {
                out.push(q);
            }
        }
    }
    out
}

/// Whether `q` is one of the pushed copies of `p`.
pub fn is_push_of(q: &ObjectiveVector, p: &ObjectiveVector, sense: Sense) -> bool {
    let worst = sense.worst();
    (0..3).all(|k| q[k] == p[k] || q[k] == worst)
}

/// Points dominated (weakly) by another input are dropped; exact duplicates
/// keep one copy.
fn nondominated(points: &[ObjectiveVector], sense: Sense) -> Vec<ObjectiveVector> {
    let mut sorted: Vec<ObjectiveVector> = points.to_vec();
    sorted.sort_by(|a, b| a.lex_cmp(b));
    sorted.dedup();
    // a dominator precedes (min) or follows (max) its victim in lexicographic order
    (0..sorted.len())
        .filter(|&i| {
            let p = &sorted[i];
            let rivals = match sense {
                Sense::Min => &sorted[..i],
                Sense::Max => &sorted[i + 1..],
            };
            !rivals.iter().any(|q| sense.weakly_dominates(q, p))
        })
        .map(|i| sorted[i])
        .collect()
}

/// A reduced generating set for the closure, sorted and duplicate-free.
///
/// Same convex hull as [`dominated_closure_vertices`], but dominated inputs are
/// removed and, on each box face `c_k = worst`, only the planar hull vertices
/// of the pushes lying on that face are kept. Identical input sets always
/// produce bit-identical output.
pub fn closure_support(points: &[ObjectiveVector], sense: Sense) -> Vec<ObjectiveVector> {
    let worst = sense.worst();
    let front = nondominated(points, sense);
    let mut support = front.clone();
    let better = |x: f64, y: f64| match sense {
        Sense::Min => x < y,
        Sense::Max => x > y,
    };
    for k in 0..3 {
        let (a, b) = ((k + 1) % 3, (k + 2) % 3);
        // pushes on the face c_k = worst are dominated in (c_a, c_b) by the
        // pushes of the planar non-dominated chain, plus three corner pushes
        let mut proj: Vec<[f64; 2]> = front.iter().map(|p| [p[a], p[b]]).collect();
        proj.sort_by(|x, y| {
            let (x, y) = match sense {
                Sense::Min => (x, y),
                Sense::Max => (y, x),
            };
            x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1]))
        });
        let mut chain: Vec<[f64; 2]> = Vec::with_capacity(proj.len() + 3);
        for q in proj {
            if chain.last().is_none_or(|c| better(q[1], c[1])) {
                chain.push(q);
            }
        }
        let (Some(&first), Some(&last)) = (chain.first(), chain.last()) else {
            continue;
        };
        chain.extend([[first[0], worst], [worst, last[1]], [worst, worst]]);
        let lift = |q: [f64; 2]| {
            let mut c = [worst; 3];
            c[a] = q[0];
            c[b] = q[1];
            ObjectiveVector(c)
        };
        support.extend(convex_hull_2d(&chain, 0.0).into_iter().map(|i| lift(chain[i])));
    }
    support.sort_by(|a, b| a.lex_cmp(b));
    support.dedup();
    support
}
