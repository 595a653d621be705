//! Quickhull in three dimensions with an absolute coplanarity tolerance.

use super::hull2d::convex_hull_2d;
use super::point::ObjectiveVector;

/// Points closer than this to a facet plane are treated as lying on it.
pub const HULL_TOLERANCE: f64 = 1e-9;

/// An outward-oriented triangular facet. Indices refer to [`ConvexHull::vertices`].
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 3],
    pub normal: ObjectiveVector,
    pub offset: f64,
}

impl Facet {
    pub fn signed_distance(&self, p: &ObjectiveVector) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Convex hull of a finite point set.
///
/// `vertices` holds the extreme points in increasing order of their input
/// index; `sources[i]` is the input index of `vertices[i]`. A degenerate hull
/// (affine dimension below three) has no facets and zero volume; its vertex
/// list is still the set of extreme points within the lower-dimensional span.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexHull {
    vertices: Vec<ObjectiveVector>,
    sources: Vec<usize>,
    facets: Vec<Facet>,
    degenerate: bool,
}

impl ConvexHull {
    pub fn vertices(&self) -> &[ObjectiveVector] {
        &self.vertices
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Mean of the vertex positions; an interior point for full-dimensional hulls.
    pub fn centroid(&self) -> ObjectiveVector {
        if self.vertices.is_empty() {
            return ObjectiveVector::ZERO;
        }
        let sum = self
            .vertices
            .iter()
            .fold(ObjectiveVector::ZERO, |acc, v| acc + *v);
        sum * (1.0 / self.vertices.len() as f64)
    }

    /// Facet-plane containment test with an absolute tolerance.
    pub fn contains(&self, p: &ObjectiveVector, tolerance: f64) -> bool {
        !self.degenerate && self.facets.iter().all(|f| f.signed_distance(p) <= tolerance)
    }
}

/// A horizon edge as (visible face, edge index).
type HorizonEdge = (usize, usize);

#[derive(Clone, Debug)]
struct Face {
    v: [usize; 3],
    normal: ObjectiveVector,
    offset: f64,
    // neighbour across edge (v[k], v[k + 1])
    nb: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

fn plane(a: &ObjectiveVector, b: &ObjectiveVector, c: &ObjectiveVector) -> (ObjectiveVector, f64) {
    let n = (*b - *a).cross(&(*c - *a));
    let len = n.norm();
    let n = if len > 0.0 { n * (1.0 / len) } else { n };
    (n, n.dot(a))
}

enum Seed {
    Simplex([usize; 4]),
    Flat { dim: usize, basis: [usize; 3] },
}

struct Builder<'a> {
    pts: &'a [ObjectiveVector],
    faces: Vec<Face>,
    interior: ObjectiveVector,
    // per-face visibility of the current eye: 0 unknown, 1 visible, 2 hidden
    state: Vec<u8>,
    touched: Vec<usize>,
    // per-vertex scratch for stitching new faces around the horizon
    by_start: Vec<usize>,
    by_end: Vec<usize>,
    // emptied outside-lists of dead faces, reused by new ones
    spare: Vec<Vec<usize>>,
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [ObjectiveVector], capacity: usize) -> Self {
        Self {
            pts,
            faces: Vec::with_capacity(capacity),
            interior: ObjectiveVector::ZERO,
            state: Vec::with_capacity(capacity),
            touched: Vec::new(),
            by_start: vec![usize::MAX; pts.len()],
            by_end: vec![usize::MAX; pts.len()],
            spare: Vec::new(),
        }
    }

    fn dist(&self, face: usize, p: usize) -> f64 {
        let f = &self.faces[face];
        f.normal.dot(&self.pts[p]) - f.offset
    }

    fn new_face(&mut self, v: [usize; 3]) -> usize {
        let (normal, offset) = plane(&self.pts[v[0]], &self.pts[v[1]], &self.pts[v[2]]);
        let outside = self.spare.pop().unwrap_or_default();
        self.faces.push(Face {
            v,
            normal,
            offset,
            nb: [usize::MAX; 3],
            outside,
            alive: true,
        });
        self.faces.len() - 1
    }

    fn seed(&mut self, simplex: [usize; 4], candidates: &[usize]) {
        let [a, b, c, d] = simplex;
        self.interior = (self.pts[a] + self.pts[b] + self.pts[c] + self.pts[d]) * 0.25;
        let mut tris = [[a, b, c], [a, d, b], [b, d, c], [c, d, a]];
        for t in tris.iter_mut() {
            let (n, off) = plane(&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]]);
            if n.dot(&self.interior) - off > 0.0 {
                t.swap(1, 2);
            }
        }
        for t in tris {
            self.new_face(t);
        }
        for f in 0..4 {
            for k in 0..3 {
                let v = self.faces[f].v;
                let (u, w) = (v[(k + 1) % 3], v[k]);
                self.faces[f].nb[k] = (0..4)
                    .find(|&g| (0..3).any(|j| tris[g][j] == u && tris[g][(j + 1) % 3] == w))
                    .expect("simplex faces pair up");
            }
        }
        for &p in candidates {
            if simplex.contains(&p) {
                continue;
            }
            if let Some(f) = (0..4).find(|&f| self.dist(f, p) > HULL_TOLERANCE) {
                self.faces[f].outside.push(p);
            }
        }
    }

    /// Faces visible from `eye` reachable from `start`, plus the horizon as
    /// (visible face, edge index) pairs. `None` when the horizon is not a
    /// single simple cycle.
    fn horizon(&mut self, start: usize, eye: usize, threshold: f64) -> Option<(Vec<usize>, Vec<HorizonEdge>)> {
        if self.state.len() < self.faces.len() {
            self.state.resize(self.faces.len(), 0);
        }
        self.state[start] = 1;
        self.touched.push(start);
        let mut visible = vec![start];
        let mut horizon = Vec::new();
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for k in 0..3 {
                let g = self.faces[f].nb[k];
                if self.state[g] == 0 {
                    let s = self.dist(g, eye) > threshold;
                    self.state[g] = if s { 1 } else { 2 };
                    self.touched.push(g);
                    if s {
                        visible.push(g);
                    }
                }
                if self.state[g] == 2 {
                    horizon.push((f, k));
                }
            }
        }
        for g in self.touched.drain(..) {
            self.state[g] = 0;
        }
        // every horizon vertex must start and end exactly one edge, forming one loop
        if horizon.len() < 3 {
            return None;
        }
        let edges: Vec<(usize, usize)> = horizon
            .iter()
            .map(|&(f, k)| {
                let v = self.faces[f].v;
                (v[k], v[(k + 1) % 3])
            })
            .collect();
        for (x, e) in edges.iter().enumerate() {
            if edges[x + 1..].iter().any(|o| o.0 == e.0) {
                return None;
            }
        }
        let next = |u: usize| edges.iter().find(|e| e.0 == u).map(|e| e.1);
        let first = edges[0].0;
        let mut cur = first;
        for step in 1..=edges.len() {
            cur = next(cur)?;
            if cur == first {
                return (step == edges.len()).then_some((visible, horizon));
            }
        }
        None
    }

    fn add_point(&mut self, face: usize, eye: usize) {
        let found = [HULL_TOLERANCE, 0.0, -HULL_TOLERANCE]
            .into_iter()
            .find_map(|t| self.horizon(face, eye, t));
        let Some((visible, horizon)) = found else {
            // numerically inconsistent visibility; treat the point as on the hull
            self.faces[face].outside.retain(|&p| p != eye);
            return;
        };

        let mut orphans = self.spare.pop().unwrap_or_default();
        for &f in &visible {
            self.faces[f].alive = false;
            orphans.append(&mut self.faces[f].outside);
            let emptied = std::mem::take(&mut self.faces[f].outside);
            self.spare.push(emptied);
        }

        let mut created = Vec::with_capacity(horizon.len());
        for &(f, k) in &horizon {
            let fv = self.faces[f].v;
            let (u, w) = (fv[k], fv[(k + 1) % 3]);
            let other = self.faces[f].nb[k];
            let nf = self.new_face([u, w, eye]);
            self.faces[nf].nb[0] = other;
            let ov = self.faces[other].v;
            let j = (0..3)
                .find(|&j| ov[j] == w && ov[(j + 1) % 3] == u)
                .expect("horizon neighbour shares the edge");
            self.faces[other].nb[j] = nf;
            self.by_start[u] = nf;
            self.by_end[w] = nf;
            created.push(nf);
        }
        for &nf in &created {
            let [u, w, _] = self.faces[nf].v;
            self.faces[nf].nb[1] = self.by_start[w];
            self.faces[nf].nb[2] = self.by_end[u];
        }

        for &p in &orphans {
            if p == eye {
                continue;
            }
            if let Some(&nf) = created.iter().find(|&&nf| self.dist(nf, p) > HULL_TOLERANCE) {
                self.faces[nf].outside.push(p);
            }
        }
        orphans.clear();
        self.spare.push(orphans);
    }

    fn run(&mut self) {
        let mut cursor = 0;
        while cursor < self.faces.len() {
            let f = cursor;
            if !self.faces[f].alive || self.faces[f].outside.is_empty() {
                cursor += 1;
                continue;
            }
            let eye = {
                let face = &self.faces[f];
                let mut best = face.outside[0];
                let mut best_d = f64::NEG_INFINITY;
                for &p in &face.outside {
                    let d = face.normal.dot(&self.pts[p]) - face.offset;
                    if d > best_d {
                        best_d = d;
                        best = p;
                    }
                }
                best
            };
            self.add_point(f, eye);
        }
    }
}

fn find_seed(pts: &[ObjectiveVector], candidates: &[usize]) -> Seed {
    let first = candidates[0];
    let mut extremes = [first; 6];
    for &i in candidates {
        for k in 0..3 {
            if pts[i][k] < pts[extremes[2 * k]][k] {
                extremes[2 * k] = i;
            }
            if pts[i][k] > pts[extremes[2 * k + 1]][k] {
                extremes[2 * k + 1] = i;
            }
        }
    }
    let (mut a, mut b, mut best) = (first, first, 0.0);
    for (x, &i) in extremes.iter().enumerate() {
        for &j in &extremes[x + 1..] {
            let d = pts[i].distance(&pts[j]);
            if d > best {
                best = d;
                a = i.min(j);
                b = i.max(j);
            }
        }
    }
    if best <= HULL_TOLERANCE {
        return Seed::Flat { dim: 0, basis: [first; 3] };
    }

    let dir = (pts[b] - pts[a]) * (1.0 / best);
    let (mut c, mut best) = (a, 0.0);
    for &i in candidates {
        let d = (pts[i] - pts[a]).cross(&dir).norm();
        if d > best {
            best = d;
            c = i;
        }
    }
    if best <= HULL_TOLERANCE {
        return Seed::Flat { dim: 1, basis: [a, b, b] };
    }

    let (n, off) = plane(&pts[a], &pts[b], &pts[c]);
    let (mut d, mut best) = (a, 0.0);
    for &i in candidates {
        let dist = (n.dot(&pts[i]) - off).abs();
        if dist > best {
            best = dist;
            d = i;
        }
    }
    if best <= HULL_TOLERANCE {
        return Seed::Flat { dim: 2, basis: [a, b, c] };
    }
    Seed::Simplex([a, b, c, d])
}

fn flat_vertices(pts: &[ObjectiveVector], candidates: &[usize], dim: usize, basis: [usize; 3]) -> Vec<usize> {
    match dim {
        0 => vec![basis[0]],
        1 => {
            let origin = pts[basis[0]];
            let dir = pts[basis[1]] - origin;
            let t = |i: usize| (pts[i] - origin).dot(&dir);
            let lo = candidates
                .iter()
                .copied()
                .min_by(|&x, &y| t(x).total_cmp(&t(y)).then(x.cmp(&y)))
                .unwrap_or(basis[0]);
            let hi = candidates
                .iter()
                .copied()
                .max_by(|&x, &y| t(x).total_cmp(&t(y)).then(y.cmp(&x)))
                .unwrap_or(basis[1]);
            vec![lo, hi]
        }
        _ => {
            let origin = pts[basis[0]];
            let e1 = pts[basis[1]] - origin;
            let e1 = e1 * (1.0 / e1.norm());
            let (n, _) = plane(&pts[basis[0]], &pts[basis[1]], &pts[basis[2]]);
            let e2 = n.cross(&e1);
            let planar: Vec<[f64; 2]> = candidates
                .iter()
                .map(|&i| {
                    let r = pts[i] - origin;
                    [r.dot(&e1), r.dot(&e2)]
                })
                .collect();
            convex_hull_2d(&planar, HULL_TOLERANCE)
                .into_iter()
                .map(|k| candidates[k])
                .collect()
        }
    }
}

/// Input indices of hull vertices that lie in the relative interior of a
/// flat face region or of a straight edge, within [`HULL_TOLERANCE`].
fn non_extreme(pts: &[ObjectiveVector], faces: &[&Face]) -> Vec<usize> {
    // faces incident to each vertex, as a flat list bucketed by vertex
    let mut start = vec![0usize; pts.len() + 1];
    for f in faces {
        for &v in &f.v {
            start[v + 1] += 1;
        }
    }
    for v in 0..pts.len() {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut incident = vec![0usize; start[pts.len()]];
    for (fi, f) in faces.iter().enumerate() {
        for &v in &f.v {
            incident[fill[v]] = fi;
            fill[v] += 1;
        }
    }

    let mut out = Vec::new();
    let mut link: Vec<usize> = Vec::new();
    for v in 0..pts.len() {
        let fs = &incident[start[v]..start[v + 1]];
        if fs.is_empty() {
            continue;
        }
        link.clear();
        link.extend(fs.iter().flat_map(|&fi| faces[fi].v).filter(|&u| u != v));
        link.sort_unstable();
        link.dedup();

        let f0 = faces[fs[0]];
        let flat = link
            .iter()
            .all(|&u| (f0.normal.dot(&pts[u]) - f0.offset).abs() <= HULL_TOLERANCE);
        let on_segment = || {
            link.iter().enumerate().any(|(x, &a)| {
                link[x + 1..].iter().any(|&b| {
                    let ab = pts[b] - pts[a];
                    let len2 = ab.dot(&ab);
                    let t = (pts[v] - pts[a]).dot(&ab) / len2;
                    if !(t > 0.0 && t < 1.0) {
                        return false;
                    }
                    (pts[v] - pts[a]).cross(&ab).norm() / len2.sqrt() <= HULL_TOLERANCE
                })
            })
        };
        if flat || on_segment() {
            out.push(v);
        }
    }
    out
}

/// Builds the convex hull of `points` by quickhull.
///
/// Duplicate points and points within [`HULL_TOLERANCE`] of the boundary that
/// are not extreme are excluded from the vertex set. Inputs of affine
/// dimension below three produce a degenerate hull.
pub fn quickhull(points: &[ObjectiveVector]) -> ConvexHull {
    let mut candidates: Vec<usize> = (0..points.len()).collect();
    if candidates.is_empty() {
        return ConvexHull {
            vertices: Vec::new(),
            sources: Vec::new(),
            facets: Vec::new(),
            degenerate: true,
        };
    }

    for _round in 0..4 {
        let simplex = match find_seed(points, &candidates) {
            Seed::Simplex(s) => s,
            Seed::Flat { dim, basis } => {
                let mut sources = flat_vertices(points, &candidates, dim, basis);
                sources.sort_unstable();
                sources.dedup();
                return ConvexHull {
                    vertices: sources.iter().map(|&i| points[i]).collect(),
                    sources,
                    facets: Vec::new(),
                    degenerate: true,
                };
            }
        };
        let mut builder = Builder::new(points, 4 * candidates.len().min(4096));
        builder.seed(simplex, &candidates);
        builder.run();

        let alive: Vec<&Face> = builder.faces.iter().filter(|f| f.alive).collect();
        let drop = non_extreme(points, &alive);
        if drop.is_empty() {
            return assemble(points, &alive);
        }
        let mut used: Vec<usize> = alive.iter().flat_map(|f| f.v).collect();
        used.sort_unstable();
        used.dedup();
        used.retain(|i| !drop.contains(i));
        candidates = used;
    }
    // still carrying boundary-interior vertices after several passes; keep the last hull
    let mut builder = Builder::new(points, 0);
    match find_seed(points, &candidates) {
        Seed::Simplex(s) => {
            builder.seed(s, &candidates);
            builder.run();
            let alive: Vec<&Face> = builder.faces.iter().filter(|f| f.alive).collect();
            assemble(points, &alive)
        }
        Seed::Flat { .. } => ConvexHull {
            vertices: Vec::new(),
            sources: Vec::new(),
            facets: Vec::new(),
            degenerate: true,
        },
    }
}

fn assemble(points: &[ObjectiveVector], faces: &[&Face]) -> ConvexHull {
    let mut sources: Vec<usize> = faces.iter().flat_map(|f| f.v).collect();
    sources.sort_unstable();
    sources.dedup();
    let position = |i: usize| sources.binary_search(&i).expect("facet vertex is a source");
    let facets = faces
        .iter()
        .map(|f| Facet {
            vertices: f.v.map(position),
            normal: f.normal,
            offset: f.offset,
        })
        .collect();
    ConvexHull {
        vertices: sources.iter().map(|&i| points[i]).collect(),
        sources,
        facets,
        degenerate: false,
    }
}
