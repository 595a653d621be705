//! Exact 3-D convex hulls, polytope volumes and halfspace clipping.

mod closure;
mod hull;
mod hull2d;
mod point;
mod volume;

pub use closure::{closure_support, dominated_closure_vertices, is_push_of};
pub use hull::{quickhull, ConvexHull, Facet, HULL_TOLERANCE};
pub use hull2d::convex_hull_2d;
pub use point::{Halfspace, ObjectiveVector, Sense};
pub use volume::{clipped_tetrahedron_volume, clipped_volume, hull_volume, tetrahedron_volume};
