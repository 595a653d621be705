use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or direction) in 3-D objective space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub [f64; 3]);

impl ObjectiveVector {
    pub const ZERO: Self = Self([0.0; 3]);
    pub const ONES: Self = Self([1.0; 3]);

    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self([c1, c2, c3])
    }

    pub fn splat(v: f64) -> Self {
        Self([v; 3])
    }

    pub fn c1(&self) -> f64 {
        self.0[0]
    }

    pub fn c2(&self) -> f64 {
        self.0[1]
    }

    pub fn c3(&self) -> f64 {
        self.0[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        Self([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }

    /// Clamps every coordinate into `[0, 1]`.
    pub fn clamp_unit(&self) -> Self {
        self.map(|c| c.clamp(0.0, 1.0))
    }

    /// Lexicographic total order (IEEE `totalOrder` per coordinate).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.0[0]
            .total_cmp(&other.0[0])
            .then(self.0[1].total_cmp(&other.0[1]))
            .then(self.0[2].total_cmp(&other.0[2]))
    }
}

impl From<[f64; 3]> for ObjectiveVector {
    fn from(c: [f64; 3]) -> Self {
        Self(c)
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for ObjectiveVector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for ObjectiveVector {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Mul<f64> for ObjectiveVector {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        self.map(|c| c * rhs)
    }
}

impl Neg for ObjectiveVector {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Optimization direction shared by all three objectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// The worst attainable coordinate value inside the unit box.
    pub fn worst(self) -> f64 {
        match self {
            Sense::Min => 1.0,
            Sense::Max => 0.0,
        }
    }

    /// The best attainable coordinate value inside the unit box.
    pub fn best(self) -> f64 {
        match self {
            Sense::Min => 0.0,
            Sense::Max => 1.0,
        }
    }

    /// `a` is at least as good as `b` in every coordinate.
    pub fn weakly_dominates(self, a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
        match self {
            Sense::Min => (0..3).all(|k| a[k] <= b[k]),
            Sense::Max => (0..3).all(|k| a[k] >= b[k]),
        }
    }

    /// Pareto dominance: weakly better everywhere and not equal.
    pub fn dominates(self, a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
        self.weakly_dominates(a, b) && a != b
    }

    /// Maps a unit-box point to the equivalent minimization coordinates.
    pub fn to_min(self, p: &ObjectiveVector) -> ObjectiveVector {
        match self {
            Sense::Min => *p,
            Sense::Max => p.map(|c| 1.0 - c),
        }
    }
}

/// The closed halfspace `{p : normal · p <= offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    normal: ObjectiveVector,
    offset: f64,
}

impl Halfspace {
    /// Builds the halfspace `normal · p <= offset`, rescaling to a unit normal.
    ///
    /// Panics if `normal` is zero or not finite.
    pub fn new(normal: ObjectiveVector, offset: f64) -> Self {
        let len = normal.norm();
        assert!(len.is_finite() && len > 0.0, "halfspace normal must be non-zero");
        Self {
            normal: normal * (1.0 / len),
            offset: offset / len,
        }
    }

    pub fn normal(&self) -> ObjectiveVector {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Positive outside, negative inside.
    pub fn signed_distance(&self, p: &ObjectiveVector) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: &ObjectiveVector) -> bool {
        self.signed_distance(p) <= 0.0
    }

    /// The closure of the complement.
    pub fn complement(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}
