//! Planar convex geometry and dimension-generic Steiner polynomials.

mod polygon;
mod rounded;
mod steiner;

use core::ops::{Add, Mul, Neg, Sub};

use crate::math;

pub use polygon::ConvexPolygon;
pub use rounded::{BoundaryPiece, RoundedBody};
pub use steiner::{
    lemma_cost_check, lemma_cost_constant, unit_ball_volume, DominationReport, LemmaCostReport,
    SteinerPolynomial,
};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * math::cos(angle), radius * math::sin(angle))
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product; positive when `other` lies
    /// counterclockwise of `self`.
    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        math::atan2(self.y, self.x)
    }

    /// Counterclockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Distance from `x` to the closed segment `[a, b]`.
pub fn segment_distance(x: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let len2 = e.dot(e);
    if len2 == 0.0 {
        return x.distance(a);
    }
    let t = ((x - a).dot(e) / len2).clamp(0.0, 1.0);
    x.distance(a + e * t)
}

/// A bounded convex planar region that contains the origin in its interior.
///
/// This is the common surface used by the containment test of the
/// isoperimetric-deficit lemma and by the star-shaped mesher.
pub trait PlanarDomain {
    fn area(&self) -> f64;

    fn perimeter(&self) -> f64;

    /// Signed distance to the boundary, negative inside.
    fn signed_distance(&self, x: Point2) -> f64;

    /// Distance from the origin to the boundary along the ray at `angle`.
    fn ray_extent(&self, angle: f64) -> f64 {
        ray_extent_by_bisection(self, angle)
    }

    /// Whether the closed disk of `radius` about `center` lies in the closure.
    fn contains_disk(&self, center: Point2, radius: f64) -> bool {
        let slack = 1e-12 * (1.0 + radius);
        -self.signed_distance(center) >= radius - slack
    }
}

fn ray_extent_by_bisection<D: PlanarDomain + ?Sized>(domain: &D, angle: f64) -> f64 {
    let dir = Point2::from_polar(1.0, angle);
    let mut hi = 1.0;
    while domain.signed_distance(dir * hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    // The signed distance of a convex set is convex, hence has a single
    // root along a ray leaving an interior point.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if domain.signed_distance(dir * mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed disk centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub radius: f64,
}

impl Disk {
    pub fn new(radius: f64) -> crate::Result<Self> {
        crate::error::positive("radius", radius).map(|radius| Self { radius })
    }
}

impl PlanarDomain for Disk {
    fn area(&self) -> f64 {
        math::PI * self.radius * self.radius
    }

    fn perimeter(&self) -> f64 {
        math::TAU * self.radius
    }

    fn signed_distance(&self, x: Point2) -> f64 {
        x.norm() - self.radius
    }

    fn ray_extent(&self, _angle: f64) -> f64 {
        self.radius
    }
}
