use alloc::vec::Vec;

use super::{segment_distance, PlanarDomain, Point2};
use crate::error::{positive, Error, Result};
use crate::math;

/// Relative tolerance of the collinearity test `|a × b| ≤ tol·|a||b|`.
const COLLINEAR_TOL: f64 = 1e-10;
/// Relative tolerance (against the bounding-box diagonal) for repeated vertices.
const DUPLICATE_TOL: f64 = 1e-12;

/// A planar convex polygon with counterclockwise vertices.
///
/// Construction drops repeated consecutive vertices and merges collinear
/// ones, so regular-polygon approximations with rounding noise are accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    merged: usize,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVertex(i));
        }
        let input_len = vertices.len();
        let mut vs = dedup_cyclic(vertices);
        if vs.len() < 3 {
            return Err(Error::TooFewVertices(vs.len()));
        }

        loop {
            let n = vs.len();
            if n < 3 {
                return Err(Error::TooFewVertices(n));
            }
            let mut removed = None;
            for i in 0..n {
                let a = vs[i] - vs[(i + n - 1) % n];
                let b = vs[(i + 1) % n] - vs[i];
                if math::abs(a.cross(b)) <= COLLINEAR_TOL * a.norm() * b.norm() {
                    if a.dot(b) > 0.0 {
                        removed = Some(i);
                        break;
                    }
                    return Err(Error::NotConvex(i));
                }
            }
            match removed {
                Some(i) => {
                    vs.remove(i);
                }
                None => break,
            }
        }

        if signed_area(&vs) <= 0.0 {
            return Err(Error::NotCounterClockwise);
        }
        let n = vs.len();
        for i in 0..n {
            let a = vs[i] - vs[(i + n - 1) % n];
            let b = vs[(i + 1) % n] - vs[i];
            if a.cross(b) <= 0.0 {
                return Err(Error::NotConvex(i));
            }
        }
        // A star polygon winding twice passes the local turn test.
        let turning: f64 = (0..n)
            .map(|i| {
                let a = vs[i] - vs[(i + n - 1) % n];
                let b = vs[(i + 1) % n] - vs[i];
                math::atan2(a.cross(b), a.dot(b))
            })
            .sum();
        if math::abs(turning - math::TAU) > 1e-6 {
            return Err(Error::NotConvex(0));
        }

        let merged = input_len - vs.len();
        Ok(Self {
            vertices: vs,
            merged,
        })
    }

    /// Regular polygon with `sides` vertices on the circle of `circumradius`
    /// about the origin, the first vertex on the positive x-axis.
    pub fn regular(sides: usize, circumradius: f64) -> Result<Self> {
        if sides < 3 {
            return Err(Error::TooFewVertices(sides));
        }
        positive("circumradius", circumradius)?;
        let vs = (0..sides)
            .map(|k| Point2::from_polar(circumradius, math::TAU * k as f64 / sides as f64))
            .collect();
        Self::new(vs)
    }

    /// Axis-aligned rectangle centered at the origin.
    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        let (w, h) = (positive("width", width)? / 2.0, positive("height", height)? / 2.0);
        Self::new(alloc::vec![
            Point2::new(-w, -h),
            Point2::new(w, -h),
            Point2::new(w, h),
            Point2::new(-w, h),
        ])
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::rectangle(side, side)
    }

    /// Convex hull of a point cloud (Andrew's monotone chain).
    pub fn hull(points: &[Point2]) -> Result<Self> {
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVertex(i));
        }
        let mut pts: Vec<Point2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::TooFewVertices(pts.len()));
        }
        let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
        let reversed: Vec<Point2> = pts.iter().rev().copied().collect();
        for chain in [&pts, &reversed] {
            let start = hull.len();
            for &p in chain.iter() {
                while hull.len() >= start + 2 {
                    let a = hull[hull.len() - 2];
                    let b = hull[hull.len() - 1];
                    if (b - a).cross(p - b) <= 0.0 {
                        hull.pop();
                    } else {
                        break;
                    }
                }
                hull.push(p);
            }
            hull.pop();
        }
        Self::new(hull)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of input vertices removed as duplicates or collinear points.
    pub fn merged_vertices(&self) -> usize {
        self.merged
    }

    /// Edge `i` as the pair `(v_i, v_{i+1})`.
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        a.distance(b)
    }

    /// Outward unit normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> Point2 {
        let (a, b) = self.edge(i);
        let e = b - a;
        Point2::new(e.y, -e.x) * (1.0 / e.norm())
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).sum()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.len();
        let origin = self.vertices[0];
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = self.vertices[i] - origin;
            let q = self.vertices[(i + 1) % n] - origin;
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        origin + Point2::new(cx, cy) * (1.0 / (3.0 * a2))
    }

    /// Whether `x` lies in the closed polygon.
    pub fn contains(&self, x: Point2) -> bool {
        (0..self.len()).all(|i| {
            let (a, b) = self.edge(i);
            (b - a).cross(x - a) >= 0.0
        })
    }

    /// Euclidean distance from `x` to the polygon; zero inside and on the boundary.
    pub fn distance(&self, x: Point2) -> f64 {
        if self.contains(x) {
            0.0
        } else {
            self.boundary_distance(x)
        }
    }

    /// Distance from `x` to the boundary curve.
    pub fn boundary_distance(&self, x: Point2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(x, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("factor", factor)?;
        Self::new(self.vertices.iter().map(|&v| v * factor).collect())
    }

    pub fn translated(&self, offset: Point2) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&v| v + offset).collect())
    }

    /// Rescaled about its centroid to the requested perimeter, then recentered
    /// at the origin.
    pub fn with_perimeter(&self, perimeter: f64) -> Result<Self> {
        positive("perimeter", perimeter)?;
        let c = self.centroid();
        let f = perimeter / self.perimeter();
        Self::new(self.vertices.iter().map(|&v| (v - c) * f).collect())
    }
}

impl PlanarDomain for ConvexPolygon {
    fn area(&self) -> f64 {
        ConvexPolygon::area(self)
    }

    fn perimeter(&self) -> f64 {
        ConvexPolygon::perimeter(self)
    }

    fn signed_distance(&self, x: Point2) -> f64 {
        if self.contains(x) {
            -self.boundary_distance(x)
        } else {
            self.boundary_distance(x)
        }
    }

    fn ray_extent(&self, angle: f64) -> f64 {
        let u = Point2::from_polar(1.0, angle);
        (0..self.len())
            .filter_map(|i| {
                let n = self.outward_normal(i);
                let s = n.dot(u);
                (s > 0.0).then(|| n.dot(self.vertices[i]) / s)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn signed_area(vs: &[Point2]) -> f64 {
    let n = vs.len();
    let origin = vs[0];
    let twice: f64 = (1..n.saturating_sub(1))
        .map(|i| (vs[i] - origin).cross(vs[i + 1] - origin))
        .sum();
    0.5 * twice
}

fn dedup_cyclic(vs: Vec<Point2>) -> Vec<Point2> {
    if vs.is_empty() {
        return vs;
    }
    let (mut lo, mut hi) = (vs[0], vs[0]);
    for v in &vs {
        lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let tol = DUPLICATE_TOL * hi.distance(lo);
    let mut out: Vec<Point2> = Vec::with_capacity(vs.len());
    for v in vs {
        if out.last().map_or(true, |&w| w.distance(v) > tol) {
            out.push(v);
        }
    }
    while out.len() > 1 && out[0].distance(out[out.len() - 1]) <= tol {
        out.pop();
    }
    out
}
