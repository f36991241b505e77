//! Preset shapes and seeded random convex bodies.

use std::f64::consts::{PI, TAU};
use std::fmt;

use anyhow::{bail, Result};
use clap::ValueEnum;
use insulation_core::{ConvexPolygon, Point2};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Square,
    Hexagon,
    /// 2:1 rectangle.
    Rectangle,
    /// Regular polygon with as many sides as the mesh has nodes per ring.
    Disk,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Preset::Square => "square",
            Preset::Hexagon => "hexagon",
            Preset::Rectangle => "rectangle",
            Preset::Disk => "disk",
        };
        f.write_str(s)
    }
}

impl Preset {
    /// The preset with the given perimeter, centered at its centroid.
    pub fn polygon(self, perimeter: f64, disk_sides: usize) -> Result<ConvexPolygon> {
        let base = match self {
            Preset::Square => ConvexPolygon::square(1.0)?,
            Preset::Hexagon => ConvexPolygon::regular(6, 1.0)?,
            Preset::Rectangle => ConvexPolygon::rectangle(2.0, 1.0)?,
            Preset::Disk => ConvexPolygon::regular(disk_sides, 1.0)?,
        };
        Ok(base.with_perimeter(perimeter)?)
    }
}

/// Convex hull of jittered points on a random ellipse, scaled to the given
/// perimeter. Between 3 and `max_points` hull vertices.
pub fn random_polygon<R: Rng>(rng: &mut R, max_points: usize, perimeter: f64) -> Result<ConvexPolygon> {
    if max_points < 3 {
        bail!("random polygons need at least 3 points");
    }
    loop {
        let k = rng.gen_range(3..=max_points);
        let aspect = rng.gen_range(0.25..=1.0);
        let tilt = rng.gen_range(0.0..PI);
        let (c, s) = (tilt.cos(), tilt.sin());
        let pts: Vec<Point2> = (0..k)
            .map(|_| {
                let t = rng.gen_range(0.0..TAU);
                let r = rng.gen_range(0.85..=1.15);
                let (x, y) = (r * t.cos(), r * aspect * t.sin());
                Point2::new(c * x - s * y, s * x + c * y)
            })
            .collect();
        // nearly collinear draws are simply redrawn
        if let Ok(hull) = ConvexPolygon::hull(&pts) {
            if hull.area() > 1e-3 * hull.perimeter().powi(2) {
                return Ok(hull.with_perimeter(perimeter)?);
            }
        }
    }
}

/// Random convex polygon containing the closed disk `B_radius`
/// about the origin with `|Ω| − |B| ≤ max_excess`: a polygon circumscribed
/// about the disk at random tangent angles, inflated by a factor in
/// `[1, 1.05]`.
pub fn random_container<R: Rng>(rng: &mut R, radius: f64, max_excess: f64) -> Result<ConvexPolygon> {
    if !(radius > 0.0 && max_excess > 0.0) {
        bail!("radius and excess bound must be positive");
    }
    loop {
        let k = rng.gen_range(3..=24);
        let offset = rng.gen_range(0.0..TAU);
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let gaps: Vec<f64> = (0..k)
            .map(|i| if i + 1 < k { angles[i + 1] - angles[i] } else { angles[0] + TAU - angles[i] })
            .collect();
        // a gap of π or more leaves the polygon unbounded; keep a margin
        if gaps.iter().any(|g| !(1e-3..0.9 * PI).contains(g)) {
            continue;
        }
        let scale = rng.gen_range(1.0..=1.05);
        let verts: Vec<Point2> = (0..k)
            .map(|i| {
                let mid = angles[i] + 0.5 * gaps[i] + offset;
                Point2::from_polar(scale * radius / (0.5 * gaps[i]).cos(), mid)
            })
            .collect();
        let Ok(poly) = ConvexPolygon::new(verts) else {
            continue;
        };
        if poly.area() - PI * radius * radius <= max_excess {
            return Ok(poly);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use insulation_core::PlanarDomain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn presets_have_requested_perimeter() {
        for pre in [Preset::Square, Preset::Hexagon, Preset::Rectangle, Preset::Disk] {
            let p = pre.polygon(TAU, 64).unwrap();
            assert!((p.perimeter() - TAU).abs() < 1e-13, "{pre}");
        }
        let r = Preset::Rectangle.polygon(6.0, 64).unwrap();
        assert!((r.area() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn random_shapes_are_reproducible_and_valid() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_polygon(&mut a, 12, TAU).unwrap();
            assert_eq!(p, random_polygon(&mut b, 12, TAU).unwrap());
            assert!((p.perimeter() - TAU).abs() < 1e-12);
            let om = random_container(&mut a, 1.0, PI).unwrap();
            assert_eq!(om, random_container(&mut b, 1.0, PI).unwrap());
            assert!(om.contains_disk(Point2::ORIGIN, 1.0));
            assert!(om.area() - PI <= PI);
        }
    }
}
