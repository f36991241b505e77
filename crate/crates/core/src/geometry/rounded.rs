use alloc::vec::Vec;

use super::{ConvexPolygon, PlanarDomain, Point2};
use crate::error::{non_negative, Result};
use crate::math;

/// One piece of the boundary of a parallel body: a translated polygon edge
/// or a circular arc about a polygon vertex. Arcs stay symbolic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPiece {
    Segment {
        start: Point2,
        end: Point2,
    },
    Arc {
        center: Point2,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl BoundaryPiece {
    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { start, end } => start.distance(end),
            BoundaryPiece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    /// Point at arclength `s ∈ [0, length]` from the start of the piece.
    pub fn point_at(&self, s: f64) -> Point2 {
        match *self {
            BoundaryPiece::Segment { start, end } => {
                let len = start.distance(end);
                if len == 0.0 {
                    start
                } else {
                    start.lerp(end, (s / len).clamp(0.0, 1.0))
                }
            }
            BoundaryPiece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                if radius == 0.0 {
                    return center;
                }
                let phi = start_angle + (s / radius).clamp(0.0, sweep);
                center + Point2::from_polar(radius, phi)
            }
        }
    }

    /// Contribution `∫ x dy − y dx` of this piece to twice the enclosed area.
    fn green(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { start, end } => start.cross(end),
            BoundaryPiece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let (a0, a1) = (start_angle, start_angle + sweep);
                radius * radius * sweep
                    + radius
                        * (center.x * (math::sin(a1) - math::sin(a0))
                            - center.y * (math::cos(a1) - math::cos(a0)))
            }
        }
    }
}

/// The Minkowski sum `D + δB` of a convex polygon with a closed disk.
///
/// The boundary alternates translated edges and arcs of radius `δ` centered
/// at the vertices: piece `2i` is edge `i` pushed out along its normal, piece
/// `2i + 1` is the arc about vertex `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundedBody {
    core: ConvexPolygon,
    offset: f64,
    pieces: Vec<BoundaryPiece>,
    cumulative: Vec<f64>,
}

impl RoundedBody {
    pub fn new(core: ConvexPolygon, offset: f64) -> Result<Self> {
        non_negative("offset", offset)?;
        let n = core.len();
        let mut pieces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (a, b) = core.edge(i);
            let ni = core.outward_normal(i);
            let nj = core.outward_normal(i + 1);
            pieces.push(BoundaryPiece::Segment {
                start: a + ni * offset,
                end: b + ni * offset,
            });
            pieces.push(BoundaryPiece::Arc {
                center: b,
                radius: offset,
                start_angle: ni.angle(),
                sweep: math::atan2(ni.cross(nj), ni.dot(nj)),
            });
        }
        let mut cumulative = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for piece in &pieces {
            acc += piece.length();
            cumulative.push(acc);
        }
        Ok(Self {
            core,
            offset,
            pieces,
            cumulative,
        })
    }

    pub fn core(&self) -> &ConvexPolygon {
        &self.core
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    /// Perimeter as the sum of piece lengths.
    pub fn perimeter(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Enclosed area by Green's theorem over the symbolic boundary.
    pub fn area(&self) -> f64 {
        0.5 * self.pieces.iter().map(BoundaryPiece::green).sum::<f64>()
    }

    /// `P(D) + 2πδ`.
    pub fn steiner_perimeter(&self) -> f64 {
        self.core.perimeter() + math::TAU * self.offset
    }

    /// `|D| + P(D)δ + πδ²`.
    pub fn steiner_area(&self) -> f64 {
        self.core.area() + self.core.perimeter() * self.offset + math::PI * self.offset * self.offset
    }

    /// Sum of arc sweep angles; `2π` for a closed convex boundary.
    pub fn total_sweep(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                BoundaryPiece::Arc { sweep, .. } => sweep,
                BoundaryPiece::Segment { .. } => 0.0,
            })
            .sum()
    }

    /// Boundary point at arclength `sigma` (taken modulo the perimeter) from
    /// the start of the first translated edge.
    pub fn point_at_arclength(&self, sigma: f64) -> Point2 {
        let total = self.perimeter();
        let mut s = sigma % total;
        if s < 0.0 {
            s += total;
        }
        let k = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(k) => k.min(self.pieces.len() - 1),
            Err(k) => k - 1,
        };
        self.pieces[k].point_at(s - self.cumulative[k])
    }

    /// Polygonal sampling of the boundary with every arc split into
    /// `segments_per_arc` chords. Degenerate arcs contribute one point.
    pub fn sample_boundary(&self, segments_per_arc: usize) -> Vec<Point2> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            match *piece {
                BoundaryPiece::Segment { start, .. } => out.push(start),
                BoundaryPiece::Arc { radius: 0.0, .. } => {}
                BoundaryPiece::Arc { .. } => {
                    let len = piece.length();
                    let m = segments_per_arc.max(1);
                    for k in 0..m {
                        out.push(piece.point_at(len * k as f64 / m as f64));
                    }
                }
            }
        }
        out
    }
}

impl PlanarDomain for RoundedBody {
    fn area(&self) -> f64 {
        RoundedBody::area(self)
    }

    fn perimeter(&self) -> f64 {
        RoundedBody::perimeter(self)
    }

    fn signed_distance(&self, x: Point2) -> f64 {
        self.core.signed_distance(x) - self.offset
    }
}
