use alloc::vec::Vec;

use super::solver::FemSolution;
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Superlevel set `{u > t}` of the piecewise-linear interpolant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSetRow {
    pub t: f64,
    /// Perimeter of `{u > t}`: level curve plus the boundary parts where
    /// `u > t`.
    pub perimeter: f64,
    /// Area `μ(t)`.
    pub area: f64,
    pub level_length: f64,
    pub inner_length: f64,
    pub outer_length: f64,
}

fn crossing(xa: Point2, xb: Point2, ua: f64, ub: f64, t: f64) -> Point2 {
    xa.lerp(xb, (t - ua) / (ub - ua))
}

fn polygon_area(pts: &[Point2]) -> f64 {
    let m = pts.len();
    0.5 * (0..m).map(|i| pts[i].cross(pts[(i + 1) % m])).sum::<f64>()
}

/// Length of the part of segment `[a, b]` where the linear interpolant
/// exceeds `t`.
fn length_above(xa: Point2, xb: Point2, ua: f64, ub: f64, t: f64) -> f64 {
    let len = xa.distance(xb);
    match (ua > t, ub > t) {
        (true, true) => len,
        (false, false) => 0.0,
        (true, false) => len * (ua - t) / (ua - ub),
        (false, true) => len * (ub - t) / (ub - ua),
    }
}

fn boundary_length_above(sol: &FemSolution, lp: &[usize], t: f64) -> f64 {
    let (nodes, u) = (sol.mesh().nodes(), sol.values());
    let m = lp.len();
    (0..m)
        .map(|i| {
            let (a, b) = (lp[i], lp[(i + 1) % m]);
            length_above(nodes[a], nodes[b], u[a], u[b], t)
        })
        .sum()
}

/// Perimeter and area of `{u > t}` for every threshold in `t_grid`, by
/// clipping each triangle against the linear level line. Thresholds must lie
/// in `[0, 1)`; below `min u` the set is the whole layer.
pub fn levelset_diagnostics(sol: &FemSolution, t_grid: &[f64]) -> Result<Vec<LevelSetRow>> {
    if let Some(&t) = t_grid.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mesh = sol.mesh();
    let (nodes, u) = (mesh.nodes(), sol.values());
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (mut area, mut level) = (0.0, 0.0);
        let mut clipped: Vec<Point2> = Vec::with_capacity(4);
        let mut cuts: Vec<Point2> = Vec::with_capacity(2);
        for &tri in mesh.triangles() {
            clipped.clear();
            cuts.clear();
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if u[a] > t {
                    clipped.push(nodes[a]);
                }
                if (u[a] > t) != (u[b] > t) {
                    let x = crossing(nodes[a], nodes[b], u[a], u[b], t);
                    clipped.push(x);
                    cuts.push(x);
                }
            }
            if clipped.len() >= 3 {
                area += polygon_area(&clipped);
            }
            if cuts.len() == 2 {
                level += cuts[0].distance(cuts[1]);
            }
        }
        let inner_length = boundary_length_above(sol, mesh.inner_boundary(), t);
        let outer_length = boundary_length_above(sol, mesh.outer_boundary(), t);
        rows.push(LevelSetRow {
            t,
            perimeter: level + inner_length + outer_length,
            area,
            level_length: level,
            inner_length,
            outer_length,
        });
    }
    Ok(rows)
}
