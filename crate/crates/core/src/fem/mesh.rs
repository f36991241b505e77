use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{positive, Error, Result};
use crate::geometry::{segment_distance, ConvexPolygon, PlanarDomain, Point2, RoundedBody};
use crate::math;

/// Smallest admissible triangle area.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Triangulation of the insulating layer `Ω \ D̄`.
///
/// Nodes of layered meshes are numbered ring by ring, `k·M + j` for ring
/// `k ∈ 0..=L` and position `j ∈ 0..M`; ring 0 lies on `∂D`, ring `L` on
/// `∂Ω`. Both boundary loops are stored counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredMesh {
    nodes: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    inner: Vec<usize>,
    outer: Vec<usize>,
    layers: Option<(usize, usize)>,
}

impl LayeredMesh {
    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Nodes on `∂D`, in counterclockwise order.
    pub fn inner_boundary(&self) -> &[usize] {
        &self.inner
    }

    /// Nodes on `∂Ω`, in counterclockwise order.
    pub fn outer_boundary(&self) -> &[usize] {
        &self.outer
    }

    /// Outer boundary edges `(a, b, length)`, closing the loop.
    pub fn outer_segments(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.outer.len();
        (0..m).map(move |i| {
            let (a, b) = (self.outer[i], self.outer[(i + 1) % m]);
            (a, b, self.nodes[a].distance(self.nodes[b]))
        })
    }

    /// `(L, M)` for meshes built ring by ring; `None` for imported ones.
    pub fn layers(&self) -> Option<(usize, usize)> {
        self.layers
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * (self.nodes[b] - self.nodes[a]).cross(self.nodes[c] - self.nodes[a])
    }

    /// Area of the meshed region.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn inner_length(&self) -> f64 {
        loop_length(&self.nodes, &self.inner)
    }

    pub fn outer_length(&self) -> f64 {
        loop_length(&self.nodes, &self.outer)
    }

    /// Largest distance between two outer boundary nodes, a proxy for the
    /// diameter of `Ω`.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point2> = self.outer.iter().map(|&i| self.nodes[i]).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max(a.distance(*b));
            }
        }
        d
    }

    /// Longest triangle edge.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| self.nodes[a].distance(self.nodes[b]))
            .fold(0.0, f64::max)
    }

    /// Relative position of every node between the two boundary loops:
    /// `d_in / (d_in + d_out)` with distances to the loop polylines. Zero on
    /// `∂D`, one on `∂Ω`.
    pub fn depth(&self) -> Vec<f64> {
        let mut inner_flag = vec![false; self.nodes.len()];
        let mut outer_flag = vec![false; self.nodes.len()];
        self.inner.iter().for_each(|&i| inner_flag[i] = true);
        self.outer.iter().for_each(|&i| outer_flag[i] = true);
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                if inner_flag[i] {
                    0.0
                } else if outer_flag[i] {
                    1.0
                } else {
                    let din = loop_distance(&self.nodes, &self.inner, x);
                    let dout = loop_distance(&self.nodes, &self.outer, x);
                    din / (din + dout)
                }
            })
            .collect()
    }

    /// Rebuilds a mesh from raw nodes and triangles, recovering both boundary
    /// loops from the edges that belong to a single triangle. The loop with
    /// the larger enclosed area is `∂Ω`.
    pub fn from_triangulation(nodes: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = nodes.len();
        if let Some(i) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(Error::Mesh(format!("node {i} is not finite")));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::Mesh(format!("triangle {t} references a missing node")));
            }
        }
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &[a, b, c] in &triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                *count.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
        if let Some((&(u, v), _)) = count.iter().find(|(_, &c)| c > 2) {
            return Err(Error::Mesh(format!("edge ({u}, {v}) is shared by more than two triangles")));
        }
        // directed boundary edges keep the orientation of their triangle
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &[a, b, c] in &triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                if count[&(u.min(v), u.max(v))] == 1 && next.insert(u, v).is_some() {
                    return Err(Error::Mesh(format!("boundary is not a union of simple loops at node {u}")));
                }
            }
        }
        let mut loops = Vec::new();
        let mut seen = BTreeMap::new();
        for &s in next.keys() {
            if seen.contains_key(&s) {
                continue;
            }
            let mut lp = vec![s];
            seen.insert(s, ());
            let mut v = next[&s];
            while v != s {
                if seen.insert(v, ()).is_some() {
                    return Err(Error::Mesh(format!("boundary loop through node {v} does not close")));
                }
                lp.push(v);
                v = *next
                    .get(&v)
                    .ok_or_else(|| Error::Mesh(format!("boundary loop breaks at node {v}")))?;
            }
            loops.push(lp);
        }
        if loops.len() != 2 {
            return Err(Error::Mesh(format!(
                "expected an annular region with 2 boundary loops, found {}",
                loops.len()
            )));
        }
        let areas: Vec<f64> = loops.iter().map(|lp| loop_area(&nodes, lp)).collect();
        let (outer_idx, inner_idx) = if areas[0].abs() >= areas[1].abs() { (0, 1) } else { (1, 0) };
        let mut outer = core::mem::take(&mut loops[outer_idx]);
        let mut inner = core::mem::take(&mut loops[inner_idx]);
        if areas[outer_idx] < 0.0 {
            outer.reverse();
        }
        // the domain lies left of its boundary, so ∂D comes out clockwise
        if areas[inner_idx] < 0.0 {
            inner.reverse();
        }
        canonical_start(&mut outer);
        canonical_start(&mut inner);
        let mesh = Self {
            nodes,
            triangles,
            inner,
            outer,
            layers: None,
        };
        mesh.check()?;
        Ok(mesh)
    }

    /// Orientation, area and usage checks shared by every constructor.
    pub fn check(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            let a = self.triangle_area(t);
            if !(a > MIN_TRIANGLE_AREA) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has signed area {a:e} (inverted or degenerate)"
                )));
            }
        }
        let mut used = vec![false; self.nodes.len()];
        self.triangles.iter().flatten().for_each(|&v| used[v] = true);
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("node {i} belongs to no triangle")));
        }
        if self.inner.iter().any(|i| self.outer.contains(i)) {
            return Err(Error::Mesh("a node lies on both boundaries".into()));
        }
        Ok(())
    }
}

fn canonical_start(lp: &mut [usize]) {
    if let Some(k) = lp.iter().enumerate().min_by_key(|(_, &v)| v).map(|(k, _)| k) {
        lp.rotate_left(k);
    }
}

fn loop_length(nodes: &[Point2], lp: &[usize]) -> f64 {
    let m = lp.len();
    (0..m).map(|i| nodes[lp[i]].distance(nodes[lp[(i + 1) % m]])).sum()
}

fn loop_area(nodes: &[Point2], lp: &[usize]) -> f64 {
    let m = lp.len();
    0.5 * (0..m).map(|i| nodes[lp[i]].cross(nodes[lp[(i + 1) % m]])).sum::<f64>()
}

fn loop_distance(nodes: &[Point2], lp: &[usize], x: Point2) -> f64 {
    let m = lp.len();
    (0..m)
        .map(|i| segment_distance(x, nodes[lp[i]], nodes[lp[(i + 1) % m]]))
        .fold(f64::INFINITY, f64::min)
}

fn check_resolution(rings: usize, per_ring: usize, min_per_ring: usize) -> Result<()> {
    if rings < 2 {
        return Err(Error::InvalidParameter {
            name: "rings",
            value: rings as f64,
            reason: "at least 2 rings are required",
        });
    }
    if per_ring < min_per_ring.max(3) {
        return Err(Error::InvalidParameter {
            name: "nodes_per_ring",
            value: per_ring as f64,
            reason: "must be at least the number of polygon vertices",
        });
    }
    Ok(())
}

/// Connects consecutive rings of `per_ring` nodes, splitting each quad along
/// its shorter diagonal.
fn connect_rings(nodes: &[Point2], rings: usize, per_ring: usize) -> Vec<[usize; 3]> {
    let m = per_ring;
    let mut tris = Vec::with_capacity(2 * rings * m);
    for k in 0..rings {
        for j in 0..m {
            let a = k * m + j;
            let b = k * m + (j + 1) % m;
            let c = (k + 1) * m + (j + 1) % m;
            let d = (k + 1) * m + j;
            // counterclockwise order of the quad is a, d, c, b
            if nodes[a].distance(nodes[c]) <= nodes[b].distance(nodes[d]) {
                tris.push([a, d, c]);
                tris.push([a, c, b]);
            } else {
                tris.push([a, d, b]);
                tris.push([b, d, c]);
            }
        }
    }
    tris
}

fn layered(nodes: Vec<Point2>, rings: usize, per_ring: usize) -> Result<LayeredMesh> {
    let triangles = connect_rings(&nodes, rings, per_ring);
    let mesh = LayeredMesh {
        nodes,
        triangles,
        inner: (0..per_ring).collect(),
        outer: (rings * per_ring..(rings + 1) * per_ring).collect(),
        layers: Some((rings, per_ring)),
    };
    mesh.check()
        .map_err(|e| Error::Mesh(format!("{e}; the ring resolution is likely too coarse")))?;
    Ok(mesh)
}

/// Mesh of `(D + δB) \ D` with ring `k` on the offset curve at distance
/// `δk/L`, each sampled by `M` arclength-uniform nodes. Ring-0 nodes closest
/// to the polygon vertices are moved onto them so that `∂D` is resolved
/// exactly whenever `M` allows.
pub fn build_layered_mesh(
    polygon: &ConvexPolygon,
    delta: f64,
    rings: usize,
    per_ring: usize,
) -> Result<LayeredMesh> {
    positive("delta", delta)?;
    check_resolution(rings, per_ring, polygon.len())?;
    let m = per_ring;
    let mut nodes = Vec::with_capacity((rings + 1) * m);
    for k in 0..=rings {
        let body = RoundedBody::new(polygon.clone(), delta * k as f64 / rings as f64)?;
        let total = body.perimeter();
        for j in 0..m {
            nodes.push(body.point_at_arclength(total * j as f64 / m as f64));
        }
    }
    // vertex i sits at arclength Σ_{e<i} |e| along ring 0
    let total = polygon.perimeter();
    let mut taken = vec![false; m];
    let mut s = 0.0;
    for i in 0..polygon.len() {
        let j = (math::round(s / total * m as f64) as usize) % m;
        if !taken[j] {
            taken[j] = true;
            nodes[j] = polygon.vertices()[i];
        }
        s += polygon.edge_length(i);
    }
    layered(nodes, rings, per_ring)
}

/// Mesh of `Ω \ D` for `D` and `Ω` star-shaped about the origin: node `j` of
/// ring `k` sits on the ray at angle `2πj/M`, a fraction `k/L` of the way
/// from `∂D` to `∂Ω`.
pub fn build_star_mesh<O: PlanarDomain + ?Sized>(
    inner: &ConvexPolygon,
    outer: &O,
    rings: usize,
    per_ring: usize,
) -> Result<LayeredMesh> {
    check_resolution(rings, per_ring, 3)?;
    if !inner.contains(Point2::ORIGIN) {
        return Err(Error::Mesh("the origin must lie inside the inner polygon".into()));
    }
    let m = per_ring;
    let rays: Vec<(f64, f64, f64)> = (0..m)
        .map(|j| {
            let phi = math::TAU * j as f64 / m as f64;
            (phi, inner.ray_extent(phi), outer.ray_extent(phi))
        })
        .collect();
    if let Some(&(phi, r0, r1)) = rays.iter().find(|(_, r0, r1)| !(r1 > r0)) {
        return Err(Error::Mesh(format!(
            "outer boundary at angle {phi} (radius {r1}) does not enclose the inner one (radius {r0})"
        )));
    }
    let mut nodes = Vec::with_capacity((rings + 1) * m);
    for k in 0..=rings {
        let f = k as f64 / rings as f64;
        for &(phi, r0, r1) in &rays {
            let r = if k == rings { r1 } else { r0 + (r1 - r0) * f };
            nodes.push(Point2::from_polar(r, phi));
        }
    }
    layered(nodes, rings, per_ring)
}
