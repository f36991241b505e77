//! Plain-text and JSON file formats.
//!
//! - polygon: one `x y` pair per line, counterclockwise, `#` starts a comment
//! - Steiner polynomial: `{"n": 3, "W": [W_0, ..., W_n]}`
//! - mesh: node count, `x y` lines, triangle count, `i j k` lines
//! - solution: a mesh followed by one nodal value per line
//!
//! Floats are written with the shortest representation that reads back to
//! the same bits, so a mesh survives a write/read cycle unchanged.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use insulation_core::fem::{FemSolution, LayeredMesh};
use insulation_core::{ConvexPolygon, Point2, SteinerPolynomial};
use serde::{Deserialize, Serialize};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_num<T: FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| anyhow!("line {line}: cannot parse `{tok}`"))
}

pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut pts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            bail!("line {}: expected `x y`, got `{}`", i + 1, raw.trim());
        }
        pts.push(Point2::new(parse_num(toks[0], i + 1)?, parse_num(toks[1], i + 1)?));
    }
    Ok(ConvexPolygon::new(pts)?)
}

pub fn read_polygon(path: &Path) -> Result<ConvexPolygon> {
    parse_polygon(&read(path)?).with_context(|| format!("polygon file {}", path.display()))
}

pub fn format_polygon(poly: &ConvexPolygon) -> String {
    let mut s = String::new();
    for v in poly.vertices() {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    s
}

#[derive(Serialize, Deserialize)]
struct SteinerFile {
    n: usize,
    #[serde(rename = "W")]
    w: Vec<f64>,
}

pub fn parse_steiner(text: &str) -> Result<SteinerPolynomial> {
    let f: SteinerFile = serde_json::from_str(text)?;
    Ok(SteinerPolynomial::new(f.n, f.w)?)
}

pub fn read_steiner(path: &Path) -> Result<SteinerPolynomial> {
    parse_steiner(&read(path)?).with_context(|| format!("Steiner file {}", path.display()))
}

pub fn format_steiner(s: &SteinerPolynomial) -> String {
    let f = SteinerFile {
        n: s.dimension(),
        w: s.quermassintegrals().to_vec(),
    };
    serde_json::to_string(&f).expect("plain struct serializes")
}

pub fn format_mesh(mesh: &LayeredMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", mesh.node_count());
    for x in mesh.nodes() {
        let _ = writeln!(s, "{} {}", x.x, x.y);
    }
    let _ = writeln!(s, "{}", mesh.triangle_count());
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    s
}

pub fn format_solution(sol: &FemSolution) -> String {
    let mut s = format_mesh(sol.mesh());
    for u in sol.values() {
        let _ = writeln!(s, "{u}");
    }
    s
}

/// Line-oriented reader that skips blanks and comments.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    fn next_tokens(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Ok((i + 1, line.split_whitespace().collect()));
            }
        }
        bail!("unexpected end of file")
    }

    fn fields<T: FromStr, const K: usize>(&mut self) -> Result<[T; K]> {
        let (line, toks) = self.next_tokens()?;
        if toks.len() != K {
            bail!("line {line}: expected {K} fields, got {}", toks.len());
        }
        let mut out = Vec::with_capacity(K);
        for t in toks {
            out.push(parse_num(t, line)?);
        }
        out.try_into().map_err(|_| anyhow!("line {line}: field count"))
    }

    fn at_end(&mut self) -> bool {
        self.next_tokens().is_err()
    }
}

fn parse_mesh_body(lines: &mut Lines<'_>) -> Result<LayeredMesh> {
    let [n] = lines.fields::<usize, 1>()?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let [x, y] = lines.fields::<f64, 2>()?;
        nodes.push(Point2::new(x, y));
    }
    let [t] = lines.fields::<usize, 1>()?;
    let mut tris = Vec::with_capacity(t);
    for _ in 0..t {
        let tri = lines.fields::<usize, 3>()?;
        if let Some(&bad) = tri.iter().find(|&&i| i >= n) {
            bail!("triangle refers to node {bad}, mesh has {n}");
        }
        tris.push(tri);
    }
    Ok(LayeredMesh::from_triangulation(nodes, tris)?)
}

pub fn parse_mesh(text: &str) -> Result<LayeredMesh> {
    let mut lines = Lines::new(text);
    let mesh = parse_mesh_body(&mut lines)?;
    if !lines.at_end() {
        bail!("trailing data after mesh");
    }
    Ok(mesh)
}

pub fn read_mesh(path: &Path) -> Result<LayeredMesh> {
    parse_mesh(&read(path)?).with_context(|| format!("mesh file {}", path.display()))
}

/// Mesh plus nodal values.
pub fn parse_solution(text: &str) -> Result<(LayeredMesh, Vec<f64>)> {
    let mut lines = Lines::new(text);
    let mesh = parse_mesh_body(&mut lines)?;
    let mut values = Vec::with_capacity(mesh.node_count());
    for _ in 0..mesh.node_count() {
        let [u] = lines.fields::<f64, 1>()?;
        values.push(u);
    }
    if !lines.at_end() {
        bail!("trailing data after nodal values");
    }
    Ok((mesh, values))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
