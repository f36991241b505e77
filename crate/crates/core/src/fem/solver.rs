use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::mesh::LayeredMesh;
use crate::error::{positive, Error, Result};
use crate::geometry::Point2;
use crate::math;
use crate::radial::solve_radial;
use crate::sparse::EnvelopeMatrix;

/// Supported range of the exponent.
pub const P_RANGE: (f64, f64) = (1.5, 4.0);

/// Smoothing of `|u|^p` on the outer boundary; only matters if a trace value
/// approaches zero.
const TRACE_EPS: f64 = 1e-20;

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Linear model solved at every step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Iteration {
    /// Isotropic weights `(|∇u|² + ε)^{(p−2)/2}` (Kačanov / IRLS).
    #[default]
    Reweighted,
    /// Full Hessian of the regularized energy, i.e. the anisotropic weight
    /// tensor `w (I + (p−2) ∇u ∇uᵀ / (|∇u|² + ε))`.
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop once the relative energy decrease of a step falls below `tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Gradient regularization; `None` means `1e-10 / diam(Ω)²`.
    pub eps_reg: Option<f64>,
    pub iteration: Iteration,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            eps_reg: None,
            iteration: Iteration::Reweighted,
        }
    }
}

/// Discrete minimizer on a mesh. Immutable once returned.
#[derive(Clone, Debug, PartialEq)]
pub struct FemSolution {
    mesh: LayeredMesh,
    values: Vec<f64>,
    p: f64,
    beta: f64,
    converged: bool,
    iterations: usize,
    energy_i: f64,
    boundary_i: f64,
    history: Vec<f64>,
    eps_reg: f64,
}

impl FemSolution {
    pub fn mesh(&self) -> &LayeredMesh {
        &self.mesh
    }

    /// Nodal values; exactly 1 on `∂D`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `Σ_T |∇u|^p |T| + β ∫_∂Ω |u|^p`.
    pub fn energy_i(&self) -> f64 {
        self.energy_i
    }

    /// `β ∫_∂Ω |u|^{p−1}`.
    pub fn boundary_i(&self) -> f64 {
        self.boundary_i
    }

    /// Regularized energy after every step, starting with the initial guess.
    pub fn energy_history(&self) -> &[f64] {
        &self.history
    }

    pub fn eps_reg(&self) -> f64 {
        self.eps_reg
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Both evaluations of the functional and their relative gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalPair {
    pub energy_i: f64,
    pub boundary_i: f64,
    pub gap: f64,
}

pub fn functional_both_ways(sol: &FemSolution) -> FunctionalPair {
    FunctionalPair {
        energy_i: sol.energy_i,
        boundary_i: sol.boundary_i,
        gap: math::abs(sol.energy_i - sol.boundary_i) / math::abs(sol.energy_i),
    }
}

/// Element and boundary data of the discrete functional.
struct Problem<'a> {
    mesh: &'a LayeredMesh,
    p: f64,
    beta: f64,
    eps: f64,
    areas: Vec<f64>,
    /// Gradients of the three hat functions on each triangle.
    grads: Vec<[Point2; 3]>,
    /// `(a, b, weight)` per Gauss point; the point is `a(1−ξ) + bξ`.
    quad: Vec<(usize, usize, f64, f64)>,
    /// Free index of each node, `usize::MAX` on `∂D`.
    free: Vec<usize>,
    nfree: usize,
}

impl<'a> Problem<'a> {
    fn new(mesh: &'a LayeredMesh, p: f64, beta: f64, eps: f64) -> Self {
        let nodes = mesh.nodes();
        let mut areas = Vec::with_capacity(mesh.triangle_count());
        let mut grads = Vec::with_capacity(mesh.triangle_count());
        for &[a, b, c] in mesh.triangles() {
            let (xa, xb, xc) = (nodes[a], nodes[b], nodes[c]);
            let twice = (xb - xa).cross(xc - xa);
            // ∇φ_a = (x_c − x_b)^⊥ / 2|T| with ⊥ the counterclockwise quarter turn
            let g = |e: Point2| Point2::new(-e.y, e.x) * (1.0 / twice);
            areas.push(0.5 * twice);
            grads.push([g(xc - xb), g(xa - xc), g(xb - xa)]);
        }
        let mut quad = Vec::with_capacity(2 * mesh.outer_boundary().len());
        for (a, b, len) in mesh.outer_segments() {
            for xi in GAUSS {
                quad.push((a, b, xi, 0.5 * len));
            }
        }
        let mut free = vec![0; mesh.node_count()];
        mesh.inner_boundary().iter().for_each(|&i| free[i] = usize::MAX);
        let mut nfree = 0;
        for f in free.iter_mut() {
            if *f == 0 {
                *f = nfree;
                nfree += 1;
            }
        }
        Self {
            mesh,
            p,
            beta,
            eps,
            areas,
            grads,
            quad,
            free,
            nfree,
        }
    }

    fn gradient_on(&self, t: usize, u: &[f64]) -> Point2 {
        let [a, b, c] = self.mesh.triangles()[t];
        let g = &self.grads[t];
        g[0] * u[a] + g[1] * u[b] + g[2] * u[c]
    }

    fn trace(&self, q: usize, u: &[f64]) -> f64 {
        let (a, b, xi, _) = self.quad[q];
        u[a] * (1.0 - xi) + u[b] * xi
    }

    /// Regularized discrete energy, the quantity the iteration decreases.
    fn energy(&self, u: &[f64]) -> f64 {
        let half = 0.5 * self.p;
        let bulk: f64 = (0..self.areas.len())
            .map(|t| {
                let g = self.gradient_on(t, u);
                self.areas[t] * math::powf(g.dot(g) + self.eps, half)
            })
            .sum();
        let edge: f64 = (0..self.quad.len())
            .map(|q| {
                let v = self.trace(q, u);
                self.quad[q].3 * math::powf(v * v + TRACE_EPS, half)
            })
            .sum();
        bulk + self.beta * edge
    }

    /// Unregularized energy and boundary forms of the functional.
    fn both_forms(&self, u: &[f64]) -> (f64, f64) {
        let p = self.p;
        let bulk: f64 = (0..self.areas.len())
            .map(|t| {
                let g = self.gradient_on(t, u);
                self.areas[t] * math::powf(g.dot(g), 0.5 * p)
            })
            .sum();
        let (mut up, mut up1) = (0.0, 0.0);
        for q in 0..self.quad.len() {
            let v = math::abs(self.trace(q, u));
            let w = self.quad[q].3;
            up += w * math::powf(v, p);
            up1 += w * math::powf(v, p - 1.0);
        }
        (bulk + self.beta * up, self.beta * up1)
    }

    /// `φ'(α)` for `φ(α) = E(u + α d)`, from per-element gradients.
    fn slope(&self, gu: &[Point2], gd: &[Point2], tu: &[f64], td: &[f64], alpha: f64) -> f64 {
        let e = 0.5 * self.p - 1.0;
        let bulk: f64 = (0..gu.len())
            .map(|t| {
                let g = gu[t] + gd[t] * alpha;
                self.areas[t] * math::powf(g.dot(g) + self.eps, e) * g.dot(gd[t])
            })
            .sum();
        let edge: f64 = (0..tu.len())
            .map(|q| {
                let v = tu[q] + alpha * td[q];
                self.quad[q].3 * math::powf(v * v + TRACE_EPS, e) * v * td[q]
            })
            .sum();
        self.p * (bulk + self.beta * edge)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nfree];
        for tri in self.mesh.triangles() {
            for &a in tri {
                for &b in tri {
                    let (fa, fb) = (self.free[a], self.free[b]);
                    if a != b && fa != usize::MAX && fb != usize::MAX {
                        adj[fa].push(fb);
                    }
                }
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Assembles the step matrix and the energy gradient on free nodes.
    fn assemble(&self, u: &[f64], iteration: Iteration, mat: &mut EnvelopeMatrix, rhs: &mut [f64]) {
        mat.clear();
        rhs.iter_mut().for_each(|r| *r = 0.0);
        let p = self.p;
        let newton = iteration == Iteration::Newton;
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let g = self.gradient_on(t, u);
            let s = g.dot(g) + self.eps;
            let w = p * self.areas[t] * math::powf(s, 0.5 * p - 1.0);
            let grads = &self.grads[t];
            let proj = [g.dot(grads[0]), g.dot(grads[1]), g.dot(grads[2])];
            for a in 0..3 {
                let fa = self.free[tri[a]];
                if fa == usize::MAX {
                    continue;
                }
                rhs[fa] += w * proj[a];
                for b in 0..=a {
                    let fb = self.free[tri[b]];
                    if fb == usize::MAX {
                        continue;
                    }
                    let mut k = grads[a].dot(grads[b]);
                    if newton {
                        k += (p - 2.0) * proj[a] * proj[b] / s;
                    }
                    mat.add(fa, fb, w * k);
                }
            }
        }
        for (q, &(a, b, xi, weight)) in self.quad.iter().enumerate() {
            let v = self.trace(q, u);
            let s = v * v + TRACE_EPS;
            let w = p * self.beta * weight * math::powf(s, 0.5 * p - 1.0);
            let curv = if newton { ((p - 1.0) * v * v + TRACE_EPS) / s } else { 1.0 };
            let phi = [(a, 1.0 - xi), (b, xi)];
            for i in 0..2 {
                let fi = self.free[phi[i].0];
                if fi == usize::MAX {
                    continue;
                }
                rhs[fi] += w * v * phi[i].1;
                for j in 0..=i {
                    let fj = self.free[phi[j].0];
                    if fj == usize::MAX {
                        continue;
                    }
                    // a repeated node means a degenerate edge; add the full product
                    let factor = if i != j && phi[i].0 == phi[j].0 { 2.0 } else { 1.0 };
                    mat.add(fi, fj, factor * w * curv * phi[i].1 * phi[j].1);
                }
            }
        }
    }
}

/// Initial guess `1 − (1 − u_m)·depth`, with `u_m` from the radial solution
/// on the disk of equal inner perimeter and the thickness implied by the
/// outer perimeter.
fn initial_guess(mesh: &LayeredMesh, p: f64, beta: f64) -> Vec<f64> {
    let inner = mesh.inner_length();
    let radius = inner / math::TAU;
    let delta = ((mesh.outer_length() - inner) / math::TAU).max(1e-3 * radius);
    let um = solve_radial(2, p, beta, radius, delta)
        .map(|s| s.min_value())
        .unwrap_or(0.5);
    mesh.depth().into_iter().map(|d| 1.0 - (1.0 - um) * d).collect()
}

fn line_search<F: Fn(f64) -> f64>(slope: F, slope0: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut flo, mut fhi) = (slope0, slope(1.0));
    while fhi < 0.0 && hi < 1024.0 {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = slope(hi);
    }
    if fhi <= 0.0 {
        return hi;
    }
    // Illinois variant of regula falsi on the increasing function φ'
    let mut side = 0i8;
    for _ in 0..100 {
        let mid = (lo * fhi - hi * flo) / (fhi - flo);
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let fm = slope(mid);
        if fm == 0.0 || (hi - lo) <= 1e-13 * hi || math::abs(fm) <= 1e-13 * math::abs(slope0) {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
            flo = fm;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes the discrete functional on `mesh` with `u = 1` on `∂D`.
///
/// Every step solves a weighted linear Robin problem (see [`Iteration`]) for
/// a search direction, then minimizes the true energy along it, so the
/// regularized energy never increases. For `p = 2` one solve is exact.
pub fn solve_fem(mesh: &LayeredMesh, p: f64, beta: f64, options: &SolverOptions) -> Result<FemSolution> {
    positive("p", p)?;
    positive("beta", beta)?;
    if !(P_RANGE.0..=P_RANGE.1).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            lo: P_RANGE.0,
            hi: P_RANGE.1,
        });
    }
    positive("tol", options.tol)?;
    let eps = match options.eps_reg {
        Some(e) => crate::error::non_negative("eps_reg", e)?,
        None => 1e-10 / (mesh.diameter() * mesh.diameter()),
    };
    mesh.check()?;
    let problem = Problem::new(mesh, p, beta, eps);
    if problem.nfree == 0 {
        return Err(Error::Mesh("no free nodes".into()));
    }
    let tris = mesh.triangles();
    let mut mat = EnvelopeMatrix::new(&problem.adjacency());
    let mut rhs = vec![0.0; problem.nfree];

    let mut u = initial_guess(mesh, p, beta);
    let mut energy = problem.energy(&u);
    let mut history = vec![energy];
    let mut converged = false;
    let mut iterations = 0;
    let quadratic = p == 2.0;

    while iterations < options.max_iter.max(1) {
        problem.assemble(&u, options.iteration, &mut mat, &mut rhs);
        mat.factor().map_err(|e| Error::Mesh(format!("singular step matrix: {e}")))?;
        let step = mat.solve(&rhs)?;
        let mut d = vec![0.0; u.len()];
        for (i, &f) in problem.free.iter().enumerate() {
            if f != usize::MAX {
                d[i] = -step[f];
            }
        }
        iterations += 1;

        let gu: Vec<Point2> = (0..tris.len()).map(|t| problem.gradient_on(t, &u)).collect();
        let gd: Vec<Point2> = (0..tris.len()).map(|t| problem.gradient_on(t, &d)).collect();
        let tu: Vec<f64> = (0..problem.quad.len()).map(|q| problem.trace(q, &u)).collect();
        let td: Vec<f64> = (0..problem.quad.len()).map(|q| problem.trace(q, &d)).collect();
        let slope0 = problem.slope(&gu, &gd, &tu, &td, 0.0);
        if !(slope0 < 0.0) {
            // no descent left at working precision
            converged = slope0.is_finite();
            break;
        }
        let alpha = if quadratic {
            1.0
        } else {
            line_search(|a| problem.slope(&gu, &gd, &tu, &td, a), slope0)
        };
        let trial: Vec<f64> = u.iter().zip(&d).map(|(x, y)| x + alpha * y).collect();
        let trial_energy = problem.energy(&trial);
        if !trial_energy.is_finite() {
            return Err(Error::Mesh("energy became non-finite".into()));
        }
        if trial_energy > energy {
            // roundoff floor reached
            converged = true;
            break;
        }
        let decrease = (energy - trial_energy) / math::abs(trial_energy);
        u = trial;
        energy = trial_energy;
        history.push(energy);
        if quadratic || decrease < options.tol {
            converged = true;
            break;
        }
    }
    mesh.inner_boundary().iter().for_each(|&i| u[i] = 1.0);
    let (energy_i, boundary_i) = problem.both_forms(&u);
    Ok(FemSolution {
        mesh: mesh.clone(),
        values: u,
        p,
        beta,
        converged,
        iterations,
        energy_i,
        boundary_i,
        history,
        eps_reg: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::build_layered_mesh;
    use crate::geometry::ConvexPolygon;

    fn annulus(l: usize, m: usize) -> LayeredMesh {
        build_layered_mesh(&ConvexPolygon::regular(m / 2, 1.0).unwrap(), 1.0, l, m).unwrap()
    }

    #[test]
    fn hat_gradients_sum_to_zero() {
        let mesh = annulus(2, 16);
        let pr = Problem::new(&mesh, 2.0, 1.0, 0.0);
        for g in &pr.grads {
            let s = g[0] + g[1] + g[2];
            assert!(s.norm() < 1e-12);
        }
        // linear functions have exact gradients
        let u: Vec<f64> = mesh.nodes().iter().map(|x| 2.0 * x.x - 3.0 * x.y).collect();
        for t in 0..mesh.triangle_count() {
            let g = pr.gradient_on(t, &u);
            assert!((g.x - 2.0).abs() < 1e-10 && (g.y + 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_one_has_pure_boundary_energy() {
        let mesh = annulus(3, 32);
        let pr = Problem::new(&mesh, 3.0, 0.5, 0.0);
        let u = vec![1.0; mesh.node_count()];
        let (e, b) = pr.both_forms(&u);
        let per = mesh.outer_length();
        assert!((e - 0.5 * per).abs() < 1e-13);
        assert!((b - 0.5 * per).abs() < 1e-13);
    }

    #[test]
    fn p2_is_a_single_solve() {
        let mesh = annulus(4, 32);
        let sol = solve_fem(&mesh, 2.0, 1.0, &SolverOptions::default()).unwrap();
        assert_eq!(sol.iterations(), 1);
        assert!(sol.converged());
        let pair = functional_both_ways(&sol);
        assert!(pair.gap < 1e-10, "gap {}", pair.gap);
    }

    #[test]
    fn methods_agree() {
        let mesh = annulus(4, 48);
        for &p in &[1.5, 3.0] {
            let a = solve_fem(&mesh, p, 1.0, &SolverOptions::default()).unwrap();
            let b = solve_fem(
                &mesh,
                p,
                1.0,
                &SolverOptions {
                    iteration: Iteration::Newton,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(a.converged() && b.converged());
            assert!((a.energy_i() - b.energy_i()).abs() < 1e-8 * b.energy_i());
            assert!(b.iterations() <= a.iterations());
        }
    }

    #[test]
    fn rejects_out_of_range_exponent() {
        let mesh = annulus(2, 16);
        assert!(solve_fem(&mesh, 1.2, 1.0, &SolverOptions::default()).is_err());
        assert!(solve_fem(&mesh, 2.0, 0.0, &SolverOptions::default()).is_err());
    }

    #[test]
    fn line_search_finds_quadratic_minimum() {
        // φ(α) = (α − 3)², φ'(α) = 2(α − 3)
        let a = line_search(|a| 2.0 * (a - 3.0), -6.0);
        assert!((a - 3.0).abs() < 1e-10);
    }
}
