use super::mesh::build_star_mesh;
use super::solver::{solve_fem, SolverOptions};
use crate::error::{positive, Error, Result};
use crate::geometry::{ConvexPolygon, Disk, PlanarDomain, Point2, RoundedBody};
use crate::math;
use crate::radial::{critical_beta, solve_radial};

/// Outer domain `Ω ⊃ B_R`, star-shaped about the origin.
#[derive(Clone, Debug, PartialEq)]
pub enum OuterDomain {
    Disk(Disk),
    Polygon(ConvexPolygon),
    Rounded(RoundedBody),
}

impl OuterDomain {
    pub fn domain(&self) -> &dyn PlanarDomain {
        match self {
            OuterDomain::Disk(d) => d,
            OuterDomain::Polygon(p) => p,
            OuterDomain::Rounded(r) => r,
        }
    }

    /// `Q_a + B_R` with the centered square `Q_a` of half-side `a` chosen so
    /// the area is `area`. It contains `B_R` and is the squarest convex set
    /// that can do so with area close to `πR²`.
    pub fn rounded_square(radius: f64, area: f64) -> Result<Self> {
        positive("radius", radius)?;
        let excess = area - math::PI * radius * radius;
        positive("area - |B_R|", excess)?;
        // 4a² + 8Ra = excess, rationalized
        let a = excess / (4.0 * radius + 2.0 * math::sqrt(4.0 * radius * radius + excess));
        let core = ConvexPolygon::square(2.0 * a)?;
        Ok(OuterDomain::Rounded(RoundedBody::new(core, radius)?))
    }
}

/// Outcome of comparing `I(B_R; Ω)` with `β P(B_R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterintuitiveReport {
    pub i_fem: f64,
    /// `β P(B_R)`, the value for `Ω = B_R`.
    pub baseline: f64,
    pub gap: f64,
    pub positive_gap: bool,
    /// `β < [(n−1)/(R(p−1))]^{p−1}` with `n = 2`.
    pub in_regime: bool,
    pub critical_beta: f64,
    /// `|Ω| − |B_R|`.
    pub area_excess: f64,
    /// Closed-form value when `Ω` is a disk.
    pub radial: Option<f64>,
    pub converged: bool,
}

/// Solves on `Ω \ B_R` (with `B_R` approximated by the inscribed regular
/// `per_ring`-gon) and reports the gap to `β P(B_R)`. A regime violation is
/// reported through `in_regime`, not as an error.
pub fn counterintuitive_experiment(
    radius: f64,
    beta: f64,
    p: f64,
    omega: &OuterDomain,
    rings: usize,
    per_ring: usize,
    options: &SolverOptions,
) -> Result<CounterintuitiveReport> {
    positive("radius", radius)?;
    positive("beta", beta)?;
    positive("p", p)?;
    let domain = omega.domain();
    if !domain.contains_disk(Point2::ORIGIN, radius) {
        return Err(Error::NotContained { radius });
    }
    let crit = critical_beta(2, p, radius);
    let baseline = beta * math::TAU * radius;
    let area_excess = domain.area() - math::PI * radius * radius;
    let radial = match omega {
        OuterDomain::Disk(d) => Some(solve_radial(2, p, beta, radius, d.radius - radius)?.functional_value()),
        _ => None,
    };
    if let OuterDomain::Disk(d) = omega {
        if d.radius <= radius {
            // Ω = B_R: u ≡ 1 is the minimizer
            return Ok(CounterintuitiveReport {
                i_fem: baseline,
                baseline,
                gap: 0.0,
                positive_gap: false,
                in_regime: beta < crit,
                critical_beta: crit,
                area_excess,
                radial,
                converged: true,
            });
        }
    }
    let inner = ConvexPolygon::regular(per_ring, radius)?;
    let mesh = build_star_mesh(&inner, domain, rings, per_ring)?;
    let sol = solve_fem(&mesh, p, beta, options)?;
    let gap = sol.energy_i() - baseline;
    Ok(CounterintuitiveReport {
        i_fem: sol.energy_i(),
        baseline,
        gap,
        positive_gap: gap > 0.0,
        in_regime: beta < crit,
        critical_beta: crit,
        area_excess,
        radial,
        converged: sol.converged(),
    })
}
