//! Web-function upper bound.
//!
//! Given `D` through its Steiner polynomial, let `v` be the radial minimizer
//! on the ball `D*` of equal `W_{n-1}` with the same thickness `δ`. The test
//! function `w(x) = v(R + d(x))`, with `d` the distance to `D`, has level sets
//! `D + ρB` and `|Dw| = |v'(R + ρ)|` on them. By the coarea formula its
//! energy reduces to
//!
//! ```text
//! ∫_0^δ |v'(R + s)|^p P(D + sB) ds + β v(R + δ)^p P(D + δB)
//! ```
//!
//! which bounds `I(D)` from above and is itself at most `I(D*)`, because
//! `P(D + sB) ≤ P(D* + sB)` for every `s`.

use crate::error::{Error, Result};
use crate::geometry::SteinerPolynomial;
use crate::math;
use crate::quad;
use crate::radial::{solve_radial, RadialSolution};

/// Relative tolerance of the coarea quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Profile of the transplanted radial minimizer.
///
/// Level values `t` range over `[w_m, 1]`; `g(t)` is the gradient modulus on
/// `{v = t}` and `G⁻¹(t)` the radius where `v = t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WebProfile {
    radial: RadialSolution,
}

impl WebProfile {
    /// Builds the profile for the equivalent ball of `steiner` with `R* =
    /// W_{n-1}/ω_n`.
    pub fn build(steiner: &SteinerPolynomial, beta: f64, p: f64, delta: f64) -> Result<Self> {
        let radius = steiner.equivalent_ball_radius();
        let radial = solve_radial(steiner.dimension(), p, beta, radius, delta)?;
        Ok(Self { radial })
    }

    pub fn radial(&self) -> &RadialSolution {
        &self.radial
    }

    pub fn radius(&self) -> f64 {
        self.radial.inner_radius()
    }

    /// `w_m = v(R + δ)`.
    pub fn min_value(&self) -> f64 {
        self.radial.min_value()
    }

    /// `G⁻¹(t)`, the radius at which `v = t`.
    pub fn radius_at_level(&self, t: f64) -> Result<f64> {
        self.radial.radius_at_value(t)
    }

    /// `ρ(t) = G⁻¹(t) − R`: the level set `{w > t}` is `D + ρ(t)B`.
    pub fn offset_at_level(&self, t: f64) -> Result<f64> {
        Ok(self.radius_at_level(t)? - self.radius())
    }

    /// `g(t) = |Dv|` on `{v = t}`.
    pub fn level_gradient(&self, t: f64) -> Result<f64> {
        let r = self.radius_at_level(t)?;
        Ok(-self.radial.du_unchecked(r))
    }

    /// `G⁻¹(t)` from its defining integral `R + ∫_t^1 ds / g(s)`.
    pub fn radius_at_level_by_quadrature(&self, t: f64, rel_tol: f64) -> Result<f64> {
        let (lo, _) = (self.min_value(), 1.0);
        if !(t.is_finite() && t >= lo - 1e-12 && t <= 1.0 + 1e-12) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                lo,
                hi: 1.0,
            });
        }
        let q = quad::integrate(
            |s| self.level_gradient(s).map_or(f64::NAN, |g| 1.0 / g),
            t.clamp(lo, 1.0),
            1.0,
            rel_tol,
            0.0,
        );
        Ok(self.radius() + q.value)
    }

    /// `w = G(R + d)` as a function of the distance `d ∈ [0, δ]` to `D`.
    pub fn value_at_distance(&self, d: f64) -> Result<f64> {
        self.radial.u(self.radius() + d)
    }
}

/// Energy split of the web-function bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperBoundReport {
    pub r_star: f64,
    /// `I(D*)`, the radial value on the equivalent ball.
    pub i_star: f64,
    pub energy_term: f64,
    pub boundary_term: f64,
    pub total: f64,
    /// `I(D*) − total`; non-negative up to rounding.
    pub margin: f64,
    pub quadrature_error: f64,
}

pub fn web_upper_bound(steiner: &SteinerPolynomial, profile: &WebProfile) -> Result<UpperBoundReport> {
    web_upper_bound_with_tolerance(steiner, profile, DEFAULT_QUAD_TOL)
}

pub fn web_upper_bound_with_tolerance(
    steiner: &SteinerPolynomial,
    profile: &WebProfile,
    rel_tol: f64,
) -> Result<UpperBoundReport> {
    let radial = profile.radial();
    if radial.dimension() != steiner.dimension() {
        return Err(Error::Mismatch(alloc::format!(
            "profile dimension {} differs from body dimension {}",
            radial.dimension(),
            steiner.dimension()
        )));
    }
    let r_star = steiner.equivalent_ball_radius();
    if math::abs(radial.inner_radius() - r_star) > 1e-12 * r_star {
        return Err(Error::Mismatch(alloc::format!(
            "profile radius {} is not the equivalent radius {r_star}",
            radial.inner_radius()
        )));
    }
    let p = radial.exponent();
    let delta = radial.thickness();

    // Integrand in the offset variable s: smooth, no 1/g(t) singularity.
    let q = quad::integrate(
        |s| {
            let slope = -radial.du_unchecked(r_star + s);
            let perimeter = steiner.perimeter_at(s).unwrap_or(f64::NAN);
            math::powf(slope, p) * perimeter
        },
        0.0,
        delta,
        rel_tol,
        0.0,
    );
    let boundary_term =
        radial.beta() * math::powf(radial.min_value(), p) * steiner.perimeter_at(delta)?;
    let total = q.value + boundary_term;
    let i_star = radial.functional_value();
    Ok(UpperBoundReport {
        r_star,
        i_star,
        energy_term: q.value,
        boundary_term,
        total,
        margin: i_star - total,
        quadrature_error: q.error,
    })
}

/// Tolerance on `total ≤ I(D*)`, relative to `max(1, I(D*))`.
pub const WEB_CHAIN_TOL: f64 = 1e-9;
/// Tolerance on `I_fem ≤ total`, relative to `I(D*)`.
pub const FEM_CHAIN_TOL: f64 = 1e-3;

/// Outcome of `I_fem(D) ≤ web bound ≤ I(D*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainReport {
    pub bound: UpperBoundReport,
    pub web_below_ball: bool,
    pub fem_value: Option<f64>,
    /// `None` when no finite-element value was supplied.
    pub fem_below_web: Option<bool>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.web_below_ball && self.fem_below_web.unwrap_or(true)
    }
}

pub fn comparison_chain_check(
    steiner: &SteinerPolynomial,
    beta: f64,
    p: f64,
    delta: f64,
    fem_value: Option<f64>,
) -> Result<ChainReport> {
    let profile = WebProfile::build(steiner, beta, p, delta)?;
    let bound = web_upper_bound(steiner, &profile)?;
    let web_below_ball = bound.total <= bound.i_star + WEB_CHAIN_TOL * bound.i_star.max(1.0);
    let fem_below_web = fem_value.map(|v| v <= bound.total + FEM_CHAIN_TOL * bound.i_star);
    Ok(ChainReport {
        bound,
        web_below_ball,
        fem_value,
        fem_below_web,
    })
}
