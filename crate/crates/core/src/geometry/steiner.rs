use alloc::format;
use alloc::vec::Vec;

use super::{ConvexPolygon, PlanarDomain, Point2};
use crate::error::{positive, Error, Result};
use crate::math;

/// Relative slack of the Alexandrov–Fenchel validation; balls sit exactly on
/// the equality case and must survive rounding.
const AF_TOL: f64 = 1e-10;

/// `Γ(k/2)` for a positive integer `k`, by the recursion `Γ(x + 1) = xΓ(x)`
/// from `Γ(1) = 1` or `Γ(1/2) = √π`.
fn gamma_half(k: usize) -> f64 {
    debug_assert!(k > 0);
    let (mut x, mut g) = if k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, math::sqrt(math::PI))
    };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume `ω_n = π^{n/2} / Γ(n/2 + 1)` of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    math::powf(math::PI, n as f64 / 2.0) / gamma_half(n + 2)
}

/// Steiner polynomial of a convex body in `R^n`, stored through its
/// quermassintegrals `W_0, …, W_n`:
///
/// ```text
/// |K + ρB| = Σ_{j=0}^{n}   C(n, j)   W_j     ρ^j
/// P(K + ρB) = n Σ_{j=0}^{n-1} C(n-1, j) W_{j+1} ρ^j
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerPolynomial {
    n: usize,
    w: Vec<f64>,
}

impl SteinerPolynomial {
    /// Validates positivity, `W_n = ω_n` and the Alexandrov–Fenchel chain
    /// `(W_j/ω_n)^{1/(n-j)} ≥ (W_i/ω_n)^{1/(n-i)}` for `0 ≤ i < j ≤ n-1`.
    pub fn new(n: usize, w: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "dimension must be at least 2",
            });
        }
        if w.len() != n + 1 {
            return Err(Error::Quermassintegrals(format!(
                "expected {} values for n = {n}, got {}",
                n + 1,
                w.len()
            )));
        }
        if let Some(j) = w.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::Quermassintegrals(format!(
                "W_{j} = {} must be finite and positive",
                w[j]
            )));
        }
        let omega = unit_ball_volume(n);
        if math::abs(w[n] - omega) > 1e-12 * omega {
            return Err(Error::Quermassintegrals(format!(
                "W_{n} = {} differs from the unit-ball volume {omega}",
                w[n]
            )));
        }
        let normalized: Vec<f64> = (0..n)
            .map(|i| math::powf(w[i] / omega, 1.0 / (n - i) as f64))
            .collect();
        for j in 1..n {
            for i in 0..j {
                if normalized[j] < normalized[i] * (1.0 - AF_TOL) {
                    return Err(Error::AlexandrovFenchel { i, j });
                }
            }
        }
        Ok(Self { n, w })
    }

    /// Planar case: `W_0 = |P|`, `W_1 = P(P)/2`, `W_2 = π`.
    pub fn from_polygon(polygon: &ConvexPolygon) -> Self {
        Self {
            n: 2,
            w: alloc::vec![polygon.area(), polygon.perimeter() / 2.0, math::PI],
        }
    }

    /// Ball of radius `r` in `R^n`: `W_j = ω_n r^{n-j}`.
    pub fn ball(n: usize, r: f64) -> Result<Self> {
        positive("r", r)?;
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "dimension must be at least 2",
            });
        }
        let omega = unit_ball_volume(n);
        let w = (0..=n)
            .map(|j| omega * math::powi(r, (n - j) as i32))
            .collect();
        Ok(Self { n, w })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn quermassintegrals(&self) -> &[f64] {
        &self.w
    }

    /// `P(K + ρB)`.
    pub fn perimeter_at(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let n = self.n;
        let mut acc = 0.0;
        for j in (0..n).rev() {
            acc = acc * rho + math::binomial(n - 1, j) * self.w[j + 1];
        }
        Ok(n as f64 * acc)
    }

    /// `|K + ρB|`.
    pub fn volume_at(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let n = self.n;
        let mut acc = 0.0;
        for j in (0..=n).rev() {
            acc = acc * rho + math::binomial(n, j) * self.w[j];
        }
        Ok(acc)
    }

    /// Radius `W_{n-1}/ω_n` of the ball `K*` sharing `W_{n-1}` with `K`. In
    /// the plane this is the equal-perimeter disk.
    pub fn equivalent_ball_radius(&self) -> f64 {
        self.w[self.n - 1] / unit_ball_volume(self.n)
    }

    /// Compares `W_i(K)` against `W_i(K*)` for `0 ≤ i ≤ n-1`.
    pub fn quermass_domination(&self) -> DominationReport {
        let n = self.n;
        let omega = unit_ball_volume(n);
        let r = self.equivalent_ball_radius();
        let margins: Vec<f64> = (0..n)
            .map(|i| omega * math::powi(r, (n - i) as i32) - self.w[i])
            .collect();
        let holds = margins
            .iter()
            .enumerate()
            .all(|(i, &m)| m >= -AF_TOL * omega * math::powi(r, (n - i) as i32));
        DominationReport {
            equivalent_radius: r,
            margins,
            holds,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "offset must be finite and non-negative",
        })
    }
}

/// Outcome of the comparison `W_i(K) ≤ W_i(K*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DominationReport {
    pub equivalent_radius: f64,
    /// `W_i(K*) − W_i(K)` for `i = 0, …, n-1`.
    pub margins: Vec<f64>,
    pub holds: bool,
}

/// Constant `C` such that `ΔP ≥ C ΔV` whenever `B_R ⊂ Ω` and
/// `ΔV = |Ω| − |B_R| ≤ δ₀`:
///
/// ```text
/// C = (n ω_n R^{n-1} / δ₀) [ (1 + δ₀/(ω_n R^n))^{1-1/n} − 1 ]
/// ```
pub fn lemma_cost_constant(n: usize, radius: f64, delta0: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "dimension must be at least 2",
        });
    }
    positive("R", radius)?;
    positive("delta0", delta0)?;
    let omega = unit_ball_volume(n);
    let nf = n as f64;
    let ball_volume = omega * math::powi(radius, n as i32);
    let sphere = nf * omega * math::powi(radius, n as i32 - 1);
    Ok(sphere / delta0 * math::pow1p_m1(delta0 / ball_volume, 1.0 - 1.0 / nf))
}

/// Planar check of `P(Ω) − P(B_R) ≥ C (|Ω| − |B_R|)` with `B_R` centered at
/// the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaCostReport {
    pub radius: f64,
    pub delta_perimeter: f64,
    pub delta_volume: f64,
    pub constant: f64,
    /// `ΔP − C ΔV`.
    pub margin: f64,
    pub holds: bool,
}

pub fn lemma_cost_check<D: PlanarDomain + ?Sized>(
    radius: f64,
    domain: &D,
    delta0: f64,
) -> Result<LemmaCostReport> {
    positive("R", radius)?;
    if !domain.contains_disk(Point2::ORIGIN, radius) {
        return Err(Error::NotContained { radius });
    }
    let ball_perimeter = math::TAU * radius;
    let delta_volume = (domain.area() - math::PI * radius * radius).max(0.0);
    if delta_volume > delta0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "delta0",
            value: delta0,
            reason: "volume excess of the domain exceeds delta0",
        });
    }
    let constant = lemma_cost_constant(2, radius, delta0)?;
    let delta_perimeter = domain.perimeter() - ball_perimeter;
    let margin = delta_perimeter - constant * delta_volume;
    Ok(LemmaCostReport {
        radius,
        delta_perimeter,
        delta_volume,
        constant,
        margin,
        holds: margin >= -1e-12 * ball_perimeter,
    })
}
