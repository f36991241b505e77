//! Closed-form minimizer when `D = B_R` and `Ω = B_{R+δ}`.
//!
//! The radial p-harmonic profile has constant flux `r^{n-1}|u'|^{p-2}u' = −γ₁`,
//! so `u'(r) = −γ₁^{1/(p-1)} r^{-(n-1)/(p-1)}` and `u(R) = 1`. The Robin
//! condition at `R + δ` fixes `γ₁`:
//!
//! ```text
//! γ₁ = β / [ (R+δ)^{-(n-1)/(p-1)} + β^{1/(p-1)} ∫_R^{R+δ} s^{-(n-1)/(p-1)} ds ]^{p-1}
//! ```
//!
//! and the functional equals `n ω_n γ₁`.

use alloc::vec::Vec;

use crate::error::{non_negative, positive, Error, Result};
use crate::geometry::unit_ball_volume;
use crate::math;

/// `|p − n|` below which the logarithmic branch is used.
pub const LOG_BRANCH_TOL: f64 = 1e-9;
/// Central finite-difference step used by [`monotonicity_profile`].
pub const FD_STEP: f64 = 1e-6;
/// Half-width of the band around `δ*` where no sign is reported.
pub const THRESHOLD_BAND: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSolution {
    n: usize,
    p: f64,
    beta: f64,
    radius: f64,
    thickness: f64,
    gamma1: f64,
    u_min: f64,
    /// `γ₁^{1/(p-1)}`, the modulus of `r^{(n-1)/(p-1)} u'(r)`.
    slope: f64,
    /// `(p − n)/(p − 1)`; zero on the logarithmic branch.
    exponent: f64,
    log_branch: bool,
}

pub fn solve_radial(n: usize, p: f64, beta: f64, radius: f64, delta: f64) -> Result<RadialSolution> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "dimension must be at least 2",
        });
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "exponent must satisfy 1 < p < inf",
        });
    }
    positive("beta", beta)?;
    positive("R", radius)?;
    non_negative("delta", delta)?;

    let nf = n as f64;
    let log_branch = math::abs(p - nf) < LOG_BRANCH_TOL;
    let exponent = if log_branch { 0.0 } else { (p - nf) / (p - 1.0) };
    let decay = (nf - 1.0) / (p - 1.0);
    let outer = radius + delta;
    let beta_root = math::powf(beta, 1.0 / (p - 1.0));

    let mut sol = RadialSolution {
        n,
        p,
        beta,
        radius,
        thickness: delta,
        gamma1: 0.0,
        u_min: 1.0,
        slope: 0.0,
        exponent,
        log_branch,
    };
    let bracket = math::powf(outer, -decay) + beta_root * sol.primitive(outer);
    sol.slope = beta_root / bracket;
    sol.gamma1 = beta / math::powf(bracket, p - 1.0);
    // Robin: u(R+δ) = β^{-1/(p-1)} |u'(R+δ)|, free of the cancellation in 1 − slope·∫.
    sol.u_min = math::powf(outer, -decay) / bracket;
    Ok(sol)
}

impl RadialSolution {
    /// `∫_R^r s^{-(n-1)/(p-1)} ds`, written with `expm1` so the power branch
    /// tends continuously to the logarithm as `p → n`.
    fn primitive(&self, r: f64) -> f64 {
        let log_ratio = math::ln(r / self.radius);
        if self.log_branch {
            log_ratio
        } else {
            let e = self.exponent;
            math::powf(self.radius, e) * math::exp_m1(e * log_ratio) / e
        }
    }

    fn check_radius(&self, r: f64) -> Result<f64> {
        let (lo, hi) = (self.radius, self.outer_radius());
        let slack = 1e-12 * hi;
        if r.is_finite() && r >= lo - slack && r <= hi + slack {
            Ok(r.clamp(lo, hi))
        } else {
            Err(Error::OutOfRange {
                name: "r",
                value: r,
                lo,
                hi,
            })
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn inner_radius(&self) -> f64 {
        self.radius
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn outer_radius(&self) -> f64 {
        self.radius + self.thickness
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// `u(R + δ)`, the minimum of the profile.
    pub fn min_value(&self) -> f64 {
        self.u_min
    }

    pub fn is_log_branch(&self) -> bool {
        self.log_branch
    }

    /// `u(r)` for `R ≤ r ≤ R + δ`.
    pub fn u(&self, r: f64) -> Result<f64> {
        let r = self.check_radius(r)?;
        Ok(1.0 - self.slope * self.primitive(r))
    }

    /// `u'(r) = −γ₁^{1/(p-1)} r^{-(n-1)/(p-1)}`.
    pub fn du(&self, r: f64) -> Result<f64> {
        let r = self.check_radius(r)?;
        Ok(self.du_unchecked(r))
    }

    pub(crate) fn du_unchecked(&self, r: f64) -> f64 {
        let decay = (self.n as f64 - 1.0) / (self.p - 1.0);
        -self.slope * math::powf(r, -decay)
    }

    /// Inverse profile: the radius where `u` takes the value `t ∈ [u_m, 1]`.
    pub fn radius_at_value(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.u_min, 1.0);
        let slack = 1e-12;
        if !(t.is_finite() && t >= lo - slack && t <= hi + slack) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                lo,
                hi,
            });
        }
        if self.thickness == 0.0 || self.slope == 0.0 {
            return Ok(self.radius);
        }
        let t = t.clamp(lo, hi);
        let integral = (1.0 - t) / self.slope;
        let log_ratio = if self.log_branch {
            integral
        } else {
            let e = self.exponent;
            math::ln_1p(e * integral * math::powf(self.radius, -e)) / e
        };
        Ok((self.radius * math::exp(log_ratio)).clamp(self.radius, self.outer_radius()))
    }

    /// `I = n ω_n γ₁`.
    pub fn functional_value(&self) -> f64 {
        self.n as f64 * unit_ball_volume(self.n) * self.gamma1
    }

    /// `β u_m^{p-1} P(B_{R+δ})`, the boundary form of the functional.
    pub fn boundary_functional(&self) -> f64 {
        self.beta * math::powf(self.u_min, self.p - 1.0) * sphere_area(self.n, self.outer_radius())
    }

    /// `−|u'(R+δ)|^{p-1} + β u(R+δ)^{p-1}`, evaluated through [`Self::u`] and
    /// [`Self::du`].
    pub fn robin_residual(&self) -> f64 {
        let r = self.outer_radius();
        let slope = -self.du_unchecked(r);
        let value = 1.0 - self.slope * self.primitive(r);
        -math::powf(slope, self.p - 1.0) + self.beta * math::powf(value.max(0.0), self.p - 1.0)
    }

    /// `β u_m^{p-1} (R+δ)^{n-1}`; equals `γ₁` when the flux balances.
    pub fn flux_from_boundary(&self) -> f64 {
        self.beta
            * math::powf(self.u_min, self.p - 1.0)
            * math::powi(self.outer_radius(), self.n as i32 - 1)
    }
}

/// `n ω_n r^{n-1}`.
pub fn sphere_area(n: usize, r: f64) -> f64 {
    n as f64 * unit_ball_volume(n) * math::powi(r, n as i32 - 1)
}

/// `[(n−1)/(R(p−1))]^{p−1}`: for `β` at or above this value the functional is
/// decreasing in `δ`.
pub fn critical_beta(n: usize, p: f64, radius: f64) -> f64 {
    math::powf((n as f64 - 1.0) / (radius * (p - 1.0)), p - 1.0)
}

/// `δ* = ((n−1)/(p−1)) β^{-1/(p−1)} − R`. The functional increases in `δ` on
/// `(0, δ*)` and decreases beyond; `δ* ≤ 0` means decreasing throughout.
pub fn delta_threshold(n: usize, p: f64, beta: f64, radius: f64) -> f64 {
    (n as f64 - 1.0) / (p - 1.0) * math::powf(beta, -1.0 / (p - 1.0)) - radius
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityRow {
    pub delta: f64,
    pub value: f64,
    /// Finite-difference estimate of `dI/dδ`.
    pub slope: f64,
    /// Sign of `slope`, forced to 0 within [`THRESHOLD_BAND`] of `δ*`.
    pub sign: i8,
    /// `sign(δ* − δ)`, with the same band.
    pub expected_sign: i8,
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Tabulates `I(δ)` and the sign of `dI/dδ` over a sorted grid of positive
/// thicknesses.
pub fn monotonicity_profile(
    n: usize,
    p: f64,
    beta: f64,
    radius: f64,
    grid: &[f64],
) -> Result<Vec<MonotonicityRow>> {
    if grid.is_empty() {
        return Err(Error::Mismatch("empty thickness grid".into()));
    }
    for (i, &d) in grid.iter().enumerate() {
        positive("delta", d)?;
        if i > 0 && grid[i - 1] >= d {
            return Err(Error::Mismatch("thickness grid must be strictly increasing".into()));
        }
    }
    let threshold = delta_threshold(n, p, beta, radius);
    let value_at = |d: f64| solve_radial(n, p, beta, radius, d).map(|s| s.functional_value());
    grid.iter()
        .map(|&delta| {
            let value = value_at(delta)?;
            let slope = if delta > FD_STEP {
                (value_at(delta + FD_STEP)? - value_at(delta - FD_STEP)?) / (2.0 * FD_STEP)
            } else {
                (value_at(delta + FD_STEP)? - value) / FD_STEP
            };
            let in_band = math::abs(delta - threshold) <= THRESHOLD_BAND;
            Ok(MonotonicityRow {
                delta,
                value,
                slope,
                sign: if in_band { 0 } else { sign_of(slope) },
                expected_sign: if in_band { 0 } else { sign_of(threshold - delta) },
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    /// `I(B_R, B_{R+δ}) − β P(B_R)`.
    pub gap: f64,
    pub value: f64,
    pub baseline: f64,
    /// `β < [(n−1)/(R(p−1))]^{p−1}`.
    pub in_regime: bool,
}

/// Excess of the insulated ball over the bare one. Outside the small-`β`
/// regime the gap may be negative; that is reported, not rejected.
pub fn counterintuitive_gap(n: usize, p: f64, beta: f64, radius: f64, delta: f64) -> Result<GapReport> {
    let sol = solve_radial(n, p, beta, radius, delta)?;
    let baseline = beta * sphere_area(n, radius);
    let value = if delta == 0.0 {
        baseline
    } else {
        sol.functional_value()
    };
    Ok(GapReport {
        gap: value - baseline,
        value,
        baseline,
        in_regime: beta < critical_beta(n, p, radius),
    })
}
