//! Reference computations for the radial problem that share no code with the
//! closed form: a shooting method on the radial ODE and composite
//! Gauss–Legendre quadrature.
#![allow(dead_code)]

use std::f64::consts::PI;

/// |S^{n-1}| for the dimensions used in tests.
pub fn sphere_measure(n: usize) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => panic!("no tabulated sphere measure for n = {n}"),
    }
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss–Legendre quadrature with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * h;
        for &(x, w) in rule {
            sum += w * f(c + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}

/// State of the shooting method at the outer radius.
#[derive(Clone, Copy, Debug)]
pub struct Shot {
    pub slope: f64,
    pub u_outer: f64,
    pub du_outer: f64,
    /// `∫ |u'|^p r^{n-1} dr` by Simpson on the RK4 grid.
    pub energy_density: f64,
}

/// RK4 for `u'' = −(n−1) u' / ((p−1) r)`, `u(R) = 1`, `u'(R) = −slope`.
pub fn shoot(n: usize, p: f64, r0: f64, delta: f64, slope: f64, steps: usize) -> Shot {
    assert!(steps % 2 == 0);
    let k = (n as f64 - 1.0) / (p - 1.0);
    let rhs = |r: f64, v: f64| -k * v / r;
    let h = delta / steps as f64;
    let (mut u, mut v) = (1.0, -slope);
    let density = |r: f64, v: f64| v.abs().powf(p) * r.powi(n as i32 - 1);
    let mut simpson = density(r0, v);
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        let (k1u, k1v) = (v, rhs(r, v));
        let (k2u, k2v) = (v + 0.5 * h * k1v, rhs(r + 0.5 * h, v + 0.5 * h * k1v));
        let (k3u, k3v) = (v + 0.5 * h * k2v, rhs(r + 0.5 * h, v + 0.5 * h * k2v));
        let (k4u, k4v) = (v + h * k3v, rhs(r + h, v + h * k3v));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let weight = if i + 1 == steps { 1.0 } else if (i + 1) % 2 == 1 { 4.0 } else { 2.0 };
        simpson += weight * density(r + h, v);
    }
    Shot {
        slope,
        u_outer: u,
        du_outer: v,
        energy_density: simpson * h / 3.0,
    }
}

/// Shooting solution of the radial Robin problem and its functional value
/// `|S^{n-1}| (∫ |u'|^p r^{n-1} dr + β u(R+δ)^p (R+δ)^{n-1})`.
pub fn shooting_functional(n: usize, p: f64, beta: f64, r0: f64, delta: f64, steps: usize) -> (Shot, f64) {
    let residual = |s: f64| {
        let shot = shoot(n, p, r0, delta, s, steps);
        if shot.u_outer <= 0.0 {
            f64::INFINITY
        } else {
            shot.du_outer.abs().powf(p - 1.0) - beta * shot.u_outer.powf(p - 1.0)
        }
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shot = shoot(n, p, r0, delta, 0.5 * (lo + hi), steps);
    let outer = r0 + delta;
    let value = sphere_measure(n)
        * (shot.energy_density + beta * shot.u_outer.powf(p) * outer.powi(n as i32 - 1));
    (shot, value)
}
