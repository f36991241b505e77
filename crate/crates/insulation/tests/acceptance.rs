//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. `cargo test --test acceptance` runs it alone.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use insulation::shapes::{random_container, random_polygon, Preset};
use insulation_core::fem::{
    build_layered_mesh, counterintuitive_experiment, solve_fem, OuterDomain, SolverOptions,
};
use insulation_core::radial::monotonicity_profile;
use insulation_core::web::comparison_chain_check;
use insulation_core::{
    delta_threshold, lemma_cost_check, lemma_cost_constant, solve_radial, web_upper_bound, ConvexPolygon,
    Disk, Point2, RoundedBody, SteinerPolynomial, WebProfile,
};
use oracle::{gauss_legendre, integrate, shooting_functional, sphere_measure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// 1
const ORACLE_REL: f64 = 1e-8;
const ROBIN_RESIDUAL: f64 = 1e-10;
const RADIAL_SECONDS: f64 = 10.0;
const SHOOTING_STEPS: usize = 20_000;
// 2
const IDENTITY_REL: f64 = 1e-10;
// 3
const THRESHOLD_BAND: f64 = 1e-3;
// 4
const FEM_REL: f64 = 1e-2;
const FEM_SECONDS: f64 = 60.0;
const FEM_LEVELS: [(usize, usize); 3] = [(32, 256), (64, 512), (128, 1024)];
// 5
const CHAIN_SLACK: f64 = 1e-3;
const STRICT_WEB_MARGIN: f64 = 1e-3;
// 6
const BALL_EQUALITY: f64 = 1e-8;
// 7
const GAP_MARGIN: f64 = 1e-3;
// 8
const STEINER_REL: f64 = 1e-12;
const SEED: u64 = 20_240_601;
// 9
const LEMMA_CONSTANT_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn radial_sweep() -> Vec<(usize, f64, f64, f64)> {
    let mut cases = Vec::new();
    for n in 2..=4 {
        for p in [1.5, 2.0, 3.0, n as f64] {
            for beta in [0.1, 1.0, 10.0] {
                for delta in [0.1, 1.0, 5.0] {
                    cases.push((n, p, beta, delta));
                }
            }
        }
    }
    cases
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c1_radial_oracles() -> Outcome {
    let start = Instant::now();
    let rule = gauss_legendre(10);
    let (mut shoot_err, mut quad_err, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    for (n, p, beta, delta) in radial_sweep() {
        let s = solve_radial(n, p, beta, 1.0, delta).unwrap();
        let i = s.functional_value();
        let (_, shot_value) = shooting_functional(n, p, beta, 1.0, delta, SHOOTING_STEPS);
        let outer = 1.0 + delta;
        let bulk = integrate(|r| s.du(r).unwrap().abs().powf(p) * r.powi(n as i32 - 1), 1.0, outer, 64, &rule);
        let quad = sphere_measure(n) * (bulk + beta * s.min_value().powf(p) * outer.powi(n as i32 - 1));
        shoot_err = shoot_err.max(rel(i, shot_value));
        quad_err = quad_err.max(rel(i, quad));
        residual = residual.max(s.robin_residual().abs());
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: shoot_err < ORACLE_REL && quad_err < ORACLE_REL && residual <= ROBIN_RESIDUAL && secs < RADIAL_SECONDS,
        detail: format!(
            "108 cases: max rel err vs shooting {shoot_err:.2e}, vs quadrature {quad_err:.2e} (< {ORACLE_REL:e}); \
             max Robin residual {residual:.2e} (<= {ROBIN_RESIDUAL:e}); {secs:.1} s (< {RADIAL_SECONDS} s)"
        ),
    }
}

fn c2_boundary_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (n, p, beta, delta) in radial_sweep() {
        let s = solve_radial(n, p, beta, 1.0, delta).unwrap();
        let lhs = sphere_measure(n) * s.gamma1();
        let rhs = beta * s.min_value().powf(p - 1.0) * sphere_measure(n) * (1.0 + delta).powi(n as i32 - 1);
        worst = worst.max(rel(lhs, rhs));
    }
    Outcome {
        pass: worst <= IDENTITY_REL,
        detail: format!("max rel deviation {worst:.2e} (<= {IDENTITY_REL:e}) over 108 cases"),
    }
}

fn sign(x: f64) -> i8 {
    (x > 0.0) as i8 - (x < 0.0) as i8
}

fn c3_threshold() -> Outcome {
    let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 100.0).collect();
    let star = delta_threshold(2, 2.0, 0.25, 1.0);
    let mut mismatches = 0;
    let mut checked = 0;
    for row in monotonicity_profile(2, 2.0, 0.25, 1.0, &grid).unwrap() {
        if (row.delta - 3.0).abs() <= THRESHOLD_BAND {
            continue;
        }
        checked += 1;
        if sign(row.slope) != sign(3.0 - row.delta) {
            mismatches += 1;
        }
    }
    // [(n−1)/(R(p−1))]^{p−1} = 1 for n = p = 2, R = 1
    let mut not_decreasing = 0;
    for beta in [1.0, 2.0, 10.0] {
        for row in monotonicity_profile(2, 2.0, beta, 1.0, &grid).unwrap() {
            if row.slope >= 0.0 {
                not_decreasing += 1;
            }
        }
    }
    Outcome {
        pass: (star - 3.0).abs() < 1e-12 && mismatches == 0 && not_decreasing == 0,
        detail: format!(
            "delta* = {star}; {mismatches}/{checked} sign mismatches outside +-{THRESHOLD_BAND:e}; \
             beta in {{1, 2, 10}}: {not_decreasing}/3000 non-negative slopes on (0, 10]"
        ),
    }
}

fn c4_fem_oracle() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        for beta in [0.25, 1.0, 4.0] {
            let start = Instant::now();
            let exact = solve_radial(2, p, beta, 1.0, 1.0).unwrap().functional_value();
            let mut errs = Vec::new();
            let mut converged = true;
            for &(l, m) in &FEM_LEVELS {
                // the disk is refined along with the mesh
                let d = ConvexPolygon::regular(m, 1.0).unwrap();
                let mesh = build_layered_mesh(&d, 1.0, l, m).unwrap();
                let sol = solve_fem(&mesh, p, beta, &SolverOptions::default()).unwrap();
                converged &= sol.converged();
                errs.push((sol.energy_i() - exact) / exact);
            }
            let secs = start.elapsed().as_secs_f64();
            let ok = converged
                && errs[0].abs() < FEM_REL
                && errs[1].abs() < errs[0].abs()
                && errs[2].abs() < errs[1].abs()
                && secs < FEM_SECONDS;
            pass &= ok;
            lines.push(format!(
                "(p={p}, beta={beta}) errs {:+.2e} {:+.2e} {:+.2e} in {secs:.0} s{}",
                errs[0],
                errs[1],
                errs[2],
                if ok { "" } else { " <- fails" }
            ));
        }
    }
    Outcome {
        pass,
        detail: format!(
            "256-gon at L=32, M=256, then (64, 512-gon) and (128, 1024-gon); |err| < {FEM_REL:e}, \
             strictly decreasing, < {FEM_SECONDS} s per case\n    {}",
            lines.join("\n    ")
        ),
    }
}

fn c5_comparison_chain() -> Outcome {
    let mut chain_ok = true;
    let mut square_margin = f64::NAN;
    let mut lines = Vec::new();
    for p in [2.0, 3.0] {
        let i_disk = solve_radial(2, p, 1.0, 1.0, 1.0).unwrap().functional_value();
        for pre in [Preset::Square, Preset::Hexagon, Preset::Rectangle] {
            let poly = pre.polygon(TAU, 256).unwrap();
            let mesh = build_layered_mesh(&poly, 1.0, 32, 256).unwrap();
            let sol = solve_fem(&mesh, p, 1.0, &SolverOptions::default()).unwrap();
            let chain =
                comparison_chain_check(&SteinerPolynomial::from_polygon(&poly), 1.0, p, 1.0, Some(sol.energy_i()))
                    .unwrap();
            let web = chain.bound.total;
            let (fem_slack, web_slack) = (web - sol.energy_i(), i_disk - web);
            chain_ok &= fem_slack >= -CHAIN_SLACK * i_disk && web_slack >= -CHAIN_SLACK * i_disk;
            if pre == Preset::Square && p == 2.0 {
                square_margin = web_slack;
            }
            lines.push(format!(
                "p={p} {pre}: I_fem {:.6}, web {web:.10}, I_disk {i_disk:.10}, web - I_fem {fem_slack:.2e}, \
                 I_disk - web {web_slack:.2e}",
                sol.energy_i()
            ));
        }
    }
    let i_disk = solve_radial(2, 2.0, 1.0, 1.0, 1.0).unwrap().functional_value();
    let strict = square_margin > STRICT_WEB_MARGIN * i_disk;
    Outcome {
        pass: chain_ok && strict,
        detail: format!(
            "chain I_fem <= web <= I_disk within {CHAIN_SLACK:e}*I_disk: {}; strict square web margin \
             {square_margin:.2e} vs required {:.2e}: {}\n    {}",
            if chain_ok { "holds" } else { "VIOLATED" },
            STRICT_WEB_MARGIN * i_disk,
            if strict {
                "met"
            } else {
                "NOT MET (P(D + sB) = P(D) + 2 pi s for every planar convex D, so the bound equals I_disk)"
            },
            lines.join("\n    ")
        ),
    }
}

fn c6_ball_equality() -> Outcome {
    let mut worst = 0.0f64;
    for (n, p, beta, delta) in radial_sweep() {
        let ball = SteinerPolynomial::ball(n, 1.0).unwrap();
        let profile = WebProfile::build(&ball, beta, p, delta).unwrap();
        let bound = web_upper_bound(&ball, &profile).unwrap();
        let exact = solve_radial(n, p, beta, 1.0, delta).unwrap().functional_value();
        worst = worst.max(rel(bound.total, exact));
    }
    Outcome {
        pass: worst <= BALL_EQUALITY,
        detail: format!("max |web - I(D*)|/I(D*) = {worst:.2e} (<= {BALL_EQUALITY:e}) over 108 cases"),
    }
}

fn c7_counterintuitive() -> Outcome {
    let opts = SolverOptions::default();
    let baseline = PI / 2.0;
    let disk = OuterDomain::Disk(Disk::new(1.05).unwrap());
    let square = OuterDomain::rounded_square(1.0, PI + 0.05).unwrap();
    let d = counterintuitive_experiment(1.0, 0.25, 2.0, &disk, 16, 512, &opts).unwrap();
    let s = counterintuitive_experiment(1.0, 0.25, 2.0, &square, 16, 512, &opts).unwrap();
    let radial_gap = solve_radial(2, 2.0, 0.25, 1.0, 0.05).unwrap().functional_value() - baseline;
    let pass = d.in_regime && d.gap >= GAP_MARGIN && s.gap >= GAP_MARGIN && (d.gap - radial_gap).abs() < 0.1 * radial_gap;
    Outcome {
        pass,
        detail: format!(
            "beta P(B_1) = {baseline:.6}; disk 1.05: gap {:.4e} (closed form {radial_gap:.4e}); \
             rounded square of area pi + 0.05: gap {:.4e}; both >= {GAP_MARGIN:e}",
            d.gap, s.gap
        ),
    }
}

/// Shoelace area and perimeter straight from the vertex list.
fn polygon_measures(v: &[Point2]) -> (f64, f64) {
    let m = v.len();
    let (mut a, mut per) = (0.0, 0.0);
    for i in 0..m {
        let (p, q) = (v[i], v[(i + 1) % m]);
        a += 0.5 * (p.x * q.y - q.x * p.y);
        per += ((q.x - p.x).powi(2) + (q.y - p.y).powi(2)).sqrt();
    }
    (a, per)
}

fn c8_steiner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst, mut dominated) = (0.0f64, 0);
    for _ in 0..100 {
        let poly = random_polygon(&mut rng, 12, TAU).unwrap();
        let (a, per) = polygon_measures(poly.vertices());
        for delta in [0.1, 0.5, 1.0, 2.0] {
            let body = RoundedBody::new(poly.clone(), delta).unwrap();
            worst = worst
                .max(rel(body.area(), a + per * delta + PI * delta * delta))
                .max(rel(body.perimeter(), per + TAU * delta));
        }
        dominated += SteinerPolynomial::from_polygon(&poly).quermass_domination().holds as usize;
    }
    Outcome {
        pass: worst < STEINER_REL && dominated == 100,
        detail: format!(
            "100 polygons (seed {SEED}), delta in {{0.1, 0.5, 1, 2}}: max rel err {worst:.2e} (< {STEINER_REL:e}); \
             domination {dominated}/100"
        ),
    }
}

fn c9_lemma() -> Outcome {
    let c = lemma_cost_constant(2, 1.0, PI).unwrap();
    let expected = 2.0 * (2f64.sqrt() - 1.0);
    let const_err = (c - expected).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut holds, mut min_margin) = (0, f64::INFINITY);
    for _ in 0..50 {
        let omega = random_container(&mut rng, 1.0, PI).unwrap();
        let report = lemma_cost_check(1.0, &omega, PI).unwrap();
        let (a, per) = polygon_measures(omega.vertices());
        let own = (per - TAU) - expected * (a - PI);
        holds += (report.holds && own >= 0.0) as usize;
        min_margin = min_margin.min(own);
    }
    Outcome {
        pass: const_err <= LEMMA_CONSTANT_TOL && holds == 50,
        detail: format!(
            "C(2, 1, pi) = {c:.15} (err {const_err:.1e} <= {LEMMA_CONSTANT_TOL:e}); \
             holds on {holds}/50 seeded containers, min dP - C dV = {min_margin:.3e}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("radial closed form vs shooting and quadrature", c1_radial_oracles),
        ("flux identity n w_n g1 = beta u_m^(p-1) P", c2_boundary_identity),
        ("threshold delta* and sign of dI/ddelta", c3_threshold),
        ("finite elements vs closed form under refinement", c4_fem_oracle),
        ("I_fem <= web bound <= I(disk) at perimeter 2 pi", c5_comparison_chain),
        ("web bound equals I(D*) on balls", c6_ball_equality),
        ("small-beta insulation gain", c7_counterintuitive),
        ("Steiner identities on random polygons", c8_steiner),
        ("isoperimetric cost lemma", c9_lemma),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        failed += !out.pass as usize;
        println!(
            "criterion {} {} {name}: {}",
            k + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    println!("{} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
