//! Subcommand drivers. Each returns a [`Report`]; printing and exit codes are
//! decided by [`execute`].

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, ensure, Context, Result};
use insulation_core::fem::{
    build_layered_mesh, solve_fem, FemSolution, Iteration, LayeredMesh, SolverOptions,
};
use insulation_core::radial::monotonicity_profile;
use insulation_core::web::comparison_chain_check;
use insulation_core::{
    delta_threshold, solve_radial, ConvexPolygon, RoundedBody, SteinerPolynomial,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::*;
use crate::config;
use crate::formats;
use crate::output::{write_records, Format, Record};
use crate::shapes::{random_polygon, Preset};

pub const DEFAULT_RINGS: usize = 32;
pub const DEFAULT_PER_RING: usize = 256;
/// Relative slack allowed between a finite-element value and the disk value.
pub const COMPARE_TOL: f64 = 1e-3;
/// Tolerance on the relative Steiner error of a rounded polygon.
pub const STEINER_TOL: f64 = 1e-12;

#[derive(Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
    /// Property violations; fatal under `--test`.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    /// Violations are fatal even without `--test`.
    pub enforce: bool,
}

/// Flags merged over the config file, after rejecting keys neither the
/// common nor the subcommand flags know about.
fn settings<T>(flags: &T, file: &Map<String, Value>) -> Result<T>
where
    T: Serialize + DeserializeOwned + Default,
{
    let mut known = config::keys_of::<Common>();
    known.extend(config::keys_of::<T>());
    config::reject_unknown(file, &known)?;
    config::merge(flags, file)
}

/// Runs the command and returns the process exit code: 0 success, 1 property
/// violation, 2 invalid input or runtime error.
pub fn execute(cli: Cli) -> u8 {
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.common.config {
        Some(path) => config::load(path)?,
        None => Map::new(),
    };
    let common: Common = config::merge(&cli.common, &file)?;
    let report = match &cli.command {
        Command::Radial(a) => radial(&settings(a, &file)?)?,
        Command::SweepDelta(a) => sweep_delta(&settings(a, &file)?)?,
        Command::WebBound(a) => web_bound(&settings(a, &file)?)?,
        Command::Fem(a) => fem(&settings(a, &file)?)?,
        Command::CompareShapes(a) => compare_shapes(&settings(a, &file)?)?,
        Command::SteinerCheck(a) => steiner_check(&settings(a, &file)?, common.seed.unwrap_or(1))?,
    };

    let format = common.format.unwrap_or(Format::Csv);
    match &common.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            write_records(&mut w, format, &report.records)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_records(&mut w, format, &report.records)?;
            w.flush()?;
        }
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(if !report.violations.is_empty() && (common.test || report.enforce) {
        1
    } else {
        0
    })
}

fn grid<T: Copy + PartialOrd>(name: &str, values: &Option<Vec<T>>, default: T) -> Result<Vec<T>> {
    let v = values.clone().unwrap_or_else(|| vec![default]);
    ensure!(!v.is_empty(), "grid `{name}` is empty");
    ensure!(v.windows(2).all(|w| w[0] <= w[1]), "grid `{name}` must be sorted");
    Ok(v)
}

pub fn radial(a: &RadialArgs) -> Result<Report> {
    let ns = grid("n", &a.n, 2)?;
    let ps = grid("p", &a.p, 2.0)?;
    let betas = grid("beta", &a.beta, 1.0)?;
    let rs = grid("R", &a.radius, 1.0)?;
    let deltas = grid("delta", &a.delta, 1.0)?;
    let mut report = Report::default();
    for &n in &ns {
        for &p in &ps {
            for &beta in &betas {
                for &r in &rs {
                    for &delta in &deltas {
                        let s = solve_radial(n, p, beta, r, delta)?;
                        report.records.push(
                            Record::new()
                                .with("n", n)
                                .with("p", p)
                                .with("beta", beta)
                                .with("R", r)
                                .with("delta", delta)
                                .with("gamma1", s.gamma1())
                                .with("u_m", s.min_value())
                                .with("I", s.functional_value()),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

pub fn sweep_delta(a: &SweepArgs) -> Result<Report> {
    let (n, p, beta, r) = (a.n.unwrap_or(2), a.p.unwrap_or(2.0), a.beta.unwrap_or(0.25), a.radius.unwrap_or(1.0));
    let deltas = match &a.delta {
        Some(d) => d.clone(),
        None => {
            let max = a.delta_max.unwrap_or(10.0);
            let steps = a.steps.unwrap_or(200);
            ensure!(max > 0.0 && steps > 0, "delta-max and steps must be positive");
            (1..=steps).map(|i| max * i as f64 / steps as f64).collect()
        }
    };
    let rows = monotonicity_profile(n, p, beta, r, &deltas)?;
    let star = delta_threshold(n, p, beta, r);
    let mut report = Report::default();
    report.notes.push(format!("delta* = {star}"));
    for row in rows {
        if row.sign != row.expected_sign {
            report.violations.push(format!(
                "dI/ddelta has sign {} at delta = {}, expected {}",
                row.sign, row.delta, row.expected_sign
            ));
        }
        report.records.push(
            Record::new()
                .with("delta", row.delta)
                .with("I", row.value)
                .with("slope", row.slope)
                .with("sign", row.sign)
                .with("expected_sign", row.expected_sign)
                .with("delta_star", star),
        );
    }
    Ok(report)
}

/// A planar shape resolved from the flags, or a Steiner polynomial for
/// bodies that exist only through their quermassintegrals.
enum Body {
    Polygon(ConvexPolygon),
    Ball { n: usize, radius: f64 },
    Steiner(SteinerPolynomial),
}

impl Body {
    fn steiner(&self) -> Result<SteinerPolynomial> {
        Ok(match self {
            Body::Polygon(p) => SteinerPolynomial::from_polygon(p),
            Body::Ball { n, radius } => SteinerPolynomial::ball(*n, *radius)?,
            Body::Steiner(s) => s.clone(),
        })
    }

    /// Polygon used by the finite-element mesh. A disk becomes the inscribed
    /// regular polygon with one vertex per ring node.
    fn mesh_polygon(&self, per_ring: usize) -> Result<ConvexPolygon> {
        match self {
            Body::Polygon(p) => Ok(p.clone()),
            Body::Ball { n: 2, radius } => Ok(ConvexPolygon::regular(per_ring, *radius)?),
            _ => bail!("the finite-element solver is planar; it needs a polygon or a disk"),
        }
    }
}

fn count_sources(flags: &[bool]) -> usize {
    flags.iter().filter(|&&b| b).count()
}

fn polygon_source(src: &ShapeSource, disk_sides: usize) -> Result<Option<ConvexPolygon>> {
    Ok(match (&src.shape, src.preset) {
        (Some(path), _) => {
            let p = formats::read_polygon(path)?;
            Some(match src.perimeter {
                Some(per) => p.with_perimeter(per)?,
                None => p,
            })
        }
        (None, Some(pre)) => Some(pre.polygon(src.perimeter.unwrap_or(TAU), disk_sides)?),
        (None, None) => None,
    })
}

fn solver_options(s: &SolverArgs) -> SolverOptions {
    let d = SolverOptions::default();
    SolverOptions {
        tol: s.tol.unwrap_or(d.tol),
        max_iter: s.max_iter.unwrap_or(d.max_iter),
        eps_reg: s.eps_reg.or(d.eps_reg),
        iteration: match s.iteration.unwrap_or_default() {
            IterationArg::Reweighted => Iteration::Reweighted,
            IterationArg::Newton => Iteration::Newton,
        },
    }
}

fn resolution(r: &Resolution) -> (usize, usize) {
    (r.rings.unwrap_or(DEFAULT_RINGS), r.per_ring.unwrap_or(DEFAULT_PER_RING))
}

pub fn web_bound(a: &WebArgs) -> Result<Report> {
    let src = &a.source;
    let chosen = count_sources(&[
        src.shape.is_some(),
        src.preset.is_some(),
        src.ball.is_some(),
        a.steiner.is_some(),
        a.square.is_some(),
    ]);
    ensure!(chosen <= 1, "give at most one of --shape, --preset, --ball, --steiner, --square");
    let (rings, per_ring) = resolution(&a.resolution);
    let body = if let Some(p) = polygon_source(src, per_ring)? {
        Body::Polygon(p)
    } else if let Some(side) = a.square {
        Body::Polygon(ConvexPolygon::square(side)?)
    } else if let Some(path) = &a.steiner {
        Body::Steiner(formats::read_steiner(path)?)
    } else {
        Body::Ball {
            n: a.n.unwrap_or(2),
            radius: src.ball.unwrap_or(1.0),
        }
    };
    let (p, beta, delta) = (
        a.physics.p.unwrap_or(2.0),
        a.physics.beta.unwrap_or(1.0),
        a.physics.delta.unwrap_or(1.0),
    );
    let steiner = body.steiner()?;
    let fem_value = if a.fem {
        let poly = body.mesh_polygon(per_ring)?;
        let mesh = build_layered_mesh(&poly, delta, rings, per_ring)?;
        Some(solve_fem(&mesh, p, beta, &SolverOptions::default())?.energy_i())
    } else {
        None
    };
    let chain = comparison_chain_check(&steiner, beta, p, delta, fem_value)?;
    let b = chain.bound;
    let mut report = Report::default();
    if !chain.web_below_ball {
        report.violations.push(format!("web bound {} exceeds I(D*) = {}", b.total, b.i_star));
    }
    if chain.fem_below_web == Some(false) {
        report.violations.push(format!(
            "finite-element value {} exceeds the web bound {}",
            fem_value.unwrap_or(f64::NAN),
            b.total
        ));
    }
    report.records.push(
        Record::new()
            .with("n", steiner.dimension())
            .with("p", p)
            .with("beta", beta)
            .with("delta", delta)
            .with("R_star", b.r_star)
            .with("I_star", b.i_star)
            .with("energy_term", b.energy_term)
            .with("boundary_term", b.boundary_term)
            .with("total", b.total)
            .with("margin", b.margin)
            .with("quadrature_error", b.quadrature_error)
            .with("fem_I", fem_value)
            .with("chain_holds", chain.holds()),
    );
    Ok(report)
}

fn solution_record(level: usize, mesh: &LayeredMesh, sol: &FemSolution, reference: Option<f64>) -> Record {
    let (rings, per_ring) = mesh.layers().map_or((None, None), |(l, m)| (Some(l), Some(m)));
    let gap = (sol.energy_i() - sol.boundary_i()).abs() / sol.energy_i().abs().max(f64::MIN_POSITIVE);
    Record::new()
        .with("level", level)
        .with("L", rings)
        .with("M", per_ring)
        .with("nodes", mesh.node_count())
        .with("triangles", mesh.triangle_count())
        .with("h", mesh.max_edge())
        .with("energy_I", sol.energy_i())
        .with("boundary_I", sol.boundary_i())
        .with("gap", gap)
        .with("iterations", sol.iterations())
        .with("converged", sol.converged())
        .with("u_min", sol.min_value())
        .with("u_max", sol.max_value())
        .with("reference", reference)
        .with("rel_error", reference.map(|r| (sol.energy_i() - r) / r))
}

fn check_solution(sol: &FemSolution, label: &str, report: &mut Report) {
    if !sol.converged() {
        report.violations.push(format!("{label}: solver did not converge"));
    }
    if !(sol.min_value() > 0.0 && sol.max_value() <= 1.0 + 1e-12) {
        report.violations.push(format!(
            "{label}: nodal values [{}, {}] leave (0, 1]",
            sol.min_value(),
            sol.max_value()
        ));
    }
}

pub fn fem(a: &FemArgs) -> Result<Report> {
    let src = &a.source;
    let chosen = count_sources(&[src.shape.is_some(), src.preset.is_some(), src.ball.is_some(), a.import_mesh.is_some()]);
    ensure!(chosen <= 1, "give at most one of --shape, --preset, --ball, --import-mesh");
    let (p, beta, delta) = (
        a.physics.p.unwrap_or(2.0),
        a.physics.beta.unwrap_or(1.0),
        a.physics.delta.unwrap_or(1.0),
    );
    let opts = solver_options(&a.solver);
    let (rings, per_ring) = resolution(&a.resolution);
    let levels = a.refine.unwrap_or(1);
    ensure!(levels >= 1, "--refine needs at least one level");
    let mut report = Report::default();
    let mut last: Option<FemSolution> = None;

    if let Some(path) = &a.import_mesh {
        ensure!(levels == 1, "--refine does not apply to an imported mesh");
        let mesh = formats::read_mesh(path)?;
        let sol = solve_fem(&mesh, p, beta, &opts)?;
        check_solution(&sol, "imported mesh", &mut report);
        report.records.push(solution_record(0, &mesh, &sol, None));
        last = Some(sol);
    } else {
        let poly = polygon_source(src, per_ring)?;
        let ball = if poly.is_none() { Some(src.ball.unwrap_or(1.0)) } else { None };
        let reference = match ball {
            Some(r) => Some(solve_radial(2, p, beta, r, delta)?.functional_value()),
            None => None,
        };
        let mut prev_err: Option<f64> = None;
        for level in 0..levels {
            let (l, m) = (rings << level, per_ring << level);
            // a disk is refined together with the mesh
            let d = match (&poly, ball) {
                (Some(d), _) => d.clone(),
                (None, Some(r)) => ConvexPolygon::regular(m, r)?,
                (None, None) => unreachable!(),
            };
            let mesh = build_layered_mesh(&d, delta, l, m)?;
            let sol = solve_fem(&mesh, p, beta, &opts)?;
            check_solution(&sol, &format!("level {level}"), &mut report);
            if let Some(r) = reference {
                let err = ((sol.energy_i() - r) / r).abs();
                if let Some(pe) = prev_err {
                    if err >= pe {
                        report
                            .violations
                            .push(format!("level {level}: error {err:e} did not decrease from {pe:e}"));
                    }
                }
                prev_err = Some(err);
            }
            report.records.push(solution_record(level, &mesh, &sol, reference));
            last = Some(sol);
        }
    }

    let sol = last.expect("at least one level ran");
    if let Some(path) = &a.export_mesh {
        formats::write_file(path, &formats::format_mesh(sol.mesh()))?;
    }
    if let Some(path) = &a.export_solution {
        formats::write_file(path, &formats::format_solution(&sol))?;
    }
    Ok(report)
}

pub fn compare_shapes(a: &CompareArgs) -> Result<Report> {
    let perimeter = a.perimeter.unwrap_or(TAU);
    let (p, beta, delta) = (
        a.physics.p.unwrap_or(2.0),
        a.physics.beta.unwrap_or(1.0),
        a.physics.delta.unwrap_or(1.0),
    );
    let (rings, per_ring) = resolution(&a.resolution);
    let opts = solver_options(&a.solver);

    let mut shapes: Vec<(String, ConvexPolygon)> = Vec::new();
    for path in a.shapes.iter().flatten() {
        let poly = formats::read_polygon(path)?.with_perimeter(perimeter)?;
        shapes.push((path.display().to_string(), poly));
    }
    for &pre in a.presets.iter().flatten() {
        shapes.push((pre.to_string(), Preset::polygon(pre, perimeter, per_ring)?));
    }
    ensure!(!shapes.is_empty(), "no shapes given; use --shape or --preset");

    let i_disk = solve_radial(2, p, beta, perimeter / TAU, delta)?.functional_value();
    let mut report = Report {
        enforce: true,
        ..Report::default()
    };
    let mut rows = Vec::with_capacity(shapes.len());
    for (name, poly) in &shapes {
        let mesh = build_layered_mesh(poly, delta, rings, per_ring)?;
        let sol = solve_fem(&mesh, p, beta, &opts)?;
        check_solution(&sol, name, &mut report);
        let chain = comparison_chain_check(&SteinerPolynomial::from_polygon(poly), beta, p, delta, Some(sol.energy_i()))?;
        if sol.energy_i() > i_disk + COMPARE_TOL * i_disk {
            report
                .violations
                .push(format!("{name}: I = {} exceeds the disk value {i_disk}", sol.energy_i()));
        }
        if !chain.holds() {
            report.violations.push(format!("{name}: comparison chain fails"));
        }
        rows.push((name.clone(), poly.perimeter(), poly.area(), sol.energy_i(), chain.bound.total));
    }
    // rank 1 loses the most heat
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| rows[j].3.total_cmp(&rows[i].3));
    let mut rank = vec![0; rows.len()];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k + 1;
    }
    for (i, (name, per, area, i_fem, web)) in rows.into_iter().enumerate() {
        report.records.push(
            Record::new()
                .with("shape", name)
                .with("P", per)
                .with("A", area)
                .with("I_fem", i_fem)
                .with("web_bound", web)
                .with("I_disk", i_disk)
                .with("fem_margin", i_disk - i_fem)
                .with("web_margin", i_disk - web)
                .with("rank", rank[i]),
        );
    }
    Ok(report)
}

/// Largest relative deviation between the exact rounded body and the Steiner
/// polynomials over the offsets.
fn steiner_error(poly: &ConvexPolygon, deltas: &[f64]) -> Result<f64> {
    let s = SteinerPolynomial::from_polygon(poly);
    let mut worst: f64 = 0.0;
    for &d in deltas {
        let body = RoundedBody::new(poly.clone(), d)?;
        let (a, per) = (s.volume_at(d)?, s.perimeter_at(d)?);
        worst = worst
            .max((body.area() - a).abs() / a)
            .max((body.perimeter() - per).abs() / per);
    }
    Ok(worst)
}

pub fn steiner_check(a: &SteinerArgs, seed: u64) -> Result<Report> {
    let count = a.count.unwrap_or(100);
    let deltas = a.deltas.clone().unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0]);
    ensure!(deltas.iter().all(|&d| d >= 0.0), "offsets must be non-negative");
    let perimeter = a.perimeter.unwrap_or(TAU);
    let max_points = a.max_points.unwrap_or(12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();

    let mut polys: Vec<(String, ConvexPolygon)> = Vec::new();
    if let Some(path) = &a.shape {
        let poly = formats::read_polygon(path)?;
        if poly.merged_vertices() > 0 {
            report.notes.push(format!(
                "{}: merged {} collinear or repeated vertices",
                path.display(),
                poly.merged_vertices()
            ));
        }
        polys.push((path.display().to_string(), poly));
    }
    for i in 0..count {
        polys.push((format!("random-{i}"), random_polygon(&mut rng, max_points, perimeter)?));
    }
    for (name, poly) in polys {
        let err = steiner_error(&poly, &deltas)?;
        let dom = SteinerPolynomial::from_polygon(&poly).quermass_domination();
        if err >= STEINER_TOL {
            report.violations.push(format!("{name}: Steiner error {err:e}"));
        }
        if !dom.holds {
            report.violations.push(format!("{name}: quermassintegral domination fails"));
        }
        report.records.push(
            Record::new()
                .with("shape", name)
                .with("vertices", poly.len())
                .with("perimeter", poly.perimeter())
                .with("area", poly.area())
                .with("max_rel_error", err)
                .with("domination", dom.holds)
                .with("area_margin", dom.margins[0]),
        );
    }
    Ok(report)
}
