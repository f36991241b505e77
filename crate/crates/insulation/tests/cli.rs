use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_insulation"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// CSV body as header plus rows of cells.
fn table(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(out);
    let mut lines = text.lines();
    let head = lines.next().expect("header").split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (head, rows)
}

fn column(out: &Output, name: &str) -> Vec<f64> {
    let (head, rows) = table(out);
    let k = head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn json(out: &Output) -> Vec<Value> {
    serde_json::from_slice::<Value>(&out.stdout).unwrap().as_array().unwrap().clone()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn radial_unit_annulus() {
    let out = run(&["radial", "--n", "2", "--p", "2", "--beta", "1", "--R", "1", "--delta", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (head, _) = table(&out);
    assert_eq!(head, ["n", "p", "beta", "R", "delta", "gamma1", "u_m", "I"]);
    // linear Robin problem on the annulus 1 < r < 2: u = 1 - g ln r, g = 1/(1/2 + ln 2)
    let g = 1.0 / (0.5 + 2f64.ln());
    assert!((column(&out, "I")[0] - TAU * g).abs() < 1e-12);
    assert!((column(&out, "u_m")[0] - (1.0 - g * 2f64.ln())).abs() < 1e-12);
}

#[test]
fn radial_grids_and_zero_thickness() {
    let out = run(&["radial", "--beta", "0.5,2", "--R", "1.5", "--delta", "0,1"]);
    assert_eq!(code(&out), 0);
    let i = column(&out, "I");
    assert_eq!(i.len(), 4);
    assert!((i[0] - TAU * 0.5 * 1.5).abs() < 1e-13);
    assert!((i[2] - TAU * 2.0 * 1.5).abs() < 1e-13);
}

#[test]
fn radial_rejects_bad_input() {
    for args in [
        &["radial", "--p", "0.5"][..],
        &["radial", "--beta", "-1"],
        &["radial", "--delta", "2,1"],
        &["radial", "--R", "0"],
        &["radial", "--bogus"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn csv_carries_seventeen_digits() {
    let out = run(&["radial", "--p", "3", "--beta", "0.1"]);
    let (_, rows) = table(&out);
    for cell in &rows[0][1..] {
        let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{cell}");
    }
}

#[test]
fn sweep_delta_threshold() {
    let out = run(&["sweep-delta", "--beta", "0.25", "--delta", "1,2,3,4,5", "--test"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(column(&out, "sign"), [1.0, 1.0, 0.0, -1.0, -1.0]);
    assert!(stderr(&out).contains("delta* = 3"));
    let big = run(&["sweep-delta", "--beta", "10", "--test"]);
    assert_eq!(code(&big), 0);
    let signs = column(&big, "sign");
    assert_eq!(signs.len(), 200);
    assert!(signs.iter().all(|&s| s == -1.0));
}

#[test]
fn web_bound_disk_is_exact() {
    let out = run(&["web-bound", "--ball", "1.3", "--p", "3", "--beta", "0.5", "--delta", "0.7", "--test"]);
    assert_eq!(code(&out), 0);
    let (total, star) = (column(&out, "total")[0], column(&out, "I_star")[0]);
    assert!((total - star).abs() <= 1e-10 * star);
}

#[test]
fn web_bound_square_with_fem_chain() {
    let out = run(&[
        "web-bound", "--square", "1", "--fem", "--rings", "8", "--per-ring", "64", "--test", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rec = &json(&out)[0];
    assert!((rec["R_star"].as_f64().unwrap() - 2.0 / PI).abs() < 1e-15);
    let (fem, total, star) = (
        rec["fem_I"].as_f64().unwrap(),
        rec["total"].as_f64().unwrap(),
        rec["I_star"].as_f64().unwrap(),
    );
    assert!(fem <= total + 1e-3 * star);
    assert!(total <= star * (1.0 + 1e-9));
    assert_eq!(rec["chain_holds"], Value::Bool(true));
}

#[test]
fn web_bound_cube_from_steiner_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = format!("{{\"n\": 3, \"W\": [1, 2, {PI}, {}]}}", 4.0 * PI / 3.0);
    let path = write(dir.path(), "cube.json", &w);
    let out = run(&["web-bound", "--steiner", &path, "--test"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(column(&out, "margin")[0] > 1e-3);
    // inflated W_1 breaks the Alexandrov-Fenchel chain
    let bad = write(dir.path(), "bad.json", r#"{"n": 2, "W": [10, 1, 3.141592653589793]}"#);
    assert_eq!(code(&run(&["web-bound", "--steiner", &bad])), 2);
}

#[test]
fn fem_export_import_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.txt");
    let sol = dir.path().join("sol.txt");
    let (mesh, sol) = (mesh.to_str().unwrap(), sol.to_str().unwrap());
    let first = run(&[
        "fem", "--preset", "hexagon", "--p", "3", "--rings", "6", "--per-ring", "48", "--export-mesh", mesh,
        "--export-solution", sol, "--test",
    ]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let again = run(&["fem", "--import-mesh", mesh, "--p", "3", "--test"]);
    assert_eq!(code(&again), 0, "{}", stderr(&again));
    let pick = |o: &Output| {
        let (head, rows) = table(o);
        let k = head.iter().position(|h| h == "energy_I").unwrap();
        rows[0][k].clone()
    };
    assert_eq!(pick(&first), pick(&again));
    let text = fs::read_to_string(sol).unwrap();
    let n: usize = text.lines().next().unwrap().parse().unwrap();
    assert_eq!(n, 7 * 48);
    let values: Vec<f64> = text.lines().rev().take(n).map(|l| l.parse().unwrap()).collect();
    assert!(values.iter().all(|&u| u > 0.0 && u <= 1.0 + 1e-12));
}

#[test]
fn fem_refinement_table() {
    let out = run(&["fem", "--ball", "1", "--rings", "4", "--per-ring", "32", "--refine", "3", "--test"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let err: Vec<f64> = column(&out, "rel_error").iter().map(|e| e.abs()).collect();
    let h = column(&out, "h");
    assert_eq!(err.len(), 3);
    assert!(err[0] > err[1] && err[1] > err[2]);
    assert!(h[0] > h[1] && h[1] > h[2]);
    assert_eq!(column(&out, "M"), [32.0, 64.0, 128.0]);
}

#[test]
fn fem_rejects_coarse_ring() {
    let out = run(&["fem", "--preset", "hexagon", "--per-ring", "4"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_shapes_ranks_below_disk() {
    let out = run(&[
        "compare-shapes", "--preset", "square,hexagon,rectangle", "--rings", "8", "--per-ring", "96",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (i_fem, i_disk) = (column(&out, "I_fem"), column(&out, "I_disk"));
    let web = column(&out, "web_bound");
    for k in 0..3 {
        assert!(i_fem[k] < i_disk[k]);
        assert!(web[k] <= i_disk[k] * (1.0 + 1e-9));
    }
    // rank 1 has the largest value
    let rank = column(&out, "rank");
    for a in 0..3 {
        for b in 0..3 {
            if i_fem[a] > i_fem[b] {
                assert!(rank[a] < rank[b]);
            }
        }
    }
}

#[test]
fn compare_shapes_disk_and_bad_input() {
    let out = run(&["compare-shapes", "--preset", "disk", "--rings", "8", "--per-ring", "128"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let i_disk = column(&out, "I_disk")[0];
    assert!(column(&out, "web_margin")[0].abs() < 1e-9 * i_disk);
    assert!(column(&out, "fem_margin")[0].abs() < 2e-2 * i_disk);

    let dir = tempfile::tempdir().unwrap();
    let dart = write(dir.path(), "dart.txt", "0 0\n2 -1\n1 0\n2 1\n");
    let bad = run(&["compare-shapes", "--shape", &dart]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("convex"));
    assert_eq!(code(&run(&["compare-shapes"])), 2);
}

#[test]
fn steiner_check_is_seeded() {
    let a = run(&["steiner-check", "--seed", "11", "--test"]);
    let b = run(&["steiner-check", "--seed", "11", "--test"]);
    let c = run(&["steiner-check", "--seed", "12", "--test"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let err = column(&a, "max_rel_error");
    assert_eq!(err.len(), 100);
    assert!(err.iter().all(|&e| e < 1e-12));
}

#[test]
fn steiner_check_notes_merged_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sq.txt", "# square with a midpoint\n0 0\n0.5 0\n1 0\n1 1\n0 1\n");
    let out = run(&["steiner-check", "--count", "0", "--shape", &path, "--test"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("merged 1"));
    assert_eq!(column(&out, "vertices"), [4.0]);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"p": [2, 3], "beta": 0.5, "format": "json"}"#);
    let out = run(&["radial", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let recs = json(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1]["p"], 3.0);
    assert_eq!(recs[0]["beta"], 0.5);

    let out = run(&["radial", "--config", &cfg, "--beta", "2", "--format", "csv"]);
    assert_eq!(column(&out, "beta"), [2.0, 2.0]);

    let typo = write(dir.path(), "t.json", r#"{"bta": 1}"#);
    assert_eq!(code(&run(&["radial", "--config", &typo])), 2);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&["radial", "--p", "1.5,4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let plain = run(&["radial", "--p", "1.5,4"]);
    assert_eq!(fs::read(&path).unwrap(), plain.stdout);
}

#[test]
fn violation_exit_code() {
    // a property failure is only fatal under --test, here set from the config
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"test": true}"#);
    let out = run(&["fem", "--ball", "1", "--rings", "2", "--per-ring", "16", "--max-iter", "1", "--p", "3", "--config", &cfg]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("did not converge"));
    let lax = run(&["fem", "--ball", "1", "--rings", "2", "--per-ring", "16", "--max-iter", "1", "--p", "3"]);
    assert_eq!(code(&lax), 0);
}
