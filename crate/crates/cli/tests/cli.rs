use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::{Command, Output};

use cousinlab::io::read_obj;
use serde_json::Value;

fn cousinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cousinlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "report is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn gen_unduloid_quarter_turn() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("mesh.obj");
    let csv = dir.path().join("profile.csv");
    let out = cousinlab(&[
        "gen-unduloid",
        "--necksize",
        "1.5707963",
        "--out",
        path_str(&obj),
        "--profile-csv",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], Value::Bool(true));
    let neck = r["result"]["necksize"].as_f64().unwrap();
    assert!((neck - FRAC_PI_2).abs() < 1e-3);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["tolerance"].as_f64().unwrap() > 0.0);
    }

    let mesh = read_obj(std::io::BufReader::new(std::fs::File::open(&obj).unwrap())).unwrap();
    assert_eq!(mesh.vertices.len(), 801 * 201);
    assert_eq!(mesh.faces.len(), 2 * 800 * 200);
    // The axis is i; every face normal points the same way relative to the
    // radial direction.
    let mut outward = 0usize;
    for f in &mesh.faces {
        let [a, b, c] = f.map(|k| mesh.vertices[k]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        if n[1] * a[1] + n[2] * a[2] > 0.0 {
            outward += 1;
        }
    }
    assert!(outward == 0 || outward == mesh.faces.len(), "{outward} of {}", mesh.faces.len());

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,r,z,phi,force"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row.len(), 5);
}

#[test]
fn classify_generated_cousin() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("cousin.grid");
    let triple = dir.path().join("triple.json");
    let n = 1.2;
    let out = cousinlab(&[
        "gen-unduloid",
        "--necksize",
        "1.2",
        "--cousin-out",
        path_str(&grid),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cousinlab(&["classify", "--in", path_str(&grid), "--out", path_str(&triple)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["points"].as_array().unwrap().len(), 2);
    assert!((r["result"]["distance"].as_f64().unwrap() - n).abs() < 1e-4);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&triple).unwrap()).unwrap();
    assert_eq!(saved, r["result"]);
}

#[test]
fn cousin_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = dir.path().join("helicoid.grid");
    let r3 = dir.path().join("unduloid.grid");
    let out = cousinlab(&["gen-helicoid", "--necksize", "2.0", "--nx", "201", "--ny", "101", "--out", path_str(&s3)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cousinlab(&["cousin", "--in", path_str(&s3), "--out", path_str(&r3)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let back = cousinlab(&["cousin", "--in", path_str(&r3), "--order", "column-first"]);
    assert_eq!(back.status.code(), Some(0), "{}", String::from_utf8_lossy(&back.stderr));
    assert!(report(&back)["result"]["isometry_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn inadmissible_necksizes_exit_one() {
    let out = cousinlab(&["necksizes", "--values", "3.1416,3.1416,0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["admissible"], Value::Bool(false));
    let pi = format!("{PI},{PI},0.1");
    let out = cousinlab(&["necksizes", "--values", &pi]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn figure_triple_is_equatorial() {
    let v = format!("{},{},{}", FRAC_PI_2, 2.0 * PI / 3.0, 5.0 * PI / 6.0);
    let out = cousinlab(&["necksizes", "--values", &v]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["margin"].as_f64(), Some(0.0));
    assert!(r["result"]["triple"]["canonical"]["latitude"].as_f64().unwrap().abs() < 1e-10);

    let out = cousinlab(&["necksizes", "--triple", "-0.2,1.0,3.0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["result"]["canonical"]["latitude"].as_f64().unwrap() + 0.2).abs() < 1e-12);
}

#[test]
fn forces_and_devmap() {
    let out = cousinlab(&["forces", "--necksizes", "1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    for a in report(&out)["result"]["angles"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
    }
    let out = cousinlab(&["forces", "--necksizes", "0.1,0.1,3"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("metric.json");
    let out = cousinlab(&[
        "devmap",
        "--triple",
        "0.3,1,4",
        "--depth",
        "3",
        "--query-degree",
        "2,-0.5",
        "--out",
        path_str(&dump),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["cells"], 10);
    assert_eq!(r["result"]["degree"], 9);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(m["gluings"].as_array().unwrap().len(), 9);
    // A query on a slit is rejected.
    let out = cousinlab(&["devmap", "--triple", "0,1,4", "--query-degree", "0.5,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["sweep", "--necksizes", "0.5,3.0,1.0", "--nx", "101", "--ny", "51"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_cousinlab"))
            .args(args)
            .env("COUSINLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    let order: Vec<f64> = r["result"].as_array().unwrap().iter().map(|x| x["necksize"].as_f64().unwrap()).collect();
    assert_eq!(order, vec![0.5, 3.0, 1.0]);
    let bad = Command::new(env!("CARGO_BIN_EXE_cousinlab"))
        .args(args)
        .env("COUSINLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tolerance_overrides() {
    let out = cousinlab(&["--tol", "tau_hopf=1e-300", "gen-unduloid", "--necksize", "1.0", "--nx", "101", "--ny", "51"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let hopf = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "hopf_distance").unwrap();
    assert_eq!(hopf["passed"], Value::Bool(false));
    assert_eq!(cousinlab(&["--tol", "tau_bogus=1", "forces", "--necksizes", "1,1,1"]).status.code(), Some(2));
    assert_eq!(cousinlab(&["--tol", "tau_isom=-1", "forces", "--necksizes", "1,1,1"]).status.code(), Some(2));
    assert_eq!(cousinlab(&["gen-unduloid", "--necksize", "1.0", "--nx", "8"]).status.code(), Some(2));
}
