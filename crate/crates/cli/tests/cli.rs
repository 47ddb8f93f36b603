use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn wolfflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wolfflab")).args(args).output().unwrap()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cells(line: &str) -> Vec<String> {
    line.split(',').map(String::from).collect()
}

const UNIT_BALL_3D: &str = "t,v\n0,1\n4.1887902047863905,0\n";

#[test]
fn riesz_of_unit_ball_at_origin() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "f.csv", UNIT_BALL_3D);
    let params = put(&dir, "p.json", r#"{"alpha": 1.0}"#);
    let pts = put(&dir, "x.csv", "x,y,z\n0,0,0\n");
    let out = stdout(&wolfflab(&[
        "potential", "--op", "riesz", "--params", s(&params), "--input", s(&f), "--dim", "3", "--points", s(&pts),
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x0,x1,x2,value,flags");
    let row = cells(lines[1]);
    let v: f64 = row[3].parse().unwrap();
    assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-2 * v, "{v}");
    assert_eq!(row[4], "finite");
}

#[test]
fn wolff_output_is_byte_identical_and_marks_divergence() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "f.csv", UNIT_BALL_3D);
    let pts = put(&dir, "x.csv", "0,0,0\n0.5,0,0\n2,1,0\n");
    let params = put(&dir, "p.json", r#"{"alpha": 0.5, "psi": {"family": "power", "exponent": 2.0}}"#);
    let args = |out: &Path| {
        wolfflab(&[
            "potential", "--op", "wolff", "--params", s(&params), "--input", s(&f), "--dim", "3", "--points",
            s(&pts), "--out", s(out),
        ])
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(args(&a).status.success());
    assert!(args(&b).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 4);

    let divergent = put(&dir, "q.json", r#"{"alpha": 1.0, "psi": {"family": "power", "exponent": 0.3333333333333333}}"#);
    let out = stdout(&wolfflab(&[
        "potential", "--op", "wolff", "--params", s(&divergent), "--input", s(&f), "--dim", "3", "--points", s(&pts),
    ]));
    for line in out.lines().skip(1) {
        let row = cells(line);
        assert_eq!((row[3].as_str(), row[4].as_str()), ("inf", "infinite"));
    }
}

#[test]
fn malformed_json_reports_position() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "f.csv", UNIT_BALL_3D);
    let pts = put(&dir, "x.csv", "0,0,0\n");
    let params = put(&dir, "p.json", "{\n  \"alpha\": 1.0,\n  \"psi\": \n}\n");
    let o = wolfflab(&[
        "potential", "--op", "wolff", "--params", s(&params), "--input", s(&f), "--dim", "3", "--points", s(&pts),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("column"), "{err}");

    let unknown = put(&dir, "u.json", r#"{"alpha": 1.0, "psi": {"family": "identity"}, "radius": 2}"#);
    let o = wolfflab(&[
        "potential", "--op", "wolff", "--params", s(&unknown), "--input", s(&f), "--dim", "3", "--points", s(&pts),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
}

#[test]
fn missing_file_and_bad_parameters_exit_with_one() {
    let o = wolfflab(&["hardy", "--input", "/nonexistent/phi.csv", "--form", "first", "--p", "0.5", "--q", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let phi = put(&dir, "phi.csv", "t,v\n0,1\n1,0\n");
    let o = wolfflab(&["hardy", "--input", s(&phi), "--form", "first", "--p", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn hardy_witness() {
    let dir = TempDir::new().unwrap();
    let phi = put(&dir, "phi.csv", "t,v\n0,1\n1,0\n");
    let out = stdout(&wolfflab(&["hardy", "--input", s(&phi), "--form", "second", "--p", "1", "--q", "1"]));
    let row = cells(out.lines().nth(1).unwrap());
    let (lhs, rhs): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
    assert!((lhs - 0.5).abs() < 1e-10 && (rhs - 0.5).abs() < 1e-10);
    assert_eq!(row[3], "true");
}

#[test]
fn rearrange_grid_and_norm_request() {
    let dir = TempDir::new().unwrap();
    let grid = put(&dir, "g.csv", "dim,n0,spacing,o0\n1,4,0.5,0\n0\n2\n-1\n1\n");
    let out = stdout(&wolfflab(&["rearrange", "--input", s(&grid)]));
    put(&dir, "f.csv", &out);
    let rows: Vec<Vec<f64>> = out.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows, vec![vec![0.0, 2.0], vec![0.5, 1.0], vec![1.5, 0.0]]);

    let psi = put(&dir, "psi.json", r#"{"family": "power", "exponent": 2.0}"#);
    let out = stdout(&wolfflab(&["rearrange", "--input", s(&grid), "--psi", s(&psi)]));
    assert!(out.lines().nth(1).unwrap().ends_with(&format!("{:.16e}", 4.0)));

    put(&dir, "unit.csv", "t,v\n0,1\n1,0\n");
    let req = put(&dir, "lorentz.json", r#"{"norm": "lorentz", "params": {"p": 2, "q": 1, "variant": "star"}, "input": "unit.csv"}"#);
    let out = stdout(&wolfflab(&["norm", "--request", s(&req)]));
    let v: f64 = out.lines().nth(1).unwrap().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-10);

    let req = put(&dir, "weak.json", r#"{"norm": "lorentz", "params": {"p": 1, "q": "inf", "variant": "star"}, "input": "f.csv"}"#);
    let out = stdout(&wolfflab(&["norm", "--request", s(&req)]));
    assert_eq!(out.lines().nth(1).unwrap().parse::<f64>().unwrap(), 1.5);

    let req = put(&dir, "morrey.json", r#"{"norm": "morrey", "params": {"q": 1, "theta": 0.5}, "input": "unit.csv"}"#);
    let o = wolfflab(&["norm", "--request", s(&req)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_and_pde() {
    let dir = TempDir::new().unwrap();
    let phi = put(&dir, "phi.csv", "t,v\n0,1\n1,0\n");
    let params = put(&dir, "r.json", r#"{"alpha": 1, "n": 2, "psi": {"family": "power", "exponent": 2.0}}"#);
    let out = stdout(&wolfflab(&["reduce", "--params", s(&params), "--input", s(&phi), "--t", "2,8"]));
    // past the support the integrand is s^{-1/2} (s^{-1/2})^2
    for (line, t) in out.lines().skip(1).zip([2.0f64, 8.0]) {
        let v: f64 = cells(line)[1].parse().unwrap();
        assert!((v - 2.0 / t.sqrt()).abs() < 1e-8, "{v}");
    }

    put(&dir, "ball.csv", "t,v\n0,1\n1,0\n");
    let problem = put(&dir, "prob.json", r#"{"n": 3, "g": {"family": "power", "p": 2}, "f": "ball.csv", "domain_radius": 1}"#);
    let out = stdout(&wolfflab(&["pde", "--problem", s(&problem), "--radii", "0,0.5,1"]));
    for line in out.lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((row[1] - (1.0 - row[0] * row[0]) / 6.0).abs() < 1e-6);
    }
    let out = stdout(&wolfflab(&["pde", "--problem", s(&problem), "--radii", "0,0.25", "--big-r", "0.25,0.5"]));
    assert_eq!(out.lines().next().unwrap(), "radius,big_r,u,wolff,inf_u,lower_slack,upper_slack");
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn verify_writes_reports_and_signals_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = put(&dir, "cfg.json", r#"{"seed": 3}"#);
    let (csv, json) = (dir.path().join("r.csv"), dir.path().join("r.json"));
    let o = wolfflab(&["verify", "--suite", "appendix", "--config", s(&cfg), "--out", s(&csv), "--json", s(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("case,label,at,lhs,rhs,ratio\n"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["suite"], "appendix");
    assert_eq!(report["config"]["seed"], 3);
    assert_eq!(report["pass"], true);

    let strict = put(&dir, "strict.json", r#"{"stability_threshold": 1e-6}"#);
    let o = wolfflab(&["verify", "--suite", "orlicz_bounds", "--config", s(&strict), "--out", s(&csv)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let o = wolfflab(&["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    let bad = put(&dir, "bad.json", r#"{"seeds": 3}"#);
    let o = wolfflab(&["verify", "--suite", "appendix", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
}
