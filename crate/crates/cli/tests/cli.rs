use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use horocusp::cusp::build_state;
use horocusp::surface::ConeSurface;
use horocusp_cli::Report;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn horocusp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horocusp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_code(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    v["code"].as_str().unwrap().to_string()
}

fn solve_report(input: &Path) -> (String, Report) {
    let o = horocusp(&["solve", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let r = serde_json::from_str(&text).unwrap();
    (text, r)
}

/// Same extremality test as the core suite: Klein → half-space, then a
/// non-empty power cell for every point.
fn all_extreme(points: &[[f64; 3]]) -> bool {
    let uhs: Vec<([f64; 2], f64)> = points
        .iter()
        .map(|k| {
            let n2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let s = 1.0 + (1.0 - n2).sqrt();
            let b = [k[0] / s, k[1] / s, k[2] / s];
            let bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
            let d = b[0] * b[0] + b[1] * b[1] + (1.0 - b[2]) * (1.0 - b[2]);
            ([2.0 * b[0] / d, 2.0 * b[1] / d], (1.0 - bb) / d)
        })
        .collect();
    let spread = uhs.iter().fold(1.0f64, |m, (p, z)| m.max(p[0].abs()).max(p[1].abs()).max(*z));
    let big = 1e4 * spread;
    let w: Vec<f64> = uhs.iter().map(|(p, z)| p[0] * p[0] + p[1] * p[1] + z * z).collect();
    (0..uhs.len()).all(|v| {
        let pv = uhs[v].0;
        let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
        for u in (0..uhs.len()).filter(|&u| u != v) {
            let pu = uhs[u].0;
            let a = [2.0 * (pu[0] - pv[0]), 2.0 * (pu[1] - pv[1])];
            let b = w[u] - w[v];
            let f = |x: [f64; 2]| a[0] * x[0] + a[1] * x[1] - b;
            let mut out = Vec::new();
            for i in 0..poly.len() {
                let (x, y) = (poly[i], poly[(i + 1) % poly.len()]);
                let (fx, fy) = (f(x), f(y));
                if fx <= 0.0 {
                    out.push(x);
                }
                if (fx < 0.0 && fy > 0.0) || (fx > 0.0 && fy < 0.0) {
                    let t = fx / (fx - fy);
                    out.push([x[0] + t * (y[0] - x[0]), x[1] + t * (y[1] - x[1])]);
                }
            }
            poly = out;
            if poly.len() < 3 {
                return false;
            }
        }
        let area: f64 = (0..poly.len())
            .map(|i| {
                let (x, y) = (poly[i], poly[(i + 1) % poly.len()]);
                x[0] * y[1] - x[1] * y[0]
            })
            .sum();
        area / 2.0 > 1e-18 * spread * spread
    })
}

#[test]
fn solve_one_vertex_torus() {
    let (_, r) = solve_report(&data("equilateral.json"));
    assert_eq!(r.h.len(), 1);
    assert_eq!(r.h[0].0, 0.0);
    assert!(r.kappa.0.iter().all(|k| k.0.abs() < 1e-10));
    let solver = r.solver.unwrap();
    assert_eq!(solver.status, "Converged");
    assert_eq!(solver.iterations, 0);
}

#[test]
fn nonzero_target_sum_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    std::fs::write(&k, "[0.1, 0, 0, 0, 0, 0]").unwrap();
    let o = horocusp(&[
        "particles",
        "--input",
        data("six_vertices.json").to_str().unwrap(),
        "--kappa",
        k.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_code(&o), "TargetSumNonzero");
    assert!(o.stdout.is_empty());
}

#[test]
fn particles_reach_their_target() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    std::fs::write(&k, r#"{"0": 0.05, "1": -0.05, "2": 0.02, "3": -0.02, "4": 0.0, "5": 0.0}"#).unwrap();
    let out = dir.path().join("r.json");
    let o = horocusp(&[
        "particles",
        "--input",
        data("six_vertices.json").to_str().unwrap(),
        "--kappa",
        k.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want = [0.05, -0.05, 0.02, -0.02, 0.0, 0.0];
    for (k, w) in r.kappa.0.iter().zip(want) {
        assert!((k.0 - w).abs() < 1e-10);
    }
}

#[test]
fn develop_obj_is_in_convex_position() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    for input in ["six_vertices.json", "rectangle.json"] {
        let (text, r) = solve_report(&data(input));
        std::fs::write(&report, text).unwrap();
        let o = horocusp(&[
            "develop",
            "--input",
            report.to_str().unwrap(),
            "--copies",
            "2",
            "--format",
            "obj",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let obj = stdout(&o);
        let pts: Vec<[f64; 3]> = obj
            .lines()
            .filter_map(|l| l.strip_prefix("v "))
            .map(|l| {
                let v: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
                [v[0], v[1], v[2]]
            })
            .collect();
        assert_eq!(pts.len(), 25 * r.h.len());
        assert!(all_extreme(&pts), "{input}");
        let faces = obj.lines().filter(|l| l.starts_with("f ")).count();
        assert!(faces > 0);
    }
}

#[test]
fn develop_json_from_a_surface() {
    let o = horocusp(&["develop", "--input", data("rectangle.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 1);
    assert!(v["holonomy"]["g1"]["tr"].is_array());
    assert!(v["defects"]["0"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn reports_are_deterministic() {
    for extra in [&[][..], &["--seed", "17"][..]] {
        let mut args = vec!["solve", "--input"];
        let path = data("six_vertices.json");
        args.push(path.to_str().unwrap());
        args.extend_from_slice(extra);
        let a = horocusp(&args);
        let b = horocusp(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn report_rebuilds_its_state() {
    let (_, r) = solve_report(&data("six_vertices.json"));
    let s = ConeSurface::<f64>::from_doc(&r.surface.to_doc()).unwrap();
    let h: Vec<f64> = r.h.iter().map(|x| x.0).collect();
    let st = build_state(&s, &h).unwrap();
    for e in &r.edges {
        assert!((st.theta(e.edge) - e.theta.0).abs() <= 1e-12);
        assert_eq!(s.length(e.edge), e.length.0);
        assert_eq!([s.origin(e.edge), s.target(e.edge)], e.vertices);
    }
    for (a, b) in st.kappa().iter().zip(&r.kappa.0) {
        assert!((a - b.0).abs() <= 1e-12);
    }
    for (t, tri) in r.triangulation.vertices.iter().enumerate() {
        assert_eq!(&s.triangle_vertices(t), tri);
    }
    // re-serializing the parsed report gives the same bytes
    let (text, _) = solve_report(&data("six_vertices.json"));
    let parsed: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.to_json(), text);
}

#[test]
fn rigidity_of_a_solved_cusp() {
    let o = horocusp(&["rigidity", "--input", data("six_vertices.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    let rig = r.rigidity.unwrap();
    assert!(rig.rigid);
    assert_eq!(rig.components.len(), 1);
    assert_eq!(rig.eigenvalues.len(), 5);
}

#[test]
fn inconsistent_flags_are_rejected() {
    let input = data("equilateral.json");
    let input = input.to_str().unwrap();
    for args in [
        vec!["solve", "--input", input, "--kappa", "k.json"],
        vec!["particles", "--input", input],
        vec!["solve", "--input", input, "--copies", "2"],
        vec!["validate", "--input", input, "--format", "obj"],
        vec!["validate", "--input", input, "--tol", "1e-8"],
        vec!["solve", "--input", input, "--start", "halfway"],
        vec!["frobnicate", "--input", input],
    ] {
        let o = horocusp(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert_eq!(error_code(&o), "InvalidFlags");
    }
}

#[test]
fn bad_surfaces_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("equilateral.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["length"][0] = (-1.0).into();
    doc["length"][4] = (-1.0).into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let o = horocusp(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_code(&o), "NonPositiveLength");

    let o = horocusp(&["solve", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_code(&o), "Io");
}

#[test]
fn infeasibility_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let start = dir.path().join("h.json");
    std::fs::write(&start, "[5, -5, 0, 0, 0, 0]").unwrap();
    let flag = format!("file:{}", start.display());
    let input = data("six_vertices.json");
    let o = horocusp(&["solve", "--input", input.to_str().unwrap(), "--start", &flag]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "PrismMissing");

    let o = horocusp(&["solve", "--input", input.to_str().unwrap(), "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "MaxIterExceeded");
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.solver.unwrap().status, "MaxIterExceeded");
}

#[test]
fn validate_and_delaunay() {
    let o = horocusp(&["validate", "--input", data("six_vertices.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"], 6);
    let k: f64 = v["curvatures"].as_object().unwrap().values().map(|x| x.as_f64().unwrap()).sum();
    assert!((k - v["area"].as_f64().unwrap()).abs() < 1e-10);

    let o = horocusp(&["delaunay", "--input", data("six_vertices.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let doc = serde_json::from_value(v["surface"].clone()).unwrap();
    assert!(ConeSurface::<f64>::from_doc(&doc).unwrap().is_delaunay());
}
