//! End-to-end runs of the `dtl` binary.

use std::path::Path;
use std::process::Command;

fn dtl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dtl"))
}

fn run_ok(args: &[&str]) {
    let out = dtl().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "dtl {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn fit_then_predict_reproduces_training_responses() {
    let dir = tmp();
    let data = dir.path().join("d.csv");
    let model = dir.path().join("m.json");
    let preds = dir.path().join("p.csv");
    run_ok(&["generate", "--kind", "saddle", "--n", "80", "--noise", "0.05", "--seed", "7", "--out", &s(&data)]);
    run_ok(&["fit", "--data", &s(&data), "--lambda", "0", "--loss", "squared", "--out", &s(&model)]);
    run_ok(&["predict", "--model", &s(&model), "--queries", &s(&data), "--out", &s(&preds)]);

    // lambda = 0 squared loss interpolates: predictions equal the y column
    let data_text = std::fs::read_to_string(&data).unwrap();
    let pred_text = std::fs::read_to_string(&preds).unwrap();
    let ys: Vec<&str> = data_text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let ps: Vec<&str> = pred_text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(ys.len(), 80);
    for (y, p) in ys.iter().zip(&ps) {
        let y: f64 = y.parse().unwrap();
        let p: f64 = p.parse().unwrap();
        assert_eq!(y.to_bits(), p.to_bits(), "{y} vs {p}");
    }
    // manifests exist beside every output
    assert!(dir.path().join("d.csv.manifest.json").exists());
    assert!(dir.path().join("m.json.manifest.json").exists());
    assert!(dir.path().join("p.csv.manifest.json").exists());
}

#[test]
fn generate_is_deterministic() {
    let dir = tmp();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        run_ok(&["generate", "--kind", "moons", "--n", "100", "--noise", "0.1", "--seed", "3", "--out", &s(out)]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn experiment_optimality_reports_zero_violations() {
    let dir = tmp();
    let out = dir.path().join("r.json");
    run_ok(&[
        "experiment", "--name", "optimality", "--p", "2", "--n", "60", "--queries", "100",
        "--alternatives", "3", "--seed", "1", "--out", &s(&out),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["pointwise_violations"], 0);
    assert!(dir.path().join("r.csv").exists());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + one row per alternative
}

#[test]
fn export_mesh_roundtrip() {
    let dir = tmp();
    let data = dir.path().join("d.csv");
    let model = dir.path().join("m.json");
    run_ok(&["generate", "--kind", "linear", "--n", "30", "--seed", "2", "--out", &s(&data)]);
    run_ok(&["fit", "--data", &s(&data), "--out", &s(&model)]);
    let off = dir.path().join("m.off");
    let json = dir.path().join("mesh.json");
    run_ok(&["export-mesh", "--model", &s(&model), "--out", &s(&off), "--format", "off"]);
    run_ok(&["export-mesh", "--model", &s(&model), "--out", &s(&json), "--format", "json"]);
    let (verts, faces) = dtl_cli::io::mesh::read_off(&off).unwrap();
    assert_eq!(verts.len(), 30);
    assert!(!faces.is_empty());
    let mesh = dtl_cli::io::mesh::read_mesh_json(&json).unwrap();
    assert_eq!(mesh.vertices.len(), 30);
    assert_eq!(mesh.simplices.len(), faces.len());
}

#[test]
fn exit_codes() {
    // usage error: unknown flag
    let out = dtl().args(["fit", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");

    // data error: missing file
    let out = dtl()
        .args(["fit", "--data", "/nonexistent/x.csv", "--out", "/tmp/never.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");

    // malformed data: degenerate input
    let dir = tmp();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,x2,y\n0,0,1\n1,1,2\n2,2,3\n3,3,4\n").unwrap();
    let out = dtl()
        .args(["fit", "--data", &s(&bad), "--out", &s(&dir.path().join("m.json"))])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // help exits zero
    let out = dtl().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let help = String::from_utf8_lossy(&out.stdout);
    assert!(help.contains("experiment"));

    // per-subcommand help documents flags and defaults
    let out = dtl().args(["fit", "--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let help = String::from_utf8_lossy(&out.stdout);
    assert!(help.contains("--lambda"));
    assert!(help.contains("0.999"), "Adam defaults documented: {help}");
}

#[test]
fn predictions_survive_model_reload() {
    let dir = tmp();
    let data = dir.path().join("d.csv");
    let model_path = dir.path().join("m.json");
    run_ok(&["generate", "--kind", "arctan", "--n", "60", "--noise", "0.1", "--seed", "9", "--out", &s(&data)]);
    run_ok(&["fit", "--data", &s(&data), "--lambda", "0.5", "--out", &s(&model_path)]);

    let queries = dir.path().join("q.csv");
    let mut q = String::from("x1,x2\n");
    for i in 0..50 {
        let t = i as f64 / 50.0;
        q.push_str(&format!("{},{}\n", 2.0 * t - 1.0, 1.0 - 2.0 * t * t));
    }
    std::fs::write(&queries, q).unwrap();

    let p1 = dir.path().join("p1.csv");
    let p2 = dir.path().join("p2.csv");
    run_ok(&["predict", "--model", &s(&model_path), "--queries", &s(&queries), "--out", &s(&p1)]);
    // reload through the library and save again, then predict from the copy
    let m = dtl_cli::io::model::load_model(&model_path).unwrap();
    let copy = dir.path().join("copy.json");
    dtl_cli::io::model::save_model(&copy, &m).unwrap();
    run_ok(&["predict", "--model", &s(&copy), "--queries", &s(&queries), "--out", &s(&p2)]);
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn rerunning_experiments_is_byte_identical() {
    let dir = tmp();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        run_ok(&[
            "experiment", "--name", "scaling", "--p", "1", "--sizes", "50,100,200",
            "--queries", "50", "--seed", "5", "--out", &s(out),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

