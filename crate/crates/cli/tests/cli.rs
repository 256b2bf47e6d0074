use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn l1curve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l1curve"))
        .args(args)
        .env_remove("L1CURVE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, omega: &str, levels: u32) -> PathBuf {
    let path = dir
        .path()
        .join(format!("{}-{levels}.json", omega.replace([':', '/'], "_")));
    let out = l1curve(&[
        "build",
        "--omega",
        omega,
        "--levels",
        &levels.to_string(),
        "-o",
        path_str(&path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

/// `(r, k, n)` rows of the printed schedule table.
fn schedule_rows(text: &str) -> Vec<(u32, u32, u32)> {
    text.lines()
        .filter_map(|line| {
            let cols: Vec<u32> = line
                .split_whitespace()
                .map_while(|c| c.parse().ok())
                .collect();
            (cols.len() == 5).then(|| (cols[0], cols[1], cols[2]))
        })
        .collect()
}

#[test]
fn build_prints_schedule() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.json");
    let out = l1curve(&[
        "build",
        "--omega",
        "constant:1",
        "--levels",
        "3",
        "-o",
        path_str(&path),
    ]);
    assert!(out.status.success());
    let rows = schedule_rows(&stdout(&out));
    assert_eq!(rows, [(1, 2, 3), (2, 5, 9), (3, 10, 20)]);
    assert!(path.exists());
}

#[test]
fn zero_levels_is_a_usage_error() {
    let out = l1curve(&["build", "--levels", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_cap_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.json");
    let out = l1curve(&[
        "build",
        "--levels",
        "4",
        "--max-degree",
        "7",
        "-o",
        path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists());
}

#[test]
fn faster_decay_needs_larger_k() {
    let dir = TempDir::new().unwrap();
    let a = l1curve(&[
        "build",
        "--omega",
        "constant:1",
        "-o",
        path_str(&dir.path().join("a.json")),
    ]);
    let b = l1curve(&[
        "build",
        "--omega",
        "factorial-reciprocal",
        "-o",
        path_str(&dir.path().join("b.json")),
    ]);
    let (a, b) = (schedule_rows(&stdout(&a)), schedule_rows(&stdout(&b)));
    assert_eq!(b, [(1, 2, 3), (2, 6, 10), (3, 20, 31)]);
    assert!(a.iter().zip(&b).all(|(x, y)| x.1 <= y.1));
    assert!(a.iter().zip(&b).any(|(x, y)| x.1 < y.1));
}

#[test]
fn out_dir_env_sets_default_location() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_l1curve"))
        .args(["build", "--levels", "1"])
        .env("L1CURVE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("model.json").exists());
}

#[test]
fn eval_in_constant_region() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 3);
    let out = l1curve(&["eval", path_str(&model), "--t", "1/4", "--x", "0.7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value = 0.25000000000000000000"), "{text}");
    assert!(text.contains("truncation = 0\n"), "{text}");
}

#[test]
fn eval_complex_and_range_errors() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 2);
    let m = path_str(&model);
    let out = l1curve(&["eval", m, "--t", "1/3", "--z", "0+1i"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("error_bound = 0.50000000000000089"));
    // |z| = 3 needs r_max >= 3
    assert_eq!(
        l1curve(&["eval", m, "--t", "1/3", "--z", "3i"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        l1curve(&["eval", m, "--t", "1/3", "--x", "1/2", "--r-max", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        l1curve(&["eval", m, "--t", "1/3", "--x", "1/2", "--precision", "32"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        l1curve(&["eval", m, "--t", "2", "--x", "1/2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_model_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"omega\": 3}").unwrap();
    assert_eq!(l1curve(&["verify", path_str(&path)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        l1curve(&["eval", path_str(&missing), "--t", "0", "--x", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_flags_corrupted_model() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 2);
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    // shapes are in BFS order: "", "L", "R", ...; perturb g_L
    doc["shapes"][1]["g"][0] = "3/1".into();
    std::fs::write(&model, doc.to_string()).unwrap();
    let report = dir.path().join("report.json");
    let out = l1curve(&[
        "verify",
        path_str(&model),
        "--only",
        "shapes",
        "--only",
        "bisection",
        "-o",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let failed: Vec<&str> = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["verdict"] == "fail")
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"shapes"), "{failed:?}");
    assert!(failed.contains(&"bisection"), "{failed:?}");
}

#[test]
fn secant_only_reports_each_level() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 3);
    let report = dir.path().join("secant.json");
    let out = l1curve(&[
        "verify",
        path_str(&model),
        "--only",
        "secant",
        "--t",
        "1/3",
        "-o",
        path_str(&report),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    let witness = reports[0]["witness"].as_object().unwrap();
    assert_eq!(witness.len(), 3);
    assert!(witness
        .values()
        .all(|w| w["lo"].is_string() && w["hi"].is_string()));
}

#[test]
fn full_verify_passes_on_presets() {
    let dir = TempDir::new().unwrap();
    for omega in ["constant:1", "geometric:1/2", "factorial-reciprocal"] {
        let model = build(&dir, omega, 3);
        let report = dir.path().join("report.json");
        let out = l1curve(&[
            "verify",
            path_str(&model),
            "--isometry-pairs",
            "20",
            "-o",
            path_str(&report),
        ]);
        assert!(out.status.success(), "{omega}: {}", stdout(&out));
        assert!(stdout(&out).contains(" 0 fail"));
    }
}

#[test]
fn export_grid_shape() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 3);
    let csv = dir.path().join("out.csv");
    let out = l1curve(&[
        "export",
        path_str(&model),
        "--t",
        "0,1/4,1/2,3/4,1",
        "--x-points",
        "101",
        "-o",
        path_str(&csv),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,value,error_bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 505);
    for block in rows.chunks(101) {
        assert!(block.windows(2).all(|w| w[0][1] < w[1][1]));
        assert!(block.iter().all(|r| (0.0..=1.0).contains(&r[2])));
    }
    // t = 0 and t = 1 map to the constants 0 and 1
    assert!(rows[..101].iter().all(|r| r[2] == 0.0));
    assert!(rows[404..].iter().all(|r| r[2] == 1.0));
    // pointwise monotone in t
    for j in 0..101 {
        assert!((0..4).all(|b| rows[b * 101 + j][2] <= rows[(b + 1) * 101 + j][2]));
    }
}

#[test]
fn export_empty_t_list_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let model = build(&dir, "constant:1", 1);
    let out = l1curve(&["export", path_str(&model), "--t", "", "-o", "-"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "t,x,value,error_bound\n");
}

#[test]
fn builds_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert!(
            l1curve(&["build", "--omega", "geometric:1/2", "-o", path_str(p)])
                .status
                .success()
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let reports: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let r = dir.path().join(format!("r{k}.json"));
            l1curve(&[
                "verify",
                path_str(&a),
                "--seed",
                "9",
                "--only",
                "isometry",
                "-o",
                path_str(&r),
            ]);
            std::fs::read(&r).unwrap()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
}
