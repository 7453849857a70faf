use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_midpoint");

const CUBE_OBJ: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 2 3 4
f 8 7 6 5
f 1 5 6 2
f 2 6 7 3
f 3 7 8 4
f 4 8 5 1
";

fn run(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env("MIDPOINT_LOG", "warn")
        .env("MIDPOINT_TIMESTAMP", "0")
        .output()
        .expect("binary runs")
}

fn exit_code(out: &std::process::Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn subdivide_cube_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cube.obj"), CUBE_OBJ).unwrap();
    let out = run(
        &["subdivide", "-n", "2", "-k", "1", "-i", "cube.obj", "-o", "out.obj"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let text = std::fs::read_to_string(dir.path().join("out.obj")).unwrap();
    // M_2 = A R on the cube: vertices are the 24 face centroids of R(cube),
    // faces one per R-vertex (26); all 8 extraordinary elements are faces
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 24);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 26);
}

#[test]
fn subdivide_malformed_obj_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.obj"), "v 0 0 0\nf 1 2 x\n").unwrap();
    let out = run(
        &["subdivide", "-n", "2", "-i", "bad.obj", "-o", "out.obj"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn certify_pass_and_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["certify", "-n", "2", "-m", "5", "-o", "run"];
    assert_eq!(exit_code(&run(&args, dir.path())), 0);
    let first = std::fs::read(dir.path().join("run/cert_n2_m5.json")).unwrap();
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    assert!(summary.contains("2,5,") && summary.contains(",pass"), "{summary}");
    assert!(String::from_utf8_lossy(&first).contains("\"verdict\":\"pass\""));
    assert_eq!(exit_code(&run(&args, dir.path())), 0);
    let second = std::fs::read(dir.path().join("run/cert_n2_m5.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn certify_rejects_degree_one_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["certify", "-n", "1..2", "-m", "5", "-o", "run"], dir.path());
    assert_eq!(exit_code(&out), 1);
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    assert!(summary.contains("rejected"), "{summary}");
    assert!(summary.contains("2,5,"), "{summary}");
}

#[test]
fn kind_override_parity_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["certify", "-n", "3", "-m", "5", "--kind", "dual", "-o", "run"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn analyze_regular_valence_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["analyze", "-n", "2", "-m", "4", "-o", "spec"], dir.path());
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let report = std::fs::read_to_string(dir.path().join("spec/spectral_n2_m4.json")).unwrap();
    // subdominant eigenvalue of the regular scheme is exactly 1/2
    assert!(report.contains("\"lambda_sub\":\"5.00000000"), "{report}");
    assert!(dir.path().join("spec/eigenvalues_n2_m4.csv").exists());
    assert!(dir.path().join("spec/hcoords_n2_m4.csv").exists());
    let mesh = std::fs::read_to_string(dir.path().join("spec/charmesh_n2_m4.json")).unwrap();
    assert!(mesh.starts_with("{\"m\":4,\"kind\":\"dual\""), "{mesh}");
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        "{\"degree\":2,\"valence\":\"3\",\"output\":\"from_config\"}",
    )
    .unwrap();
    // config alone supplies everything
    let out = run(&["certify", "--config", "cfg.json"], dir.path());
    assert_eq!(exit_code(&out), 0, "{out:?}");
    assert!(dir.path().join("from_config/cert_n2_m3.json").exists());
    // a flag overrides the config's valence, the rest still applies
    let out = run(&["certify", "--config", "cfg.json", "-m", "5"], dir.path());
    assert_eq!(exit_code(&out), 0);
    assert!(dir.path().join("from_config/cert_n2_m5.json").exists());
    assert!(!dir.path().join("from_config/cert_n2_m5_m3.json").exists());
}
