//! CLI half of the negative-controls acceptance criterion: the `verify`
//! subcommand exits 1 on a not-well-centered mesh and on a sign-corrupted
//! Dirac block, with the nonzero skewness residual reported.

use std::path::{Path, PathBuf};
use std::process::Command;

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phdec_acceptance_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn phdec(args: &[&str], cwd: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_phdec"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn criterion_10_cli_negative_controls() {
    let dir = scratch_dir("c10");

    // Square-diagonal (right-triangle) mesh: rejected as not well-centered
    // with exit code 1.
    std::fs::write(
        dir.join("square.json"),
        r#"{"dimension": 2,
            "vertices": [[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0]],
            "simplices": [[0,1,2],[0,2,3]]}"#,
    )
    .unwrap();
    std::fs::write(
        dir.join("square_cfg.json"),
        r#"{"model": "wave2d", "mesh": {"kind": "file", "path": "square.json"}}"#,
    )
    .unwrap();
    let (code, stdout) = phdec(&["verify", "--config", "square_cfg.json"], &dir);
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("well_centered"));
    assert!(stdout.contains("FAIL"));

    // Sign-corrupted Dirac block: nonzero skewness residual, exit code 1.
    std::fs::write(
        dir.join("fault_cfg.json"),
        r#"{
  "model": "telegraph",
  "causality": "current",
  "mesh": {"kind": "interval", "n_edges": 10, "length": 1.0},
  "fault_injection": {"dirac_sign_flip": true}
}"#,
    )
    .unwrap();
    let (code, stdout) = phdec(&["verify", "--config", "fault_cfg.json"], &dir);
    assert_eq!(code, 1, "{stdout}");
    let line = stdout
        .lines()
        .find(|l| l.contains("_skew") && l.contains("FAIL"))
        .expect("skewness line must fail");
    assert!(!line.contains(" 0.000e0 "));

    // Corrupted mesh file: exit code 2 (config error class).
    std::fs::write(dir.join("bad_mesh.json"), "garbage").unwrap();
    std::fs::write(
        dir.join("bad_cfg.json"),
        r#"{"model": "wave2d", "mesh": {"kind": "file", "path": "bad_mesh.json"}}"#,
    )
    .unwrap();
    let (code, _) = phdec(&["verify", "--config", "bad_cfg.json"], &dir);
    assert_eq!(code, 2);

    println!("criterion 10 (cli): verify exit codes 1/1/2 as required: PASS");
}
