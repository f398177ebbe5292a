//! End-to-end coverage of the command-line surface: subcommand grammar, exit
//! codes, config overrides, and validation of every JSON output against its
//! published schema.

use std::path::{Path, PathBuf};
use std::process::Command;

use helisheet::io::schema::validate;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_helisheet")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .canonicalize()
        .unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("spawn helisheet");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn check_schema(path: &Path, schema_name: &str) {
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(schema_dir().join(schema_name)).unwrap(),
    )
    .unwrap();
    if let Err(e) = validate(&value, &schema) {
        panic!("{} does not match {schema_name}: {e}", path.display());
    }
}

#[test]
fn pipeline_outputs_validate_against_their_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();

    let (rc, _, err) = run(&[
        "generate", "--kind", "helicoid", "--pitch", "1", "--r2", "8",
        "--n-rho", "17", "--n-theta", "129", "--out", &p("h.json"),
        "--mesh-out", &p("hmesh.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("h.json"), "container_multigraph.schema.json");
    check_schema(&dir.path().join("hmesh.json"), "container_meshpatch.schema.json");

    let (rc, _, err) = run(&[
        "solve", "--in", &p("h.json"), "--bump-edge", "outer", "--bump-amp", "0.05",
        "--out", &p("pert.json"), "--report", &p("solve.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("solve.json"), "solve_report.schema.json");

    let (rc, _, _) = run(&[
        "certify", "--in", &p("h.json"), "--eps", "0.1", "--N", "2", "--scale", "2",
        "--kind", "weak", "--out", &p("cert.json"),
    ]);
    assert_eq!(rc, 1, "failing certificate must exit 1");
    check_schema(&dir.path().join("cert.json"), "certificate.schema.json");

    let (rc, _, err) = run(&[
        "laurent", "--in", &p("h.json"), "--r1", "1", "--radii", "2,4",
        "--out", &p("laurent.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("laurent.json"), "laurent_fit.schema.json");

    let (rc, _, err) = run(&[
        "osc", "--in", &p("h.json"), "--rho-list", "2,4", "--out", &p("osc.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("osc.json"), "osc_profile.schema.json");

    let (rc, _, err) = run(&[
        "spiral", "--in", &p("h.json"), "--c2", "6.2", "--eps", "0.01",
        "--out", &p("spiral.json"), "--csv", &p("spiral.csv"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("spiral.json"), "spiral_report.schema.json");

    let (rc, _, err) = run(&["gauss", "--in", &p("h.json"), "--out", &p("gauss.json")]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("gauss.json"), "gauss_report.schema.json");

    let (rc, _, err) = run(&[
        "generate", "--kind", "helicoid", "--ball-radius", "5", "--ball-n", "101",
        "--mesh-out", &p("ball.json"),
    ]);
    assert_eq!(rc, 0, "{err}");

    let (rc, _, err) = run(&[
        "levels", "--in", &p("ball.json"), "--count", "4", "--seed", "1",
        "--out", &p("levels.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("levels.json"), "levels_report.schema.json");

    let (rc, _, err) = run(&[
        "blowup", "--in", &p("ball.json"), "--c", "1.4142135623730951",
        "--out", &p("pairs.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("pairs.json"), "blowup_scan.schema.json");

    let (rc, _, err) = run(&[
        "decompose", "--in", &p("ball.json"), "--pairs", &p("pairs.json"),
        "--eps0", "0.5", "--r1-mult", "1.7", "--out", &p("decomp.json"),
    ]);
    assert!(rc == 0 || rc == 1, "{err}");
    check_schema(&dir.path().join("decomp.json"), "decompose_report.schema.json");

    let (rc, _, err) = run(&[
        "fit", "--in", &p("ball.json"), "--seed", "5", "--out", &p("model.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("model.json"), "fit_model.schema.json");

    let (rc, _, err) = run(&[
        "bilip", "--in", &p("ball.json"), "--model", &p("model.json"),
        "--out", &p("bilip.json"), "--csv", &p("sv.csv"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("bilip.json"), "bilip_report.schema.json");

    let (rc, _, err) = run(&[
        "report", "--csv", &p("spiral.csv"), "--x", "rho", "--y", "min_utheta,rhs",
        "--out", &p("spiral.svg"),
    ]);
    assert_eq!(rc, 0, "{err}");
    let svg = std::fs::read_to_string(dir.path().join("spiral.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    let (rc, _, err) = run(&[
        "generate", "--kind", "weierstrass", "--alpha1", "0", "--alpha2", "1",
        "--curve-out", &p("curve.csv"), "--out", &p("wv.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    check_schema(&dir.path().join("wv.json"), "weierstrass_verdict.schema.json");
}

#[test]
fn claim_false_and_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();

    // unknown flag: usage text, exit 2
    let (rc, _, err) = run(&["generate", "--bogus-flag"]);
    assert_eq!(rc, 2);
    assert!(err.to_lowercase().contains("usage") || err.contains("--help"), "{err}");

    // self-intersecting axis curve: exit 1 with a witness
    let (rc, _, _) = run(&[
        "generate", "--kind", "weierstrass", "--alpha1", "1", "--alpha2", "0",
        "--t0", "0", "--t1", "12.6", "--out", &p("w.json"),
    ]);
    assert_eq!(rc, 1);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "self_intersecting");
    assert!(v["witness"].is_object());

    // missing file: exit 2
    let (rc, _, _) = run(&["certify", "--in", &p("nope.json"), "--eps", "0.1", "--N", "2", "--scale", "2"]);
    assert_eq!(rc, 2);

    // downward spiral never clears the bound: sentinel, exit 1
    let (rc, _, err) = run(&[
        "generate", "--kind", "helicoid", "--pitch", "-1", "--out", &p("down.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    let (rc, _, _) = run(&[
        "spiral", "--in", &p("down.json"), "--c2", "6.2", "--eps", "0.01",
        "--out", &p("sp.json"),
    ]);
    assert_eq!(rc, 1);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sp.json")).unwrap()).unwrap();
    assert!(v["c3"].is_null(), "sentinel must serialize as null");
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    std::fs::write(dir.path().join("cfg.json"), r#"{"pitch": 2.0}"#).unwrap();
    let (rc, _, err) = run(&[
        "generate", "--kind", "helicoid", "--pitch", "1", "--out", &p("h.json"),
        "--config", &p("cfg.json"),
    ]);
    assert_eq!(rc, 0, "{err}");
    let g = helisheet::io::load_multigraph(dir.path().join("h.json")).unwrap();
    match g.analytic {
        Some(helisheet::surfaces::analytic::GraphFormula::Helicoid { pitch }) => {
            assert_eq!(pitch, 2.0, "config did not override the flag")
        }
        other => panic!("unexpected analytic tag {other:?}"),
    }

    // unknown config keys are rejected
    std::fs::write(dir.path().join("bad.json"), r#"{"no_such_flag": 1}"#).unwrap();
    let (rc, _, _) = run(&[
        "generate", "--kind", "helicoid", "--out", &p("h2.json"),
        "--config", &p("bad.json"),
    ]);
    assert_eq!(rc, 2);
}
