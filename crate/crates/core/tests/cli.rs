//! End-to-end tests of the `geom3` binary: exit codes, determinism and
//! output schemas.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> String {
    root().join("tests/data").join(name).to_string_lossy().into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn geom3(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_geom3")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn assert_schema(schema: &str, stdout: &str) -> Value {
    let text = std::fs::read_to_string(root().join("schemas").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let instance: Value = serde_json::from_str(stdout).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{stdout}");
    instance
}

#[test]
fn classify_algebra_heisenberg() {
    let r = geom3(&["classify-algebra", &data("heisenberg.json")]);
    assert_eq!(r.code, 0);
    let v = assert_schema("classify_algebra.json", &r.stdout);
    assert_eq!(v["kind"], "Heisenberg");
    assert_eq!(v["unimodular"], true);
}

#[test]
fn malformed_and_invalid_inputs_exit_one() {
    for f in ["malformed.json", "not_jacobi.json", "missing.json"] {
        let r = geom3(&["classify-algebra", &data(f)]);
        assert_eq!(r.code, 1, "{f}");
        assert!(r.stdout.is_empty());
        assert!(r.stderr.starts_with("error:"), "{}", r.stderr);
    }
    assert_eq!(geom3(&["catalog", "show", "NOSUCH"]).code, 1);
    assert_eq!(geom3(&["verify"]).code, 1);
    assert_eq!(geom3(&["curvature", "S3_SO4", "--point", "0,0,0"]).code, 1);
}

#[test]
fn catalog_verbs() {
    let r = geom3(&["catalog", "list"]);
    assert_eq!(r.code, 0);
    assert_schema("catalog_list.json", &r.stdout);
    for l in ["E3", "S3_SO4", "H3", "S2xR", "H2xR", "E2xR", "E2SemiR", "S3_U2", "SLTilde", "NilSO2"] {
        let r = geom3(&["catalog", "show", l]);
        assert_eq!(r.code, 0);
        assert_eq!(assert_schema("catalog_show.json", &r.stdout)["label"], l);
    }
}

#[test]
fn classify_specs() {
    for (f, want) in [
        ("spec_e2xr_scaled.json", "E2xR"),
        ("spec_warped.json", "E2SemiR"),
        ("spec_sl2r_group.json", "LieGroup"),
    ] {
        let r = geom3(&["classify", "--spec", &data(f)]);
        assert_eq!(r.code, 0, "{f}: {}", r.stderr);
        let v = assert_schema("classify.json", &r.stdout);
        assert_eq!(v["label"], want);
        assert_eq!(v["trace"].as_array().unwrap().last().unwrap()["question"], "label");
    }
}

#[test]
fn cohomology_and_extension() {
    let r = geom3(&["cohomology", "h2", &data("e2.json")]);
    assert_eq!(r.code, 0);
    let v = assert_schema("cohomology_h2.json", &r.stdout);
    assert_eq!(v["betti2"], 1);

    let r = geom3(&["extend", &data("e2.json"), "--cocycle", &data("e2_omega1.json")]);
    assert_eq!(r.code, 0);
    let v = assert_schema("extend.json", &r.stdout);
    assert_eq!(v["structure_constants"]["dim"], 4);
    assert_eq!(v["jacobi_residual"], 0.0);
}

#[test]
fn verify_report_shape_and_determinism() {
    let args = ["verify", "E2SemiR", "--samples", "100", "--seed", "7"];
    let a = geom3(&args);
    let b = geom3(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let v = assert_schema("report.json", &a.stdout);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["pass"], true);
    let div = v["results"].as_array().unwrap().iter().find(|r| r["quantity"] == "divergence of X").unwrap();
    assert!((div["value"].as_f64().unwrap() - 1.0).abs() < 1e-5);

    let c = geom3(&["verify", "E2SemiR", "--samples", "100", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn curvature_geodesic_isotropy() {
    let r = geom3(&["curvature", "S3_SO4", "--point", "0.5,0.5,0.5,0.5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_schema("report.json", &r.stdout);

    let r = geom3(&["geodesic", "S2xR", "--point", "1,0,0,0", "--dir", "0,1,0", "--time", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_schema("geodesic.json", &r.stdout);
    let end: Vec<f64> = v["endpoint"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // unit-speed great circle through (1,0,0)
    assert!((end.iter().take(3).map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);
    assert!((end[0] - 1f64.cos()).abs() < 1e-6, "{end:?}");

    let r = geom3(&["isotropy", "NilSO2"]);
    assert_eq!(r.code, 0);
    assert_schema("isotropy.json", &r.stdout);
}

#[test]
fn help_exits_zero() {
    let r = geom3(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("verify"));
}
