use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resurgence_cli::schema::{load_germ, parse_path, GermSpec};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resurgence"))
        .args(args)
        .env("RESURGENCE_NUM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn omega_check_reports_a_witness() {
    let o = run(&["--json", "omega-check", "--omega", s(&data("pair.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["addition_stable"], false);
    assert_eq!(v["witness"], serde_json::json!([[1.0, 0.0], [2.0, 0.0]]));

    let o = run(&["omega-check", "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("addition-stable on window: true"), "{}", stdout(&o));
}

#[test]
fn continue_writes_a_germ_that_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("germ.json");
    let trace = dir.path().join("trace.csv");
    let o = run(&[
        "continue",
        "--germ",
        s(&data("neg_log1m.json")),
        "--path",
        s(&data("below.json")),
        "--omega",
        s(&data("nstar.json")),
        "--out",
        s(&out),
        "--trace",
        s(&trace),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let GermSpec::Series { center, coeffs, .. } = load_germ(&out).unwrap() else { panic!("expected a series") };
    assert_eq!(center, [2.6, 0.4]);
    // Passing below 1 and then up across the real axis at 2.6 adds 2π to
    // the principal argument of 1 − ζ.
    let (a, b) = (1.0 - 2.6f64, -0.4f64);
    let expect = [-(a.hypot(b).ln()), -(b.atan2(a) + 2.0 * std::f64::consts::PI)];
    assert!((coeffs[0][0] - expect[0]).hypot(coeffs[0][1] - expect[1]) < 1e-10, "{:?} vs {expect:?}", coeffs[0]);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().count() > 2);
    assert!(text.lines().next().unwrap().contains("center_re"));
}

#[test]
fn input_errors_exit_one_with_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"pieces": [{"kind": "spiral"}]}"#).unwrap();
    let o = run(&["continue", "--germ", s(&data("geom1.json")), "--path", s(&bad), "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("'/pieces/0/kind'"), "{}", stderr(&o));

    let o =
        run(&["continue", "--germ", s(&data("missing.json")), "--path", s(&bad), "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn json_errors_are_json() {
    let o = run(&["--json", "homotopy", "--path", s(&data("touching.json")), "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("clearance"), "{v}");
}

#[test]
fn homotopy_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let o = run(&[
        "homotopy",
        "--path",
        s(&data("below.json")),
        "--omega",
        s(&data("nstar.json")),
        "--s-points",
        "33",
        "--out",
        s(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(csv.with_extension("json").exists());

    let o = run(&["homotopy", "validate", s(&csv), "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));

    // Move one interior grid point: the symmetry residual must catch it.
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let k = lines.len() / 2;
    let mut cols: Vec<String> = lines[k].split(',').map(String::from).collect();
    let re: f64 = cols[2].parse().unwrap();
    cols[2] = format!("{}", re + 1e-3);
    lines[k] = cols.join(",");
    std::fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let o = run(&["--json", "homotopy", "validate", s(&csv), "--omega", s(&data("nstar.json"))]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn convolve_matches_the_closed_form() {
    let o = run(&[
        "--json",
        "convolve",
        "--phi",
        s(&data("geom1.json")),
        "--psi",
        s(&data("geom2.json")),
        "--path",
        s(&data("below.json")),
        "--omega",
        s(&data("nstar.json")),
        "--s-points",
        "129",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got = v["value"].as_array().unwrap();
    let (re, im) = (got[0].as_f64().unwrap(), got[1].as_f64().unwrap());
    // log(1 − ζ) + log(1 − ζ/2) over ζ − 3 at 2.6 + 0.4i. The path crosses
    // the real axis upwards right of 2, so each logarithm gains 2πi.
    let z = (2.6f64, 0.4f64);
    let log = |a: f64, b: f64| ((a * a + b * b).sqrt().ln(), b.atan2(a));
    let l1 = log(1.0 - z.0, -z.1);
    let l2 = log(1.0 - z.0 / 2.0, -z.1 / 2.0);
    let num = (l1.0 + l2.0, l1.1 + l2.1 + 4.0 * std::f64::consts::PI);
    let den = (z.0 - 3.0, z.1);
    let d2 = den.0 * den.0 + den.1 * den.1;
    let expect = ((num.0 * den.0 + num.1 * den.1) / d2, (num.1 * den.0 - num.0 * den.1) / d2);
    assert!((re - expect.0).hypot(im - expect.1) < 1e-5, "{re} {im} vs {expect:?}");
}

#[test]
fn verify_suite_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn eta_grid_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.csv");
    let o =
        run(&["eta", "--omega", s(&data("nstar.json")), "--eps", "0.1", "--grid", "-1,3,-1,1,9,5", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 9 * 5);
}

#[test]
fn path_schema_rejects_unknown_fields() {
    let v =
        serde_json::json!({"pieces": [{"kind": "segment", "from": [0.0, 0.0], "to": [1.0, 0.0], "via": [0.5, 0.5]}]});
    assert!(parse_path(v, "inline").is_err());
}

#[test]
fn named_germs_stand_in_for_files() {
    let o = run(&["--json", "monodromy", "--germ", "log1m(1)", "--omega", s(&data("nstar.json")), "--around", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["value"].as_array().unwrap();
    assert!(value[0].as_f64().unwrap().abs() < 1e-9);
    assert!((value[1].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-9);
}
