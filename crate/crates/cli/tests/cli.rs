use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dualform::assembler::AssembledTensor;
use dualform_cli::{scenario, tensor_file};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualform"))
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assemble_one(file: &str, output: &str, extra: &[&str]) -> (Output, Option<AssembledTensor>) {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario_path(file);
    let mut args = vec!["assemble", path.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    let t = std::fs::read_to_string(dir.path().join(output))
        .ok()
        .map(|text| tensor_file::parse(&text).unwrap());
    (o, t)
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_f2_prints_signature() {
    let o = run(&["check", scenario_path("F2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("F_2: W × V → ℝ"), "{}", stdout(&o));
}

#[test]
fn check_f3_reports_duplicate_argument() {
    let o = run(&["check", scenario_path("F3.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("DUP_ARG_NUMBER"), "{}", stderr(&o));
}

#[test]
fn malformed_node_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario_path("mass.json"))
        .unwrap()
        .replace("\"integral\"", "\"integrate\"");
    let p = write_scenario(dir.path(), &text);
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("PARSE_ERROR at"), "{}", stderr(&o));
}

#[test]
fn unknown_schema_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario_path("mass.json"))
        .unwrap()
        .replace("\"schema\": 1", "\"schema\": 7");
    let p = write_scenario(dir.path(), &text);
    assert_eq!(run(&["check", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn mass_matrix_file() {
    let (o, t) = assemble_one("mass.json", "mass.tensor", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = t.unwrap().into_matrix().unwrap();
    assert_eq!(m.shape(), (2, 2));
    let expected = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
    for (a, b) in m.values().iter().zip(expected) {
        assert!((a - b).abs() <= 1e-14);
    }
}

#[test]
fn tensor_files_have_stable_headers_and_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario_path("one_form.json");
    let args = ["assemble", path.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()];
    assert!(run(&args).status.success());
    let first = std::fs::read_to_string(dir.path().join("hats.tensor")).unwrap();
    assert!(run(&args).status.success());
    let second = std::fs::read_to_string(dir.path().join("hats.tensor")).unwrap();
    assert_eq!(first, second);
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("kind vector"));
    assert_eq!(lines.next(), Some("shape 3"));
    assert_eq!(
        lines.next(),
        Some("space name=V* family=Lagrange degree=1 cells=2 length=1 dual=true")
    );
    let values: Vec<f64> = lines.next().unwrap().split(' ').map(|s| s.parse().unwrap()).collect();
    for (a, b) in values.iter().zip([0.25, 0.5, 0.25]) {
        assert!((a - b).abs() <= 1e-14);
    }
    for s in first.lines().nth(3).unwrap().split(' ') {
        let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{s}");
    }
}

#[test]
fn identity_delta_file() {
    let (o, t) = assemble_one("identity_delta.json", "identity.tensor", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("identity: V × V* → ℝ"));
    let m = t.unwrap().into_matrix().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m.get(i, j), if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn missing_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "schema": 1,
      "meshes": {"m": {"n_cells": 2, "length": 1.0}},
      "elements": {"P1": {"family": "Lagrange", "degree": 1}},
      "spaces": {"V": {"mesh": "m", "element": "P1"}},
      "terminals": {"c": {"kind": "coefficient", "space": "V"}},
      "forms": {"f0": {"op": "integral", "integrand": {"ref": "c"}, "measure": "dx"}},
      "requests": [{"target": "f0", "action": "assemble"}]
    }"#;
    let p = write_scenario(dir.path(), text);
    let o = run(&["assemble", p.to_str().unwrap(), "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MISSING_VALUES"), "{}", stderr(&o));
}

#[test]
fn cyclic_references_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario_path("mass.json")).unwrap().replace(
        "\"forms\": {",
        "\"forms\": { \"a\": {\"op\": \"scale\", \"factor\": 2.0, \"arg\": {\"ref\": \"b\"}}, \
         \"b\": {\"op\": \"scale\", \"factor\": 2.0, \"arg\": {\"ref\": \"a\"}},",
    );
    let text = text.replace("\"target\": \"mass\"", "\"target\": \"a\"");
    let p = write_scenario(dir.path(), &text);
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("CYCLE"), "{}", stderr(&o));
}

#[test]
fn quadrature_override() {
    let (o, _) = assemble_one("mass.json", "mass.tensor", &["--quadrature-degree", "64"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("DEGREE"));
    let (o, t) = assemble_one("mass.json", "mass.tensor", &["--quadrature-degree", "0"]);
    assert!(o.status.success());
    // one midpoint evaluation per cell lumps every entry to 1/4
    assert_eq!(t.unwrap().values(), &[0.25; 4]);
}

#[test]
fn demos_are_deterministic() {
    for name in dualform_cli::demos::NAMES {
        let a = run(&["demo", name]);
        assert_eq!(a.status.code(), Some(0), "{name}: {}", stderr(&a));
        let b = run(&["demo", name]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn demo_outputs() {
    let identity = stdout(&run(&["demo", "delta_identity"]));
    assert!(identity.contains(
        "1.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0\n  \
         0.0000000000000000e0 1.0000000000000000e0 0.0000000000000000e0"
    ));
    let f2 = stdout(&run(&["demo", "F2"]));
    for needle in ["tmp_1", "tmp_2", "tmp_2 @ tmp_1", "max |difference| = 0.0000000000000000e0"] {
        assert!(f2.contains(needle), "{needle}\n{f2}");
    }
    let sum = stdout(&run(&["demo", "cofunction_sum"]));
    assert!(sum.contains("g = f + v*dx"));
}

#[test]
fn unknown_demo_exits_one() {
    let o = run(&["demo", "F5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UNKNOWN_DEMO"));
}

#[test]
fn demo_writes_tensor_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["demo", "delta_matrix", "--output-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let t = tensor_file::parse(&std::fs::read_to_string(dir.path().join("delta_matrix_0.tensor")).unwrap())
        .unwrap();
    assert_eq!(t.values(), &[1.0, 0.0, 0.5, 0.5, 0.0, 1.0]);
}

#[test]
fn dump_round_trips() {
    for file in ["mass.json", "one_form.json", "identity_delta.json", "F2.json", "F3.json"] {
        let original = scenario::parse(&std::fs::read_to_string(scenario_path(file)).unwrap()).unwrap();
        let o = run(&["dump", scenario_path(file).to_str().unwrap()]);
        assert!(o.status.success());
        let dumped = stdout(&o);
        assert_eq!(scenario::parse(&dumped).unwrap(), original, "{file}");
        assert_eq!(scenario::dump(&scenario::parse(&dumped).unwrap()), dumped);
    }
}
