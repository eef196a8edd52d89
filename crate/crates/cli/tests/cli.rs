use std::path::Path;
use std::process::{Command, Output};

fn finschem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finschem"))
        .args(args)
        .env_remove("FINSCHEM_FIELD")
        .env_remove("FINSCHEM_WINDOW")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn p1_is_not_affine() {
    let o = finschem(&["classify", "--affine", "builtin:p1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("affine: false"));
}

#[test]
fn p1_twist_cohomology_table() {
    let o = finschem(&["--format", "json", "cohomology", "builtin:p1", "--module", "O(-2)", "--window", "-5..5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["table"]["totals"], serde_json::json!([0, 1]));
    assert_eq!(v["options"]["window"], serde_json::json!([-5, 5]));
}

#[test]
fn generated_plane_is_schematic() {
    let dir = tempfile::tempdir().unwrap();
    let g = finschem(&["generate", "p2"]);
    assert_eq!(g.status.code(), Some(0));
    let path = write(dir.path(), "p2.space", &stdout(&g));
    let o = finschem(&["classify", "--schematic", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn generate_parse_print_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["p1", "p2", "doubled_line", "affine_line", "pseudo_circle", "plane_doubled_origin", "point(Q[x])"] {
        let a = stdout(&finschem(&["generate", name]));
        let path = write(dir.path(), "x.space", &a);
        assert_eq!(finschem(&["validate", &path]).status.code(), Some(0), "{name}");
        let f = finschem::serial::parse_space_file(&a, finschem::field::Field::Rationals).unwrap();
        let b = f.to_json();
        let ta: serde_json::Value = serde_json::from_str(&a).unwrap();
        let tb: serde_json::Value = serde_json::from_str(&b).unwrap();
        assert_eq!(ta, tb, "{name}");
    }
}

#[test]
fn field_override_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_finschem"))
        .args(["validate", "builtin:p1"])
        .env("FINSCHEM_FIELD", "F101")
        .env("FINSCHEM_WINDOW", "-3..3")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("# field F101, window [-3, 3]"));
}

#[test]
fn roofs_and_maps() {
    assert_eq!(finschem(&["roof-eq", "builtin:p1", "identity", "swap"]).status.code(), Some(1));
    assert_eq!(finschem(&["roof-eq", "builtin:p1", "swap", "swap"]).status.code(), Some(0));
    let o = finschem(&["classify", "builtin:p1", "--map", "swap", "--quasi-iso"]);
    assert_eq!(o.status.code(), Some(0));
    let o = finschem(&["rfi", "builtin:p1", "--map", "swap"]);
    assert!(stdout(&o).contains("higher direct images vanish: true"));
}

#[test]
fn errors_exit_three_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.space", "{\n  \"points\": [\"a\",\n");
    let o = finschem(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let bad = write(dir.path(), "bad2.space", r#"{"points": ["a"], "stalks": {"a": {"vars": [1]}}}"#);
    let o = finschem(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stalks.a.vars[0]"));
    assert_eq!(finschem(&["generate", "nope"]).status.code(), Some(3));
}

#[test]
fn minimize_reports_removed_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "field": "Q",
      "points": ["c", "u", "v", "w"],
      "order": [["c", "u"], ["c", "v"], ["u", "w"], ["v", "w"]],
      "stalks": {
        "c": {"vars": ["x"], "weights": [1]},
        "u": {"vars": ["x"], "invert": ["x"], "weights": [1]},
        "v": {"vars": ["x"], "invert": ["x - 1"]},
        "w": {"vars": ["x"], "invert": ["x", "x - 1"]}
      },
      "restrictions": [
        {"from": "c", "to": "u", "images": {"x": "x"}, "extra_invert": ["x"]},
        {"from": "c", "to": "v", "images": {"x": "x"}, "extra_invert": ["x - 1"]},
        {"from": "u", "to": "w", "images": {"x": "x"}, "extra_invert": ["x - 1"]},
        {"from": "v", "to": "w", "images": {"x": "x"}, "extra_invert": ["x"]}
      ]
    }"#;
    let path = write(dir.path(), "cover.space", text);
    let o = finschem(&["--format", "json", "minimize", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["removed"], serde_json::json!(["c"]));
}
