use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_leray-persist"));
    c.env_remove("LERAY_THREADS");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_accepts_every_fixture() {
    for name in ["circle", "double_cover", "filtered_circle", "torus_band", "torus_band_filtered", "torus_over_circle"] {
        let o = run(&["check", fixture(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("ok:"));
    }
}

#[test]
fn check_names_a_missing_face() {
    let path = scratch(
        "missing_face.json",
        r#"{"complex": [{"vertices": [0], "level": 1}, {"vertices": [0, 1], "level": 1}],
            "cover": [{"id": 0, "simplices": [[0, 1]]}]}"#,
    );
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing face [1]"), "{}", stderr(&o));
}

#[test]
fn check_reports_an_uncovered_edge() {
    let path = scratch(
        "uncovered.json",
        r#"{"complex": [{"vertices": [0], "level": 1}, {"vertices": [1], "level": 1}, {"vertices": [0, 1], "level": 1}],
            "cover": [{"id": 0, "simplices": [[0]]}, {"id": 1, "simplices": [[1]]}]}"#,
    );
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("misses [0,1]"), "{}", stderr(&o));
}

#[test]
fn parse_errors_give_a_position() {
    let path = scratch("broken.json", "{\n  \"complex\": [\n    {\"vertices\": [0], \"level\": }\n  ]\n}\n");
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn pages_of_the_circle() {
    let c = fixture("circle");
    let o = run(&["pages", "--slice", "0", "--page", "2", c.to_str().unwrap()]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["dims"], serde_json::json!({"(0,0)": 1, "(1,0)": 1}));
    assert_eq!(v["schema_version"], 1);

    let last = run(&["pages", "--slice", "1", c.to_str().unwrap()]);
    assert_eq!(json(&last)["dims"], serde_json::json!({}));

    // every index at or below zero names K_0
    let neg = run(&["pages", "--slice", "-3", c.to_str().unwrap()]);
    assert_eq!(stdout(&neg), stdout(&o));
}

#[test]
fn field_override() {
    let c = fixture("torus_band");
    let o = run(&["pages", "--field", "0", "--page", "1", c.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&o)["field"], "Q");
    let bad = run(&["pages", "--field", "4", c.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("not prime"));
}

#[test]
fn barcode_of_the_filtered_circle() {
    let f = fixture("filtered_circle");
    let svg = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("filtered_circle.svg");
    let o = run(&["barcode", "--degree", "1", "--svg", svg.to_str().unwrap(), f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        json(&o),
        serde_json::json!({"degree": 1, "oracle": [[0, 1]], "spectral": [[0, 1]], "agree": true})
    );
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.contains("<svg") && plot.contains("version=\"1.1\""));
    assert_eq!(plot.matches("<rect").count(), 2);

    let zero = run(&["barcode", "--degree", "0", f.to_str().unwrap()]);
    assert_eq!(json(&zero)["spectral"], serde_json::json!([[0, 2]]));
    let all = run(&["barcode", f.to_str().unwrap()]);
    assert_eq!(json(&all)["degrees"].as_array().unwrap().len(), 2);
}

#[test]
fn empty_complex_has_an_empty_barcode() {
    let path = scratch("empty.json", r#"{"levels": 2, "complex": [], "cover": []}"#);
    let o = run(&["barcode", "--degree", "0", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&o)["spectral"], serde_json::json!([]));
    assert_eq!(json(&o)["oracle"], serde_json::json!([]));
}

#[test]
fn compare_passes_on_fixtures() {
    for name in ["circle", "double_cover", "filtered_circle", "torus_band", "torus_band_filtered", "torus_over_circle"] {
        let o = run(&["compare", fixture(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let v = json(&o);
        assert_eq!(v["ok"], true);
        assert!(v.get("timing_ms").is_none());
    }
    let timed = run(&["compare", "--timing", fixture("circle").to_str().unwrap()]);
    assert!(json(&timed)["timing_ms"].is_u64());
}

#[test]
fn band_cover_helper() {
    let o = run(&["bands", "--vertices", "5", "--bands", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["cover"].as_array().unwrap().len(), 2);
    assert_eq!(v["cover"][0]["simplices"], serde_json::json!([[0, 1], [1, 2]]));
    assert_eq!(v["cover"][1]["simplices"], serde_json::json!([[2, 3], [3, 4]]));

    // wrap the hexagon around a 3-cycle banded into three arcs
    let path = scratch(
        "hexagon_over_triangle.json",
        r#"{"complex": [
              {"vertices": [0], "level": 1}, {"vertices": [1], "level": 1}, {"vertices": [2], "level": 1},
              {"vertices": [3], "level": 1}, {"vertices": [4], "level": 1}, {"vertices": [5], "level": 1},
              {"vertices": [0, 1], "level": 1}, {"vertices": [1, 2], "level": 1}, {"vertices": [2, 3], "level": 1},
              {"vertices": [3, 4], "level": 1}, {"vertices": [4, 5], "level": 1}, {"vertices": [0, 5], "level": 1}],
            "map": [[0, 0], [1, 1], [2, 2], [3, 0], [4, 1], [5, 2]],
            "cover": []}"#,
    );
    let o = run(&["bands", "--vertices", "3", "--bands", "3", "--cyclic", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let banded = scratch("banded.json", &stdout(&o));
    let c = run(&["compare", banded.to_str().unwrap()]);
    assert!(c.status.success(), "{}", stderr(&c));

    let bad = run(&["bands", "--vertices", "3", "--bands", "5"]);
    assert_eq!(bad.status.code(), Some(2));
}
