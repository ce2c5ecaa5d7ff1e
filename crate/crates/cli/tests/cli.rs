use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvagraph")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn curvature_of_heptagonal_ball() {
    let o = run(&["curvature", "--gen", "pq:7,3", "--radius", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("kappa_V = -1/6 at all evaluated vertices"), "{text}");
    assert!(text.contains("gap: holds"));
}

#[test]
fn eigensearch_finds_alternating_cycle() {
    let file = fixture("octa_hub.pg");
    let o = run(&["eigensearch", "--file", file.to_str().unwrap(), "--horizon", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("lambda = 6, support size 4"), "{text}");
    assert!(text.contains("0:1 1:-1 2:1 3:-1"));
}

#[test]
fn gauss_bonnet_on_cube() {
    let file = fixture("cube.pg");
    let o = run(&["gauss-bonnet", "--file", file.to_str().unwrap(), "--all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sum = 2 exact"));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["curvature"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--gen", "pq:7,3", "--radius", "0"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--gen", "pq:7,3", "--eps", "-1/3"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--gen", "hexagons"]).status.code(), Some(2));
    assert_eq!(run(&["curvature", "--file", "/nonexistent/map.pg"]).status.code(), Some(2));
    let o = run(&["cutlocus", "--gen", "pq:7,3", "--radius", "3", "--horizon", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn broken_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.pg");
    std::fs::write(&path, "v 0: 1\nv 1: 2\n").unwrap();
    let o = run(&["classify", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn octahedron_has_a_cut_locus() {
    let o = run(&["cutlocus", "--gen", "octahedron", "--horizon", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["admissibility", "--gen", "octahedron", "--horizon", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("property (2): FAIL"));
}

#[test]
fn hyperbolic_checks_pass() {
    for args in [
        &["admissibility", "--gen", "pq:7,3", "--radius", "6"][..],
        &["cutlocus", "--gen", "pq:4,5", "--radius", "6"],
        &["growth", "--gen", "pq:7,3", "--radius", "7", "--horizon", "6"],
        &["bigons", "--gen", "pq:7,3", "--radius", "6", "--horizon", "4"],
        &["cheeger", "--gen", "pq:3,7", "--radius", "5", "--horizon", "2", "--k", "5"],
        &["polar", "--gen", "pq:7,3", "--radius", "5"],
        &["eigensearch", "--gen", "tree:3", "--radius", "6"],
        &["classify", "--gen", "pq:4,5", "--radius", "4"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn spectrum_on_tree() {
    let o = run(&["spectrum", "--gen", "tree:3", "--radius", "6", "--horizon", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("bound (combinatorial): 3 - 2√2"), "{text}");
    assert!(text.contains("bounds hold: true"));
}

#[test]
fn embedding_of_a_tree_ball() {
    let o = run(&["embed", "--gen", "tree:3", "--radius", "8", "--k", "2", "--horizon", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn json_reports_are_reproducible() {
    let args = ["polar", "--gen", "pq:7,3", "--radius", "5", "--seed", "7", "--json"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["command"], "polar");
    assert_eq!(v["reconstruction_agreed"], 10);
    assert_eq!(v["finding"], false);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["growth", "--gen", "pq:7,3", "--radius", "5", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["factor"], "1/2");
    assert_eq!(v["sphere_sizes"][1], 7);
}
