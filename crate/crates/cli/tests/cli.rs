use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisson-kit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("poisson-kit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const AXIS: &str = r#"
chart R3 (x1, x2, x3)
bivector pi on R3 { [1,2]: "x3", [2,3]: "x1", [3,1]: "x2" }
chart L (t)
map i : L -> R3 ("t", "0", "0")
grid G on L { t: [-1, -1/2, 0, 1/2, 1] }
submanifold S = i in pi grid G
"#;

#[test]
fn whole_catalogue_passes() {
    let o = bin(&["example", "run", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], v["total"]);
}

#[test]
fn toric_leaves_prints_the_count() {
    let p = scratch(
        "triangle.json",
        r#"{"rank": 2, "facets": [{"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0}, {"u": [-1, -1], "c": -1}]}"#,
    );
    let o = bin(&["toric", "--leaves", p.to_str().unwrap(), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "7");
    let o = bin(&["toric", "--leaves", "square", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn non_delzant_polytope_fails_with_vertex() {
    let p = scratch(
        "det2.json",
        r#"{"rank": 2, "facets": [{"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0}, {"u": [-2, -1], "c": -1}]}"#,
    );
    let o = bin(&["toric", "--delzant", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["polytope"]["delzant"]["failing_vertex"]["coords"], serde_json::json!(["1/2", "0"]));
}

#[test]
fn syntax_errors_exit_two_with_position() {
    let p = scratch("bad.dsl", "chart S (x, y)\nbivector pi on S { [1,2] \"x\" }\n");
    let o = bin(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 26"), "{err}");
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    let p = scratch("axis.dsl", AXIS);
    let o = bin(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["S"]["coregular"], "fails");
    assert_eq!(v["schema"], "poisson-kit/1");

    let line = scratch(
        "line.dsl",
        "chart P (x, y)\nbivector pi on P { [1,2]: \"1\" }\nchart L (t)\nmap i : L -> P (\"t\", \"0\")\nsubmanifold S = i in pi\n",
    );
    assert_eq!(bin(&["classify", line.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let p = scratch("axis2.dsl", AXIS);
    let a = bin(&["classify", p.to_str().unwrap(), "--seed", "7"]);
    let b = bin(&["classify", p.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn submersion_that_drops_rank_fails() {
    let p = scratch(
        "psi.dsl",
        r#"
chart S (x1, x2, x3, x4)
bivector pi on S { [1,2]: "1", [3,4]: "1" }
chart M (u, v)
bivector piM on M { [1,2]: "u" }
map psi : S -> M ("x2", "x3*x4 - x1*x2")
grid G on S points { (1, 0, 0, 0) }
submersion P = psi : pi -> piM grid G
"#,
    );
    let o = bin(&["submersion", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lie_and_leaves_subcommands() {
    assert_eq!(bin(&["lie", "--standard", "A2"]).status.code(), Some(0));
    let p = scratch("counts.dsl", "weyl W = A 1\nassociated B = W x 3 hypothesis principal-fibers-zero\n");
    let o = bin(&["leaves", p.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["B"]["leaf_count"], 6);
    let missing = scratch("nohyp.dsl", "associated B = 2 x 3\n");
    assert_eq!(bin(&["leaves", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unknown_example_is_an_input_error() {
    assert_eq!(bin(&["example", "run", "no-such-example"]).status.code(), Some(2));
}
