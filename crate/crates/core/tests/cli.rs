use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn twep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twep")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

const ONE_LOOP: &str = r#"{"A": [[2]], "B": [[1]]}"#;

#[test]
fn ktheory_over_f2() {
    let d = Dir::new();
    let k = d.file("k.json", r#"{"A": [[3]], "B": [[1]], "C": [["1"]]}"#);
    let o = twep(&["--json", "--field", "F2", "ktheory", "--triple", p(&k)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["KH0"], "Z/2");
    assert_eq!(r["KH1"], "Z");
}

#[test]
fn nf_output_can_be_fed_back() {
    let d = Dir::new();
    let k = d.file("k.json", ONE_LOOP);
    let o = twep(&["--json", "katsura-build", "--triple", p(&k)]);
    assert_eq!(code(&o), 0);
    let t = d.file("t.json", &String::from_utf8(o.stdout).unwrap());

    let x = d.file("x.json", r#"[{"alpha": ["e0"], "g": "t", "beta": ["e1"], "coeff": "3"}]"#);
    let first = json(&twep(&["--json", "nf", "--tuple", p(&t), "--element", p(&x)]));
    assert_eq!(first["zero"], false);
    let y = d.file("y.json", &first["element"].to_string());
    let second = json(&twep(&["--json", "nf", "--tuple", p(&t), "--element", p(&y)]));
    assert_eq!(first["element"], second["element"]);

    let relation = d.file(
        "r.json",
        r#"[{"alpha": ["e0"], "g": "1", "beta": ["e0"], "coeff": "1"},
            {"alpha": ["e1"], "g": "1", "beta": ["e1"], "coeff": "1"},
            {"alpha": ["v"], "g": "1", "beta": ["v"], "coeff": "-1"}]"#,
    );
    let z = json(&twep(&["--json", "nf", "--tuple", p(&t), "--element", p(&relation)]));
    assert_eq!(z["zero"], true);
    assert_eq!(z["element"], Value::Array(vec![]));
}

#[test]
fn validate_accepts_good_and_rejects_bad_tuples() {
    let d = Dir::new();
    let good = d.file(
        "good.json",
        r#"{"vertices": ["v"], "edges": [{"id": "a", "src": "v", "rng": "v"}, {"id": "b", "src": "v", "rng": "v"}],
            "group": {"kind": "cyclic", "order": 2},
            "action": {"t": {"edges": {"a": "b", "b": "a"}}},
            "phi": {"t": {"a": "t", "b": "t"}}}"#,
    );
    assert_eq!(code(&twep(&["validate", "--tuple", p(&good)])), 0);
    // φ(t, a) · φ(t, b) has order 2 in Z/2 but the swap needs it trivial.
    let bad = d.file(
        "bad.json",
        r#"{"vertices": ["v"], "edges": [{"id": "a", "src": "v", "rng": "v"}, {"id": "b", "src": "v", "rng": "v"}],
            "group": {"kind": "cyclic", "order": 2},
            "action": {"t": {"edges": {"a": "b", "b": "a"}}},
            "phi": {"t": {"a": "t", "b": "1"}}}"#,
    );
    let o = twep(&["--json", "validate", "--tuple", p(&bad)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_input_is_a_schema_error() {
    let d = Dir::new();
    let k = d.file("k.json", r#"{"A": [[2]], "B": [[1]], "extra": 1}"#);
    let o = twep(&["--json", "ktheory", "--triple", p(&k)]);
    assert_eq!(code(&o), 2);
    assert!(json(&o)["error"].as_str().unwrap().contains("extra"));
    let missing = d.0.path().join("missing.json");
    assert_eq!(code(&twep(&["kspi", "--triple", p(&missing)])), 2);
    assert_eq!(code(&twep(&["--field", "F4", "kspi", "--triple", p(&k)])), 2);
}

#[test]
fn katsura_predicates() {
    let d = Dir::new();
    let yes = d.file("yes.json", ONE_LOOP);
    let diag = d.file("diag.json", r#"{"A": [[2]], "B": [[2]]}"#);
    assert_eq!(code(&twep(&["kspi", "--triple", p(&yes)])), 0);
    let o = twep(&["kspi", "--triple", p(&diag)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("diagonal"));

    assert_eq!(code(&twep(&["hausdorff", "--triple", p(&yes)])), 0);
    let cycle = d.file("cycle.json", r#"{"A": [[1, 1], [0, 2]], "B": [[1, 0], [0, 2]]}"#);
    assert_eq!(code(&twep(&["hausdorff", "--triple", p(&cycle)])), 1);

    let kreg = json(&twep(&["--json", "kreg", "--triple", p(&yes)]));
    assert_eq!(kreg["command"], "kreg");
}

#[test]
fn mul_reports_the_twist() {
    let d = Dir::new();
    let t = d.file(
        "t.json",
        r#"{"vertices": ["v"], "edges": [{"id": "e", "src": "v", "rng": "v"}], "field": "F5",
            "group": {"kind": "cyclic", "order": 3},
            "phi": {"t": {"e": "t"}}, "c": {"t": {"e": "2"}}}"#,
    );
    let x = d.file("x.json", r#"[{"alpha": ["v"], "g": "t", "beta": ["v"], "coeff": "1"}]"#);
    let y = d.file("y.json", r#"[{"alpha": ["e"], "g": "1", "beta": ["v"], "coeff": "1"}]"#);
    let o = twep(&["--json", "mul", "--tuple", p(&t), "--element", p(&x), p(&y)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["omega"], "2 mod 5");
}

#[test]
fn stabilize_reports_a_failed_search() {
    let d = Dir::new();
    let s = d.file("s.json", r#"{"M": [[1]], "N": [[0]], "P": [["2"]]}"#);
    let o = twep(&["--json", "--field", "F7", "stabilize", "--input", p(&s)]);
    assert_eq!(code(&o), 0);
    let o = twep(&["--json", "--field", "F7", "stabilize", "--input", p(&s), "--search-y", "--max-tries", "20"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["search"]["found"], false);
}
