//! The binary against direct library calls.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use setopt_core::{
    make_example, membership_vp, minimal_p, solve_direct, solve_weighted_sum, Concept, ExampleParams, Instance,
    Rational, VpKind,
};

fn setopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setopt")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = setopt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }
    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }
}

fn mfdvp_file(d: &Dir) -> String {
    let p = d.arg("i.json");
    ok(&["example", "mfdvp", "-o", &p]);
    p
}

#[test]
fn example_matches_library() {
    let d = Dir::new();
    let p = mfdvp_file(&d);
    let lib = make_example::<f64>("mfdvp", &ExampleParams::default()).unwrap();
    assert_eq!(read_json(Path::new(&p)), lib.to_json());
    let q = d.arg("e.json");
    ok(&["example", "random_finite", "--seed", "4", "--exact", "--denom", "3", "-o", &q]);
    let lib = make_example::<Rational>("random_finite", &ExampleParams { seed: 4, denom: 3, ..Default::default() }).unwrap();
    assert_eq!(read_json(Path::new(&q)), lib.to_json());
}

#[test]
fn solve_matches_library() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    let out = d.arg("s.json");
    let stdout = ok(&["solve", "-i", &i, "--concept", "type2", "--eps", "0", "-o", &out]);
    assert!(stdout.contains("[0, 1, 2]"), "{stdout}");
    let inst = Instance::<f64>::load(&i).unwrap();
    let lib = solve_direct(&inst, Concept::TypeTwo, &0.0).unwrap();
    assert_eq!(read_json(Path::new(&out)), lib.to_json());

    // the f64 file reads exactly in rational mode
    ok(&["solve", "-i", &i, "--exact", "--concept", "weak", "--eps", "1/2", "-o", &out]);
    let exact = Instance::<Rational>::load(&i).unwrap();
    let lib = solve_direct(&exact, Concept::Weak, &Rational::new(1.into(), 2.into())).unwrap();
    assert_eq!(read_json(Path::new(&out)), lib.to_json());
}

#[test]
fn minimal_p_and_vectorize_match_library() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    let out = d.arg("m.json");
    let stdout = ok(&["minimal-p", "-i", &i, "--x", "0", "--kind", "weak", "-o", &out]);
    assert_eq!(stdout.trim(), "p_star=2");
    let inst = Instance::<f64>::load(&i).unwrap();
    let mut lib = minimal_p(&inst, 0, &0.0, VpKind::Weak).unwrap().to_json();
    lib["x"] = "0".into();
    lib["epsilon"] = 0.0.into();
    lib["kind"] = "weak".into();
    assert_eq!(read_json(Path::new(&out)), lib);

    let v = d.arg("v.json");
    ok(&["vectorize", "-i", &i, "--p", "2", "--kind", "min", "-o", &v]);
    assert_eq!(read_json(Path::new(&v)), membership_vp(&inst, 2, &0.0, VpKind::Min).unwrap().to_json());
}

#[test]
fn weighted_sum_matches_library() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    let out = d.arg("w.json");
    let stdout = ok(&["weighted-sum", "-i", &i, "--weights", "1,1", "-o", &out]);
    assert!(stdout.contains("[1, 2]"));
    let inst = Instance::<f64>::load(&i).unwrap();
    let lib = solve_weighted_sum(&inst, &[vec![1.0, 1.0]]).unwrap();
    let got = read_json(Path::new(&out));
    let expected: Vec<Value> = lib.iter().map(|s| s.to_json()).collect();
    assert_eq!(got["solutions"], Value::Array(expected));
    assert_eq!(setopt(&["weighted-sum", "-i", &i, "--weights", "-1,0"]).status.code(), Some(2));
}

#[test]
fn plot_draws_every_point() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    let svg = d.path("i.svg");
    ok(&["plot", "-i", &i, "-o", svg.to_str().unwrap()]);
    let s = std::fs::read_to_string(&svg).unwrap();
    assert!(s.contains(r#"version="1.1""#));
    assert_eq!(s.matches(r#"class="image""#).count(), 3);
    assert_eq!(s.matches("<circle").count(), 6);
}

#[test]
fn csv_reports_have_one_row_per_decision() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    let c = d.path("s.csv");
    ok(&["solve", "-i", &i, "-o", c.to_str().unwrap()]);
    let text = std::fs::read_to_string(&c).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "label,member,threshold");
    assert_eq!(lines.len(), 4);
    assert_eq!(setopt(&["minimal-p", "-i", &i, "--x", "0", "-o", d.path("m.csv").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn discretize_then_distance() {
    let d = Dir::new();
    let i = d.arg("r.json");
    ok(&["example", "random_finite", "--seed", "2", "--max-image", "6", "-o", &i]);
    let dz = d.arg("d.json");
    ok(&["discretize", "-i", &i, "--eps", "0.5", "-o", &dz]);
    let out = d.arg("dist.json");
    ok(&["distance", "-i", &i, "--to", &dz, "-o", &out]);
    assert!(read_json(Path::new(&out))["distance"].as_f64().unwrap() <= 0.5 + 1e-12);
    let p = ok(&["covering-p", "-i", &i, "--eps", "1"]);
    assert!(p.starts_with("p="));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    for args in [
        vec!["verify", "--exact", "--count", "2", "--polytopes", "1", "--size", "4", "--max-image", "3"],
        vec!["convex-exp", "--count", "2", "--grid", "5"],
        vec!["plot", "-i", i.as_str()],
        vec!["vectorize", "-i", i.as_str(), "--p", "3"],
    ] {
        let a = d.arg("a.out");
        let b = d.arg("b.out");
        let mut first = args.clone();
        first.extend(["-o", a.as_str()]);
        let mut second = args.clone();
        second.extend(["-o", b.as_str()]);
        let sa = ok(&first);
        let sb = ok(&second);
        assert_eq!(sa, sb);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let d = Dir::new();
    let i = mfdvp_file(&d);
    assert_eq!(setopt(&["solve", "-i", &i, "--bogus"]).status.code(), Some(2));
    assert_eq!(setopt(&["solve"]).status.code(), Some(2));
    assert_eq!(setopt(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(setopt(&["solve", "-i", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(setopt(&["solve", "-i", &i, "--eps", "-1"]).status.code(), Some(2));
    assert_eq!(setopt(&["example", "nope"]).status.code(), Some(2));
    assert_eq!(setopt(&["--help"]).status.code(), Some(0));

    let r = d.arg("r.json");
    let args = ["verify", "--count", "1", "--polytopes", "0", "--size", "4", "--max-image", "3"];
    let mut faulty = args.to_vec();
    faulty.extend(["--inject-fault", "-o", &r]);
    assert_eq!(setopt(&faulty).status.code(), Some(1));
    let rep = read_json(Path::new(&r));
    assert_eq!(rep["failures"][0]["check"], "golden.mfdvp_oracle");
    assert!(rep["failures"][0]["counterexample"]["instance"].is_object());
    assert!(rep.get("elapsed_ms").is_none());
    assert_eq!(setopt(&args).status.code(), Some(0));
}
