use std::path::Path;

use flagforge::cli::run;
use flagforge::complex::koszul;
use flagforge::diffmod::fold;
use flagforge::io::{complex_to_json, dm_from_json, parse_str, to_pretty, Input};
use flagforge::poly::Ring;
use flagforge::field::Field;
use serde_json::Value;

fn flagforge(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut all = vec!["flagforge"];
    all.extend_from_slice(args);
    let code = run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn koszul_xy() -> flagforge::complex::Complex {
    let r = Ring::new(Field::Rational, &["x", "y"]).unwrap();
    koszul(&r, &[r.var(0), r.var(1)]).unwrap()
}

fn write_koszul(dir: &Path) -> String {
    let path = dir.join("koszul.json");
    std::fs::write(&path, to_pretty(&complex_to_json(&koszul_xy()))).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_and_fold() {
    let dir = tempfile::tempdir().unwrap();
    let k = write_koszul(dir.path());
    let (code, out, _) = flagforge(&["check", "--in", &k]);
    assert_eq!(code, 0);
    assert!(out.contains("valid complex"));
    let (code, out, _) = flagforge(&["fold", "--in", &k, "--degree", "0"]);
    assert_eq!(code, 0);
    let dm = dm_from_json(&serde_json::from_str(&out).unwrap()).unwrap();
    assert_eq!(dm, fold(&koszul_xy(), 0));
    match parse_str(&out).unwrap() {
        Input::Dm(d) => assert_eq!(d, dm),
        other => panic!("parsed as {}", other.kind()),
    }
}

#[test]
fn rigidity_window_output() {
    let (code, out, _) = flagforge(&["rigidity-window", "--degrees", "2,2,5,7,9"]);
    assert_eq!(code, 0);
    assert!(out.contains("non-rigid interval [-16, 16]"));
    let (code, out, _) = flagforge(&["rigidity-window", "--degrees", "1,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("[2, 2]"));
    let (code, _, err) = flagforge(&["rigidity-window", "--degrees", "1,1", "--vars", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("NotArtinian"), "{err}");
}

#[test]
fn ext_dims_and_deficiency() {
    let (code, out, _) = flagforge(&["ext-dims", "--degrees", "2,2", "--window", "-4:-2"]);
    assert_eq!(code, 0);
    for line in ["Ext^2_-4\t1", "Ext^2_-3\t2", "Ext^2_-2\t1"] {
        assert!(out.contains(line), "{out}");
    }
    let (code, out, _) = flagforge(&["betti-deficiency", "--ci-degrees", "1,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("deficiency possible only at a in {2}"));
    let (code, out, _) = flagforge(&["betti-deficiency", "--pure", "0,2,3,5"]);
    assert_eq!(code, 0);
    assert!(out.contains("{3}"), "{out}");
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let k = write_koszul(dir.path());
    let read = |name: &str| {
        let p = dir.path().join(name);
        let (code, _, _) = flagforge(&["--json-out", p.to_str().unwrap(), "deform", "--in", &k, "--degree", "2"]);
        assert_eq!(code, 0);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert!(v.as_object_mut().unwrap().remove("timing_ms").is_some());
        v
    };
    let (a, b) = (read("a.json"), read("b.json"));
    assert_eq!(a, b);
    assert_eq!(a["command"], "deform");
    assert_eq!(a["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k = write_koszul(dir.path());
    let text = std::fs::read_to_string(&k).unwrap();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, text.replacen("\"-y\"", "\"-y^2\"", 1)).unwrap();
    assert_ne!(std::fs::read_to_string(&tampered).unwrap(), text);
    let (code, _, err) = flagforge(&["check", "--in", tampered.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("ValidationError(HomogeneityViolation"), "{err}");

    let missing = dir.path().join("missing.json");
    std::fs::write(&missing, r#"{"ring": {"characteristic": 0, "vars": ["x"]}, "twists": [[0]]}"#).unwrap();
    let (code, _, err) = flagforge(&["check", "--in", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("ParseError"), "{err}");

    assert_eq!(flagforge(&["bogus"]).0, 2);
    assert_eq!(flagforge(&["fold", "--in", &k]).0, 2);
    assert_eq!(flagforge(&["check", "--in", "/nonexistent/file.json"]).0, 2);
    assert_eq!(flagforge(&["--help"]).0, 0);
}

#[test]
fn witness_and_homology() {
    let (code, out, _) = flagforge(&["witness", "--degrees", "2,2,3", "--degree", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("(x1*x2*x3^2)*e1^e2"));
    let dir = tempfile::tempdir().unwrap();
    let k = write_koszul(dir.path());
    let dm = dir.path().join("fold.json");
    let (_, out, _) = flagforge(&["fold", "--in", &k, "--degree", "0"]);
    std::fs::write(&dm, out).unwrap();
    let (code, out, _) = flagforge(&["homology", "--in", dm.to_str().unwrap(), "--window", "-1:2"]);
    assert_eq!(code, 0);
    let dims: Vec<&str> = out.lines().filter_map(|l| l.split_whitespace().last()).collect();
    assert_eq!(dims, vec!["0", "1", "0", "0"], "{out}");
}
