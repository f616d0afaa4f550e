use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul-ext"))
        .args(args)
        .current_dir(root())
        .env("KOSZUL_EXT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("valid json");
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

/// One golden report per corpus entry. `KOSZUL_EXT_BLESS=1` rewrites them.
const GOLDEN: &[(&str, &[&str])] = &[
    ("quantum_string", &["resolve", "corpus/quantum_string.alg", "corpus/string.mod", "--n", "4"]),
    ("quantum_xy", &["diagonal", "corpus/quantum_xy.alg", "corpus/cyc.mod", "--n", "6", "--q", "generic"]),
    ("quantum_xy_neg", &["periodicity", "corpus/quantum_xy_neg.alg", "corpus/cyc.mod", "--n", "6", "--window", "8"]),
    ("quantum_xy_gf5", &["cx1", "corpus/quantum_xy_gf5.alg", "corpus/cyc.mod", "--n", "6", "--window", "8"]),
    ("quantum_local", &["center", "corpus/quantum_local.alg", "corpus/period_one.mod", "--n", "6"]),
    ("kx2", &["verify-grcent", "corpus/kx2.alg", "--n", "4"]),
    ("cycle2", &["simple-syzygy", "corpus/cycle2.alg", "--window", "8"]),
    ("cycle3", &["simple-syzygy", "corpus/cycle3.alg", "--window", "8"]),
    ("cycle4", &["simple-syzygy", "corpus/cycle4.alg", "--window", "8"]),
    ("quantum_polynomial", &["ext-simples", "corpus/quantum_polynomial.alg", "--n", "3"]),
];

fn golden_path(name: &str) -> PathBuf {
    root().join("corpus/golden").join(format!("{name}.json"))
}

#[test]
fn golden_reports() {
    let bless = std::env::var_os("KOSZUL_EXT_BLESS").is_some();
    for (name, args) in GOLDEN {
        let got = json(args);
        let path = golden_path(name);
        if bless {
            std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
            continue;
        }
        let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
            .expect("golden json");
        assert_eq!(got, want, "{name} differs from {}", path.display());
    }
}

#[test]
fn reports_are_deterministic() {
    let args = ["ext", "corpus/quantum_string.alg", "corpus/string.mod", "--n", "3"];
    assert_eq!(json(&args), json(&args));
}

#[test]
fn string_module_betti_numbers() {
    let v = json(&["resolve", "corpus/quantum_string.alg", "corpus/string.mod", "--n", "4"]);
    assert_eq!(v["schema"], "koszul-ext/report/v1");
    assert_eq!(v["result"]["betti"], serde_json::json!([2, 2, 2, 2, 2]));
    assert_eq!(v["result"]["linear"], true);
}

#[test]
fn generic_family_has_trivial_diagonal() {
    let v = json(&["diagonal", "corpus/quantum_xy.alg", "corpus/cyc.mod", "--n", "6", "--q", "generic"]);
    assert_eq!(v["result"]["delta_dims"], serde_json::json!([1, 0, 0, 0, 0, 0, 0]));
    assert_eq!(v["inputs"]["algebra"]["units"]["q"], "2");
}

#[test]
fn field_override_changes_the_verdict() {
    let v = json(&["periodicity", "corpus/quantum_xy.alg", "corpus/cyc.mod", "--n", "6", "--field", "GF(5)"]);
    assert_eq!(v["result"]["verdict"]["kind"], "Periodic");
    assert_eq!(v["result"]["verdict"]["period"], 4);
}

#[test]
fn hochschild_of_dual_numbers() {
    let v = json(&["hochschild", "corpus/kx2.alg", "--n", "4"]);
    assert_eq!(v["result"]["dims"], serde_json::json!([2, 1, 1, 1, 1]));
    assert_eq!(v["result"]["delta_dims"], serde_json::json!([1, 0, 1, 0, 1]));
}

#[test]
fn yoneda_product_of_diagonal_classes() {
    let v = json(&["yoneda", "corpus/quantum_string.alg", "corpus/string.mod", "--left", "1,-1,0", "--right", "1,-1,1"]);
    assert_eq!(v["result"]["product_bidegree"], serde_json::json!([2, -2]));
}

#[test]
fn text_output_lists_result_fields() {
    let out = run(&["betti", "corpus/cycle3.alg", "corpus/simple1.mod", "--n", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("betti: [1,1,1,1]"), "{text}");
}

#[test]
fn failed_hypothesis_exits_with_two() {
    let out = run(&["cx1", "corpus/quantum_string.alg", "corpus/string.mod"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not all 1"));
}

#[test]
fn errors_exit_with_one_and_name_the_file() {
    let out = run(&["betti", "corpus/missing.alg", "corpus/string.mod"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.alg"));

    let dir = std::env::temp_dir().join(format!("koszul-ext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.alg");
    std::fs::write(&bad, "field Q\nvertex 1\narrow x: 1 -> 2\n").unwrap();
    let out = run(&["hochschild", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.alg") && err.contains("line 3"), "{err}");
    let _ = std::fs::remove_dir_all(Path::new(&dir));
}
