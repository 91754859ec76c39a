use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("foldcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foldcheck")).args(args).env_remove("FOLDCHECK_THREADS").output().unwrap()
}

fn check(name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn foldable_exits_zero_with_witness() {
    let w = scratch("a_witness.json");
    let out = check("instance_a.fold", &["--witness", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "foldable");
    assert_eq!(r["ply"], 2);
    assert_eq!(r["width"], 1);
    assert!(r["timings"].is_array());
    let w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w).unwrap()).unwrap();
    assert_eq!(w["foldable"], true);
    assert_eq!(w["cells"]["1"], serde_json::json!([0, 1]));
}

#[test]
fn infeasible_exits_one() {
    let out = check("mmmm_vertex.fold", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["verdict"], "not-foldable");
}

#[test]
fn kawasaki_violation_exits_two_and_names_crease() {
    let out = check("kawasaki_violation.fold", &[]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["verdict"], "not-locally-flat");
    assert!(r["inconsistent_crease"].is_u64());
    assert!(r.get("ply").is_none());
    assert!(r.get("width").is_none());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&format!("crease {}", r["inconsistent_crease"])), "{stderr}");
}

#[test]
fn bad_input_exits_three() {
    let bad = scratch("bad.fold");
    std::fs::write(&bad, r#"{"vertices_coords": [[0,0],[1,0],[1,1],[0,1]], "edges_vertices": [[0,1],[1,2],[2,3],[3,0]], "edges_assignment": ["B","B","B","X"]}"#).unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown assignment"));

    let crossing = scratch("crossing.fold");
    std::fs::write(
        &crossing,
        r#"{"vertices_coords": [[0,0],[2,0],[2,2],[0,2]], "edges_vertices": [[0,1],[1,2],[2,3],[3,0],[0,2],[1,3]],
            "edges_assignment": ["B","B","B","B","M","V"]}"#,
    )
    .unwrap();
    assert_eq!(run(&["check", crossing.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["check", "/nonexistent/file.fold"]).status.code(), Some(3));
    assert_eq!(run(&["check"]).status.code(), Some(3));
}

#[test]
fn unwritable_artifact_exits_four() {
    let out = check("instance_a.fold", &["--svg", "/nonexistent/dir/out.svg"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn ignoring_labels_is_more_permissive() {
    let out = check("mmmm_vertex.fold", &["--ignore-labels"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["mode"], "ignore-labels");
    for f in ["instance_a.fold", "mmmv_vertex.fold", "crimp.fold", "square.fold"] {
        assert_eq!(check(f, &["--ignore-labels"]).status.code(), Some(0), "{f}");
    }
}

#[test]
fn svg_and_decomposition_outputs() {
    let svg = scratch("crimp.svg");
    let dec = scratch("crimp_td.json");
    let arr = scratch("crimp_arr.json");
    let out = check(
        "crimp.fold",
        &["--svg", svg.to_str().unwrap(), "--decomposition", dec.to_str().unwrap(), "--arrangement", arr.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("max ply: 3"));
    assert_eq!(text.matches("<polygon").count(), 1);
    let td: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dec).unwrap()).unwrap();
    assert_eq!(td["width"], 1);
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&arr).unwrap()).unwrap();
    assert_eq!(a["ply"], 3);
}

#[test]
fn stats_json_lists_nodes() {
    let out = check("instance_a.fold", &["--stats-json"]);
    let r = report(&out);
    let nodes = r["node_stats"].as_array().unwrap();
    assert_eq!(nodes.len(), r["nice_nodes"].as_u64().unwrap() as usize);
    assert!(report(&check("instance_a.fold", &[])).get("node_stats").is_none());
}

#[test]
fn oracle_flag_reports_agreement() {
    let r = report(&check("mmmv_vertex.fold", &["--oracle"]));
    assert_eq!(r["oracle"]["agrees"], true);
    let r = report(&check("mmmv_vertex.fold", &["--oracle", "--oracle-budget", "1"]));
    assert_eq!(r["oracle"]["verdict"], "skipped");
}

#[test]
fn cross_check_messages() {
    let a = fixture("instance_a.fold");
    let out = run(&["cross-check", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("agree: foldable"));

    let m = fixture("mmmm_vertex.fold");
    let out = run(&["cross-check", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("agree: infeasible"));

    let big = scratch("accordion5.fold");
    assert!(run(&["gen", "--kind", "accordion", "--n", "5", "-o", big.to_str().unwrap()]).status.success());
    let out = run(&["cross-check", big.to_str().unwrap(), "--oracle-budget", "100"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("oracle skipped (budget)"));
}

#[test]
fn gen_writes_checkable_patterns() {
    for (kind, extra) in [
        ("accordion", vec!["--n", "4"]),
        ("map-grid", vec!["--rows", "2", "--cols", "3"]),
        ("single-vertex", vec!["--angles", "90,90,90,90", "--labels", "MMMV"]),
        ("random-vertex", vec!["--degree", "6"]),
        ("simple-fold", vec!["--folds", "2"]),
    ] {
        let path = scratch(&format!("gen_{kind}.fold"));
        let mut args = vec!["gen", "--kind", kind, "--seed", "5", "-o", path.to_str().unwrap()];
        args.extend(extra);
        assert!(run(&args).status.success(), "{kind}");
        let code = run(&["check", path.to_str().unwrap()]).status.code();
        assert!(matches!(code, Some(0) | Some(1)), "{kind}: {code:?}");
    }
    let stdout = run(&["gen", "--kind", "accordion", "--n", "2"]).stdout;
    assert!(String::from_utf8_lossy(&stdout).contains("\"edges_assignment\": [\"B\""));
    assert_eq!(run(&["gen", "--kind", "single-vertex", "--angles", "90,90,90"]).status.code(), Some(3));
}

#[test]
fn thread_env_fallback() {
    let path = fixture("mmmv_vertex.fold");
    let out = Command::new(env!("CARGO_BIN_EXE_foldcheck"))
        .args(["check", path.to_str().unwrap()])
        .env("FOLDCHECK_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
