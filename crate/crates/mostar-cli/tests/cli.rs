//! End-to-end tests for the `mostar` binary: one test per exit code, the
//! documented behavior of every subcommand, and byte-level determinism of
//! all machine-readable output across runs and worker counts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mostar::extremal::GhMetadata;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mostar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new("."), args)
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write_graph(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn compute_reports_the_index() {
    let dir = tempfile::tempdir().unwrap();
    let k2 = write_graph(dir.path(), "k2.edges", "0 1\n");
    let out = run(&["compute", &k2]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("mostar = 0"));

    let p4 = write_graph(dir.path(), "p4.edges", "0 1\n1 2\n2 3\n");
    let out = run(&["compute", &p4, "--per-edge", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["mostar"], 4);
    assert_eq!(parsed["per_edge"].as_array().unwrap().len(), 3);

    let out = run(&["--format", "csv", "compute", &p4]);
    let text = stdout_str(&out);
    assert_eq!(text.lines().next(), Some("u,v,n_uv,n_vu,eq,contribution"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_code_3_on_parse_failure_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(dir.path(), "bad.edges", "0 1\n2 2\n");
    let out = run(&["compute", &bad]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 2"),
        "diagnostic should name the line: {err}"
    );
}

#[test]
fn exit_code_2_on_missing_input() {
    let out = run(&["compute", "/nonexistent/zzz.edges"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_writes_edge_list_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("gh.edges");
    let out = run(&[
        "generate",
        "--delta",
        "3",
        "--height",
        "2",
        "--output",
        &out_path.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(
        text.contains("n = 14") && text.contains("m = 21") && text.contains("3-regular = true")
    );

    let edge_text = fs::read_to_string(&out_path).unwrap();
    assert!(edge_text.starts_with("p 14 21\n"));
    let meta_text = fs::read_to_string(dir.path().join("gh.edges.meta.json")).unwrap();
    let meta = GhMetadata::from_json(&meta_text).unwrap();
    assert_eq!((meta.delta, meta.height), (3, 2));
    assert_eq!(meta.black.len(), 10);
    assert_eq!(meta.grey.len(), 4);

    let out = run(&[
        "generate",
        "--delta",
        "4",
        "--height",
        "3",
        "--output",
        &dir.path().join("g43.edges").display().to_string(),
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["n"], 80);
    assert_eq!(parsed["m"], 160);
    assert_eq!(parsed["regular"], true);
}

#[test]
fn exit_code_2_on_generate_guard() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.edges");
    let out = run(&[
        "generate",
        "--delta",
        "2",
        "--height",
        "3",
        "--output",
        &out_path.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "generate",
        "--delta",
        "3",
        "--height",
        "1",
        "--output",
        &out_path.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_rows_and_guards() {
    let out = run(&["bounds", "--delta", "3", "--n", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = parsed["bounds"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let trivial = rows.iter().find(|r| r["name"] == "trivial_upper").unwrap();
    assert_eq!(trivial["value"], 120.0);

    let out = run(&["bounds", "--delta", "3", "--n", "14", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let construction = parsed["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "construction_lower")
        .unwrap()
        .clone();
    assert_eq!(construction["vacuous"], true);
    assert!(construction["value"].as_f64().unwrap() < -3.29e4);

    let out = run(&["bounds", "--delta", "3", "--n", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let asymptotic = parsed["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "asymptotic_upper")
        .unwrap()
        .clone();
    assert_eq!(asymptotic["guarded"], true);
    assert_eq!(asymptotic["value"], 6.0);

    let out = run(&["bounds", "--delta", "3", "--n", "10", "--format", "csv"]);
    let text = stdout_str(&out);
    assert_eq!(text.lines().next(), Some("name,value,guarded,vacuous"));
    assert!(
        text.lines().any(|l| l == "trivial_upper,120,false,false"),
        "{text}"
    );
}

#[test]
fn certify_reports_and_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(dir.path(), "p3.edges", "0 1\n1 2\n");
    let out = run(&["certify", &p3, "--root", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["certificate"], 2);
    assert_eq!(parsed["mostar"], 2);
    assert_eq!(parsed["tight"], true);

    let out = run(&["certify", &p3, "--root", "1", "--format", "csv"]);
    assert_eq!(
        stdout_str(&out),
        "root,certificate,mostar,tight\n1,2,2,true\n"
    );

    let c4 = write_graph(dir.path(), "c4.edges", "0 1\n1 2\n2 3\n3 0\n");
    let out = run(&["certify", &c4, "--all-roots", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["root"], 0);
    assert_eq!(parsed["certificate"], 10);
    assert_eq!(parsed["mostar"], 0);

    let empty = write_graph(dir.path(), "empty.edges", "");
    let out = run(&["certify", &empty, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["certificate"], 0);
    assert_eq!(parsed["mostar"], 0);

    let out = run(&["certify", &p3, "--root", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_guards_and_results() {
    let out = run(&[
        "search",
        "--n",
        "4",
        "--delta",
        "3",
        "--connected-only",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["max_mostar"], 6);
    assert_eq!(parsed["witness_edges"].as_array().unwrap().len(), 3);

    let out = run(&["search", "--n", "9", "--delta", "3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "search",
        "--n",
        "2",
        "--delta",
        "3",
        "--connected-only",
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["max_mostar"], 0);

    let out = run(&[
        "search",
        "--n",
        "5",
        "--delta",
        "3",
        "--connected-only",
        "--table",
    ]);
    let text = stdout_str(&out);
    assert_eq!(text, "n,delta,max_mostar\n2,3,0\n3,3,2\n4,3,6\n5,3,10\n");
}

#[test]
fn verify_passes_on_generated_instance_and_plain_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let gh = dir.path().join("gh.edges");
    let out = run(&[
        "generate",
        "--delta",
        "3",
        "--height",
        "2",
        "--output",
        &gh.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["verify", &gh.display().to_string(), "--gh"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_str(&out));
    assert!(stdout_str(&out).contains("structure_delta_regular"));

    // A plain graph without a sidecar: general checks only. The triangle
    // exercises the equidistant-gap accounting.
    let k3 = write_graph(dir.path(), "k3.edges", "0 1\n0 2\n1 2\n");
    let out = run(&["verify", &k3]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_str(&out));
    assert!(!stdout_str(&out).contains("structure_"));

    let out = run(&["verify", &k3, "--gh"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_1_on_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let gh = dir.path().join("gh.edges");
    let out = run(&[
        "generate",
        "--delta",
        "3",
        "--height",
        "2",
        "--output",
        &gh.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Splice an extra grey-grey edge into both the graph and the sidecar's
    // orientation: the metadata stays loadable, but regularity and the
    // toward-root rule are now violated.
    let text = fs::read_to_string(&gh).unwrap();
    let doctored = text.replace("p 14 21", "p 14 22") + "10 12\n";
    fs::write(&gh, doctored).unwrap();
    let meta_path = dir.path().join("gh.edges.meta.json");
    let mut meta = GhMetadata::from_json(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    meta.orientation.push((10, 12));
    fs::write(&meta_path, meta.to_json()).unwrap();

    let out = run(&["verify", &gh.display().to_string(), "--gh"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout_str(&out));
    let text = stdout_str(&out);
    assert!(text.contains("FAIL structure_delta_regular"), "{text}");
}

/// Every machine-readable output must be byte-identical across repeated
/// runs and across worker counts.
#[test]
fn output_determinism_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let gh = dir.path().join("gh.edges");
    let out = run(&[
        "generate",
        "--delta",
        "3",
        "--height",
        "4",
        "--output",
        &gh.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let gh_path = gh.display().to_string();

    let commands: Vec<Vec<&str>> = vec![
        vec!["compute", &gh_path, "--per-edge", "--format", "json"],
        vec!["compute", &gh_path, "--format", "csv"],
        vec!["bounds", "--delta", "3", "--n", "62", "--format", "json"],
        vec!["certify", &gh_path, "--all-roots", "--format", "json"],
        vec![
            "search",
            "--n",
            "6",
            "--delta",
            "3",
            "--connected-only",
            "--format",
            "json",
        ],
        vec!["search", "--n", "6", "--delta", "4", "--table"],
        vec!["verify", &gh_path, "--gh", "--format", "json"],
    ];
    for args in &commands {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "1"] {
            let mut full = vec!["--threads", threads];
            full.extend_from_slice(args);
            let out = run(&full);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{args:?} with {threads} threads"
            );
            outputs.push(out.stdout);
        }
        assert!(
            outputs.windows(2).all(|w| w[0] == w[1]),
            "nondeterministic output for {args:?}"
        );
    }

    // Generated files are byte-stable as well.
    let again = dir.path().join("gh2.edges");
    let out = run(&[
        "--threads",
        "4",
        "generate",
        "--delta",
        "3",
        "--height",
        "4",
        "--output",
        &again.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&gh).unwrap(), fs::read(&again).unwrap());
    assert_eq!(
        fs::read(dir.path().join("gh.edges.meta.json")).unwrap(),
        fs::read(dir.path().join("gh2.edges.meta.json")).unwrap()
    );

    println!("ACCEPTANCE output_determinism: PASS — {} commands byte-identical across runs and 1/4 workers", commands.len());
}

#[test]
fn threads_flag_and_env_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write_graph(dir.path(), "p3.edges", "0 1\n1 2\n");
    let out = Command::new(env!("CARGO_BIN_EXE_mostar"))
        .env("MOSTAR_THREADS", "2")
        .args(["compute", &p3])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // The flag wins over the environment; an invalid env value under an
    // explicit flag must still fail loudly rather than be silently ignored.
    let out = Command::new(env!("CARGO_BIN_EXE_mostar"))
        .env("MOSTAR_THREADS", "2")
        .args(["--threads", "1", "compute", &p3])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
