mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qfern::graph::{families, format_graph, parse_graph};
use qfern::rewire::RewiringReport;
use qfern::spectral::{decompose, graph_total_resistance};
use qfern::sync::{einf_norm_condition, DesyncReport, FrequencyVector, Stabilization};
use serde_json::Value;

use support::{random_instance, write_graph};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfern"))
        .current_dir(dir)
        .env_remove("QFERN_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_writes_directed_header_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate", "-n", "10", "-p", "0.3", "--seed", "42", "-o", "g.txt",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert_eq!(text.lines().next(), Some("n 10 directed"));
    let g = parse_graph(&text).unwrap();
    assert_eq!(g, qfern::graph::random_dag(10, 0.3, 42).unwrap());

    let manifest = json(dir.path().join("g.txt.manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["params"]["n"], 10);
    assert_eq!(manifest["outputs"][0]["path"], "g.txt");

    let again = run(
        dir.path(),
        &[
            "generate", "-n", "10", "-p", "0.3", "--seed", "42", "-o", "h.txt",
        ],
    );
    assert_eq!(code(&again), 0);
    assert_eq!(text, fs::read_to_string(dir.path().join("h.txt")).unwrap());
}

#[test]
fn generate_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["generate", "-n", "1", "-p", "0.3", "-o", "g.txt"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("n = 1 must be >= 2"));
    let out = run(
        dir.path(),
        &["generate", "-n", "5", "-p", "1.5", "-o", "g.txt"],
    );
    assert_eq!(code(&out), 2);
    let out = run(dir.path(), &["generate", "-n", "5"]);
    assert_eq!(code(&out), 2);
    fs::write(dir.path().join("blocker"), "").unwrap();
    let blocked = run(
        dir.path(),
        &["generate", "-n", "5", "-p", "0.5", "-o", "blocker/g.txt"],
    );
    assert_eq!(code(&blocked), 3);
}

#[test]
fn analyze_path_three() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("p3.txt"), &families::path(3));
    let out = run(dir.path(), &["analyze", "p3.txt"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["lambda2"].as_f64(), Some(1.0));
    assert_eq!(report["r_total"].as_f64(), Some(8.0));
    assert_eq!(report["cheeger_method"], "exact");
    assert_eq!(report["symmetrized"], false);
}

#[test]
fn analyze_disconnected_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("d.txt"),
        "n 5 undirected\n0 1 1\n2 3 1\n3 4 1\n",
    )
    .unwrap();
    let out = run(dir.path(), &["analyze", "d.txt"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("2 components"));
}

#[test]
fn analyze_matches_library_on_random_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = random_instance(77, 12, 12, 0.3, 0.5, true);
    write_graph(&dir.path().join("g.txt"), &g);
    let out = run(dir.path(), &["analyze", "g.txt", "-o", "report.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(dir.path().join("report.json"));
    let d = decompose(&g).unwrap();
    let close = |v: &Value, x: f64| (v.as_f64().unwrap() - x).abs() <= 1e-11 * x.abs().max(1.0);
    assert!(close(&report["lambda2"], d.lambda2()));
    assert!(close(
        &report["r_total"],
        graph_total_resistance(&g).unwrap()
    ));
    for (v, x) in report["fiedler"]
        .as_array()
        .unwrap()
        .iter()
        .zip(d.fiedler())
    {
        assert!(close(v, x));
    }
    let cut = qfern::cuts::cheeger_exact(&g, qfern::cuts::Normalization::MinSide).unwrap();
    assert!(close(&report["cheeger"]["ratio"], cut.ratio));
    assert_eq!(
        report["cheeger"]["side_a"],
        serde_json::to_value(&cut.side_a).unwrap()
    );
    assert!(dir.path().join("report.json.manifest.json").exists());
}

#[test]
fn analyze_symmetrizes_directed_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.txt"), "n 3 directed\n0 1 2\n1 2 2\n").unwrap();
    let out = run(dir.path(), &["analyze", "d.txt"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["symmetrized"], true);
    assert!(report["note"].as_str().unwrap().contains("symmetrized"));
    assert_eq!(report["lambda2"].as_f64(), Some(1.0));
}

#[test]
fn malformed_and_missing_inputs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "n 3 undirected\n0 1 -2\n").unwrap();
    let out = run(dir.path(), &["analyze", "bad.txt"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 2"));
    assert_eq!(code(&run(dir.path(), &["analyze", "missing.txt"])), 3);
    assert_eq!(
        code(&run(dir.path(), &["rewire", "missing.txt", "-o", "x"])),
        3
    );
}

#[test]
fn rewire_outputs_and_monotone_trace() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(4, 4));
    let out = run(
        dir.path(),
        &[
            "rewire", "b.txt", "--seed", "0", "--iters", "50", "-o", "out/r",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for suffix in [
        "final.txt",
        "asoft.csv",
        "report.json",
        "trace.csv",
        "before.dot",
        "after.dot",
        "manifest.json",
    ] {
        assert!(
            dir.path().join(format!("out/r.{suffix}")).exists(),
            "{suffix}"
        );
    }
    let trace = fs::read_to_string(dir.path().join("out/r.trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("step,h,lambda2,r_total,accepted"));
    let h: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!h.is_empty());
    assert!(h.windows(2).all(|w| w[1] >= w[0]));

    let report: RewiringReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/r.report.json")).unwrap())
            .unwrap();
    let final_graph =
        parse_graph(&fs::read_to_string(dir.path().join("out/r.final.txt")).unwrap()).unwrap();
    assert_eq!(report.final_graph.edges().len(), final_graph.edge_count());
    assert!(report.final_h > 0.25);

    let asoft = fs::read_to_string(dir.path().join("out/r.asoft.csv")).unwrap();
    assert_eq!(asoft.lines().count(), 8);
    assert!(asoft.lines().all(|l| l.split(',').count() == 8));
}

#[test]
fn rewire_rejects_zero_iterations_and_complete_graphs() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(4, 4));
    assert_eq!(
        code(&run(
            dir.path(),
            &["rewire", "b.txt", "--iters", "0", "-o", "r"]
        )),
        2
    );
    assert_eq!(
        code(&run(
            dir.path(),
            &["rewire", "b.txt", "--alpha", "-1", "-o", "r"]
        )),
        2
    );
    write_graph(&dir.path().join("k5.txt"), &families::complete(5));
    let out = run(dir.path(), &["rewire", "k5.txt", "-o", "r"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("no candidate edges"));
}

#[test]
fn rejected_swap_leaves_graph_unchanged() {
    // Any removal from a star isolates a leaf and the best reconnection is
    // the removed spoke itself, which never strictly improves.
    let dir = tempfile::tempdir().unwrap();
    let star = format_graph(&families::star(6));
    fs::write(dir.path().join("s.txt"), &star).unwrap();
    let out = run(
        dir.path(),
        &["rewire", "s.txt", "--alpha", "0", "--iters", "1", "-o", "r"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(dir.path().join("r.final.txt")).unwrap(),
        star
    );
}

#[test]
fn sync_flags_cross_pairs_and_stabilizes() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(4, 4));
    let out = run(
        dir.path(),
        &["sync", "b.txt", "--omega-seed", "0", "-o", "s"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: DesyncReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.desync.json")).unwrap())
            .unwrap();
    assert!(!report.is_empty());
    assert!(report.flagged_pairs.iter().all(|p| (p.u < 4) != (p.v < 4)));
    let s: Stabilization =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.stabilizer.json")).unwrap())
            .unwrap();
    assert!(s.max_flagged_r_after < s.max_flagged_r_before);
    let stabilized =
        parse_graph(&fs::read_to_string(dir.path().join("s.stabilized.txt")).unwrap()).unwrap();
    assert_eq!(stabilized.node_count(), 9);
    let after = fs::read_to_string(dir.path().join("s.after.dot")).unwrap();
    qfern_testkit::check_dot(&after).unwrap();
    assert!(after.contains("stabilizer"));
    let csv = fs::read_to_string(dir.path().join("s.flagged.csv")).unwrap();
    assert_eq!(csv.lines().count(), report.flagged_pairs.len() + 1);
    assert!(!dir.path().join("s.simulation.json").exists());
}

#[test]
fn sync_zero_frequencies_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(3, 3));
    fs::write(dir.path().join("w.txt"), "0\n0\n0\n0\n0\n0\n").unwrap();
    let out = run(
        dir.path(),
        &[
            "sync",
            "b.txt",
            "--omega",
            "w.txt",
            "--threshold",
            "100",
            "-o",
            "s",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let analysis = json(dir.path().join("s.sync.json"));
    assert_eq!(analysis["stable"], true);
    assert_eq!(analysis["einf_norm"].as_f64(), Some(0.0));
    assert!(stderr(&out).contains("stabilizer skipped"));
    assert!(!dir.path().join("s.stabilized.txt").exists());
    let manifest = json(dir.path().join("s.manifest.json"));
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn sync_simulation_agrees_on_trees() {
    let dir = tempfile::tempdir().unwrap();
    let tree = families::random_tree(6, 11);
    write_graph(&dir.path().join("t.txt"), &tree);
    let omega = FrequencyVector::random(6, 3).unwrap();
    let base = einf_norm_condition(&tree, &omega).unwrap().einf_norm;
    for (name, target) in [("lo", 0.6), ("hi", 1.4)] {
        let scaled = omega.scaled(target / base);
        let text: String = scaled.values().iter().map(|x| format!("{x}\n")).collect();
        fs::write(dir.path().join(format!("{name}.txt")), text).unwrap();
        let out = run(
            dir.path(),
            &[
                "sync",
                "t.txt",
                "--omega",
                &format!("{name}.txt"),
                "--simulate",
                "--t-max",
                "400",
                "-o",
                name,
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let record = json(dir.path().join(format!("{name}.simulation.json")));
        assert_eq!(record["is_tree"], true);
        assert_eq!(record["verdicts_agree"], true);
        assert_eq!(record["predicted_locked"], target < 1.0);
    }
}

#[test]
fn sync_argument_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(4, 4));
    let base = ["sync", "b.txt", "--omega-seed", "0", "-o", "s"];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        code(&run(dir.path(), &args))
    };
    assert_eq!(with(&["--quantile", "1.5"]), 2);
    assert_eq!(with(&["--quantile", "0"]), 2);
    assert_eq!(with(&["-k", "1"]), 2);
    assert_eq!(with(&["-k", "9"]), 2);
    assert_eq!(with(&["--weight", "0"]), 2);
    assert_eq!(with(&["--threshold", "1", "--quantile", "0.5"]), 2);
    assert_eq!(with(&["--dt", "0", "--simulate"]), 2);
    assert_eq!(code(&run(dir.path(), &["sync", "b.txt", "-o", "s"])), 2);

    fs::write(dir.path().join("short.txt"), "0.5\n-0.5\n").unwrap();
    let out = run(
        dir.path(),
        &["sync", "b.txt", "--omega", "short.txt", "-o", "s"],
    );
    assert_eq!(code(&out), 3);
    fs::write(dir.path().join("d.txt"), "n 4 undirected\n0 1 1\n2 3 1\n").unwrap();
    assert_eq!(
        code(&run(
            dir.path(),
            &["sync", "d.txt", "--omega-seed", "0", "-o", "s"]
        )),
        4
    );
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("p.txt"), &families::path(4));
    let out = Command::new(env!("CARGO_BIN_EXE_qfern"))
        .current_dir(dir.path())
        .env("QFERN_THREADS", "0")
        .args(["analyze", "p.txt"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_qfern"))
        .current_dir(dir.path())
        .env("QFERN_THREADS", "2")
        .args(["analyze", "p.txt"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn json_floats_carry_twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("b.txt"), &families::barbell(3, 4));
    let out = run(dir.path(), &["analyze", "b.txt"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    for v in report["fiedler"].as_array().unwrap() {
        let x = v.as_f64().unwrap();
        assert_eq!(x, qfern::fmt::round_sig12(x));
    }
}
