use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chainflow::model::{load_plan, save_plan};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn chainflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainflow"))
        .args(args)
        .env_remove("CHAINFLOW_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(out: &Output, name: &str) -> f64 {
    let text = stdout(out);
    let line = text
        .lines()
        .find(|l| l.split('\t').next() == Some(name))
        .unwrap_or_else(|| panic!("no `{name}` in\n{text}"));
    line.split('\t').nth(1).unwrap().parse().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_ok_violations_and_missing_files() {
    let ok = chainflow(&["validate", s(&data("auto14.json"))]);
    assert_eq!(code(&ok), 0);
    assert!(stdout(&ok).contains("valid (14 entities"), "{}", stdout(&ok));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    let text = std::fs::read_to_string(data("auto14.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["edges"][0]["capacity"] = serde_json::json!(-1.0);
    std::fs::write(&broken, value.to_string()).unwrap();
    let bad = chainflow(&["validate", s(&broken)]);
    assert_eq!(code(&bad), 1);
    assert!(!stdout(&bad).trim().is_empty());

    let missing = chainflow(&["validate", s(&dir.path().join("nope.json"))]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn solve_writes_a_plan_and_penalties_never_lower_the_objective() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let flat = chainflow(&["solve", s(&data("auto14.json")), "--policy", "1:0", "-o", s(&plan)]);
    assert_eq!(code(&flat), 0, "{}", String::from_utf8_lossy(&flat.stderr));
    let doc = load_plan(&plan).unwrap();
    assert_eq!(doc.objective, Some(field(&flat, "objective")));

    let heavy = chainflow(&["solve", s(&data("auto14.json")), "--policy", "1:500"]);
    assert_eq!(code(&heavy), 0);
    assert!(field(&heavy, "objective") >= field(&flat, "objective") - 1e-6);
}

#[test]
fn export_mps_writes_without_solving() {
    let dir = tempfile::tempdir().unwrap();
    let mps = dir.path().join("auto14.mps");
    let out = chainflow(&["solve", s(&data("auto14.json")), "--export-mps", s(&mps)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&mps).unwrap();
    assert!(text.starts_with("NAME") && text.trim_end().ends_with("ENDATA"));
    assert!(!stdout(&out).contains("status"));
}

#[test]
fn simulate_defaults_match_the_documented_values() {
    let help = stdout(&chainflow(&["simulate", "--help"]));
    assert!(help.contains("[default: 0.3]"), "{help}");
    assert!(help.contains("[default: 300]"), "{help}");

    let dir = tempfile::tempdir().unwrap();
    let out = chainflow(&[
        "simulate",
        s(&data("auto14.json")),
        s(&data("auto14_baseline_plan.json")),
        "-o",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(field(&out, "replications"), 300.0);
    let rows = std::fs::read_to_string(dir.path().join("replications.csv")).unwrap();
    // One row per replication and customer-product pair.
    assert_eq!(rows.lines().count(), 1 + 300 * 2);
}

#[test]
fn zero_sigma_single_replication_is_the_planned_lateness() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    // With tripled distributor leads and no lateness penalty the cheapest plan is late.
    let inst = dir.path().join("slow.json");
    let base = chainflow::instance::load_instance(data("auto14.json")).unwrap();
    let slow = chainflow::instance::apply_disruption(&base, &chainflow::Disruption::lead_time("D1", 3.0)).unwrap();
    chainflow::instance::save_instance(&slow, &inst).unwrap();
    assert_eq!(code(&chainflow(&["solve", s(&inst), "--policy", "none", "-o", s(&plan)])), 0);

    let doc = load_plan(&plan).unwrap();
    let mut planned = 0.0;
    for c in slow.entities.iter().filter(|e| e.kind == chainflow::EntityKind::Customer) {
        for k in c.demand.keys() {
            let due = c.due_time_of(k).unwrap();
            planned += doc
                .plan
                .used_edges()
                .iter()
                .filter(|(_, to, kk)| to == &c.id && kk == k)
                .map(|key| (doc.plan.a[key] - due).max(0.0))
                .fold(0.0, f64::max);
        }
    }
    let out = chainflow(&["simulate", s(&inst), s(&plan), "--sigma", "0", "--reps", "1", "-o", s(dir.path())]);
    assert_eq!(code(&out), 0);
    assert!((field(&out, "mean_total_lateness") - planned).abs() <= 1e-9);
    assert!(planned > 0.0);
}

#[test]
fn seeded_simulation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let (inst, plan) = (data("auto14.json"), data("auto14_baseline_plan.json"));
        let args = [
            "simulate",
            s(&inst),
            s(&plan),
            "--seed",
            "42",
            "--reps",
            "50",
            "-o",
            s(&out_dir),
        ];
        assert_eq!(code(&chainflow(&args)), 0);
        std::fs::read(out_dir.join("replications.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn infeasible_plan_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = load_plan(data("auto14_baseline_plan.json")).unwrap();
    let key = doc.plan.used_edges().into_iter().next().unwrap();
    *doc.plan.y.get_mut(&key).unwrap() += 1000.0;
    let plan = dir.path().join("bad.json");
    save_plan(&doc, &plan).unwrap();
    let out = chainflow(&["simulate", s(&data("auto14.json")), s(&plan), "-o", s(dir.path())]);
    assert_eq!(code(&out), 3);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("file");
    std::fs::write(&file, "").unwrap();
    let out = chainflow(&[
        "simulate",
        s(&data("auto14.json")),
        s(&data("auto14_baseline_plan.json")),
        "-o",
        s(&file.join("sub")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn identity_sweep_keeps_every_network() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("identity.cfg");
    let text = format!(
        "instance = {:?}\npolicies = [\"none\", \"1:500\"]\nreplications = 10\nmaster_seed = 1\n\
         [[variants]]\ntopology = \"tree\"\n\
         [[disruptions]]\nentity = \"S1\"\nlead_time_multiplier = 1.0\n",
        s(&data("desk.json"))
    );
    std::fs::write(&cfg, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = chainflow(&["sweep", s(&cfg), s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let mut lines = report.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "label").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let labels: Vec<&str> = rows.iter().map(|r| r[col]).filter(|l| !l.is_empty()).collect();
    assert_eq!(labels, ["K", "K"]);
    assert!(out_dir.join("plans").read_dir().unwrap().count() >= 2);
}
