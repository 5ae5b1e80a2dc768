//! Regenerates the frozen files under `data/` and `data/golden/`.
//!
//! Run from the workspace root: `cargo run -p chainflow-core --example freeze_goldens`.
//! The checked-in files are the reference; rerunning should leave `git status` clean.

use std::fs;
use std::path::Path;

use chainflow::instance::{load_instance, save_instance};
use chainflow::milp::{brute_force_milp, DEFAULT_BINARY_LIMIT};
use chainflow::model::{
    build_model, evaluate_objective, extract_solution, normalize_schedule, save_plan, solve_instance, PlanDocument,
};
use chainflow::sim::{replication_rng, run_replications, simulate_once, DEFAULT_REPLICATIONS};
use chainflow::synth::random_instance_seeded;
use chainflow::{write_atomic, LatenessPolicy, LeadTimeModel, SolveOptions, Solver};

fn main() -> chainflow::Result<()> {
    let data = Path::new("data");
    let golden = data.join("golden");
    fs::create_dir_all(&golden).expect("create data/golden");
    let policy = LatenessPolicy::penalized(1.0, 0.0)?;

    // The first synthesized instance with exactly 12 free binaries whose optimum pays a
    // late-delivery penalty.
    let (seed, inst) = (0u64..)
        .find_map(|seed| {
            let inst = random_instance_seeded(seed);
            let (program, _, _) = build_model(&inst, &policy).ok()?;
            if program.free_binaries().len() != 12 {
                return None;
            }
            let sol = solve_instance(&inst, &policy, Solver::BranchAndBound, &SolveOptions::default()).ok()?;
            let late = sol.plan.as_ref()?.z.values().any(|&z| z > 0.5);
            late.then_some((seed, inst))
        })
        .expect("some seed qualifies");
    save_instance(&inst, data.join("regression12.json"))?;
    let (program, index, _) = build_model(&inst, &policy)?;
    let report = brute_force_milp(&program, DEFAULT_BINARY_LIMIT)?;
    let mut plan = extract_solution(&program, &index, &report.assignment)?;
    normalize_schedule(&inst, &policy, &mut plan)?;
    println!(
        "regression12: synth seed {seed}, objective {:?}, breakdown {}",
        report.objective,
        evaluate_objective(&inst, &policy, &plan)
    );
    save_plan(
        &PlanDocument {
            plan,
            policy: Some(policy),
            objective: report.objective,
        },
        golden.join("regression12_plan.json"),
    )?;

    // Baseline plan of the automotive network and its seeded replays.
    let auto = load_instance(data.join("auto14.json"))?;
    let policy = LatenessPolicy::penalized(1.0, 500.0)?;
    let sol = solve_instance(&auto, &policy, Solver::BranchAndBound, &SolveOptions::default())?;
    let plan = sol.plan.expect("auto14 is feasible");
    save_plan(
        &PlanDocument {
            plan: plan.clone(),
            policy: Some(policy),
            objective: sol.report.objective,
        },
        data.join("auto14_baseline_plan.json"),
    )?;
    let model = LeadTimeModel::default();
    let once = simulate_once(&auto, &plan, &model, &mut replication_rng(42, 0))?;
    let text = serde_json::to_string_pretty(&once.to_json()).expect("json") + "\n";
    write_atomic(&golden.join("auto14_replication_seed42.json"), text.as_bytes())?;
    let report = run_replications(&auto, &plan, &model, DEFAULT_REPLICATIONS, 42)?;
    let (mean, std) = report.total_lateness_stats();
    let customers: Vec<_> = report
        .customers
        .iter()
        .map(|c| serde_json::json!({"customer": c.customer, "product": c.product, "mean": c.mean, "std": c.std}))
        .collect();
    let summary = serde_json::json!({
        "seed": 42,
        "replications": DEFAULT_REPLICATIONS,
        "sigma": model.sigma,
        "mean_total_lateness": mean,
        "std_total_lateness": std,
        "customers": customers,
    });
    let path = golden.join("auto14_sim300_seed42.json");
    write_atomic(&path, (serde_json::to_string_pretty(&summary).expect("json") + "\n").as_bytes())?;
    println!("auto14: objective {:?}, mean total lateness {mean}", sol.report.objective);
    Ok(())
}
