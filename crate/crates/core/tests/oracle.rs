//! Branch-and-bound against exhaustive enumeration on random small instances.

use chainflow::milp::{brute_force_milp, Sense, solve_milp, SolveStatus, DEFAULT_BINARY_LIMIT};
use chainflow::model::{build_model, check_feasibility, evaluate_objective, extract_solution, normalize_schedule};
use chainflow::synth::{random_instance, random_policy, SynthOptions};
use chainflow::SolveOptions;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn branch_and_bound_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = SynthOptions::default();
    let (mut feasible, mut infeasible) = (0, 0);
    for case in 0..200 {
        let inst = random_instance(&mut rng, &opts);
        let policy = random_policy(&mut rng);
        let (mut program, index, _) = build_model(&inst, &policy).unwrap();
        let mut extra_rows = false;
        if case % 8 == 7 {
            // b1 + b2 = 1 with b1 = b2 has an LP solution at 1/2 but no integer one.
            let free = program.free_binaries();
            if let [b1, b2, ..] = free[..] {
                program.add_row("odd_sum", vec![(b1, 1.0), (b2, 1.0)], Sense::Eq, 1.0);
                program.add_row("equal", vec![(b1, 1.0), (b2, -1.0)], Sense::Eq, 0.0);
                extra_rows = true;
            }
        }
        let bnb = solve_milp(&program, &SolveOptions::default()).unwrap();
        let brute = brute_force_milp(&program, DEFAULT_BINARY_LIMIT).unwrap();
        assert_eq!(
            bnb.status == SolveStatus::Infeasible,
            brute.status == SolveStatus::Infeasible,
            "case {case}: status {:?} vs {:?}",
            bnb.status,
            brute.status
        );
        if extra_rows {
            infeasible += 1;
            assert_eq!(bnb.status, SolveStatus::Infeasible, "case {case}");
            continue;
        }
        let (Some(a), Some(b)) = (bnb.objective, brute.objective) else { continue };
        feasible += 1;
        assert!(rel(a, b) <= 1e-6, "case {case} ({policy}): {a} vs {b}");
        let mut plan = extract_solution(&program, &index, &bnb.assignment).unwrap();
        normalize_schedule(&inst, &policy, &mut plan).unwrap();
        let violations = check_feasibility(&inst, &policy, &plan, 1e-6).unwrap();
        assert!(violations.is_empty(), "case {case}: {violations:?}");
        let cost = evaluate_objective(&inst, &policy, &plan);
        assert!(rel(cost.total, a) <= 1e-6, "case {case}: evaluated {} vs {a}", cost.total);
    }
    assert!(feasible > 100 && infeasible > 10, "{feasible} feasible, {infeasible} infeasible");
}
