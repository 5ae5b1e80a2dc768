mod common;

use std::collections::BTreeMap;

use chainflow::instance::{load_instance, Topology};
use chainflow::milp::{
    brute_force_milp, parse_mps, solve_lp_bounded, solve_milp, to_mps_string, Integrality, LpStatus, Sense,
    SimplexOptions, DEFAULT_BINARY_LIMIT,
};
use chainflow::model::{
    build_model, check_feasibility, evaluate_objective, extract_solution, load_plan, normalize_schedule, parse_name,
    solve_instance, ArcProduct,
};
use chainflow::synth::{random_instance_seeded, random_policy};
use chainflow::{
    EntityKind, FlowPlan, LatenessPolicy, MixedIntegerProgram, SolveOptions, SolveStatus, Solver,
    SupplyChainInstance,
};
use common::{auto14, data, fixture, rel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn family_counts<'a>(names: impl Iterator<Item = &'a str>) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for name in names {
        let (prefix, _) = parse_name(name).unwrap_or_else(|| panic!("unparsable name {name}"));
        *out.entry(prefix.to_string()).or_insert(0) += 1;
    }
    out
}

#[test]
fn bundled_model_matches_size_manifest() {
    let text = std::fs::read_to_string(data("golden/auto14_model_size.json")).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&text).unwrap();
    let policy: LatenessPolicy = manifest["policy"].as_str().unwrap().parse().unwrap();
    let (program, _, _) = build_model(&auto14(), &policy).unwrap();
    let expect = |key: &str| -> BTreeMap<String, u64> {
        manifest[key].as_object().unwrap().iter().map(|(k, v)| (k.clone(), v.as_u64().unwrap())).collect()
    };
    assert_eq!(family_counts(program.columns.iter().map(|c| c.name.as_str())), expect("columns"));
    assert_eq!(family_counts(program.rows.iter().map(|r| r.name.as_str())), expect("rows"));
    assert_eq!(program.num_columns() as u64, manifest["total_columns"].as_u64().unwrap());
    assert_eq!(program.num_rows() as u64, manifest["total_rows"].as_u64().unwrap());
    assert_eq!(program.free_binaries().len() as u64, manifest["free_binaries"].as_u64().unwrap());
}

#[test]
fn regression_instance_reproduces_frozen_plan() {
    let inst = load_instance(data("regression12.json")).unwrap();
    let golden = load_plan(data("golden/regression12_plan.json")).unwrap();
    let policy = golden.policy.unwrap();
    let (program, index, _) = build_model(&inst, &policy).unwrap();
    assert_eq!(program.free_binaries().len(), 12);

    let brute = brute_force_milp(&program, DEFAULT_BINARY_LIMIT).unwrap();
    let mut plan = extract_solution(&program, &index, &brute.assignment).unwrap();
    normalize_schedule(&inst, &policy, &mut plan).unwrap();
    assert_eq!(brute.objective, golden.objective);
    let (got, want) = (plan.to_named(), golden.plan.to_named());
    for name in got.keys().chain(want.keys()) {
        let (g, w) = (got.get(name).copied().unwrap_or(0.0), want.get(name).copied().unwrap_or(0.0));
        assert!((g - w).abs() <= 1e-9, "{name}: {g} vs {w}");
    }

    let bnb = solve_milp(&program, &SolveOptions::default()).unwrap();
    assert_eq!(bnb.status, SolveStatus::Optimal);
    assert!(rel(bnb.objective.unwrap(), golden.objective.unwrap()) <= 1e-6);
    let cost = evaluate_objective(&inst, &policy, &golden.plan);
    assert!(rel(cost.total, golden.objective.unwrap()) <= 1e-6);
    assert!(check_feasibility(&inst, &policy, &golden.plan, 1e-6).unwrap().is_empty());
}

#[test]
fn one_column_one_row_mps_matches_fixture() {
    let mut p = MixedIntegerProgram::new("tiny");
    let x = p.add_column("x", 0.0, f64::INFINITY, 1.0, Integrality::Continuous);
    p.add_row("r1", vec![(x, 1.0)], Sense::Ge, 2.0);
    let expected = std::fs::read_to_string(fixture("tiny.mps")).unwrap();
    let text = to_mps_string(&p);
    assert_eq!(text, expected);
    assert_eq!(text.lines().count(), 9);
    assert_eq!(parse_mps(&expected).unwrap(), p);
}

#[test]
fn fixing_every_binary_needs_one_node() {
    let inst = auto14();
    let policy = LatenessPolicy::penalized(1.0, 500.0).unwrap();
    let sol = solve_instance(&inst, &policy, Solver::BranchAndBound, &SolveOptions::default()).unwrap();
    let mut program = sol.program.clone();
    for j in program.free_binaries() {
        let v = sol.report.assignment[j].round();
        program.columns[j].lower = v;
        program.columns[j].upper = v;
    }
    let fixed = solve_milp(&program, &SolveOptions::default()).unwrap();
    assert_eq!(fixed.nodes, 1);
    assert!(rel(fixed.objective.unwrap(), sol.report.objective.unwrap()) <= 1e-9);
}

/// Rows that define the arrival and lateness-penalty linearizations of one arc.
fn linearization_rows(program: &MixedIntegerProgram, arc: &str) -> MixedIntegerProgram {
    let mut sub = program.clone();
    sub.rows.retain(|r| {
        let (prefix, args) = parse_name(&r.name).unwrap();
        ["arr_ub", "arr_link", "arr_lb", "v_ub", "v_link", "v_lb", "w_def"].contains(&prefix) && args.join(",") == arc
    });
    sub
}

fn extreme(program: &MixedIntegerProgram, lower: &[f64], upper: &[f64], col: usize, sign: f64) -> f64 {
    let mut p = program.clone();
    for c in &mut p.columns {
        c.cost = 0.0;
    }
    p.columns[col].cost = sign;
    let lp = solve_lp_bounded(&p, lower, upper, &SimplexOptions::default()).unwrap();
    assert_eq!(lp.status, LpStatus::Optimal);
    lp.x[col]
}

fn serial_line() -> SupplyChainInstance {
    let text = r#"{
        "schema": 1,
        "products": [{"id": "p"}],
        "entities": [
            {"id": "S1", "kind": "supplier", "production_capacity": 10, "production_cost": {"p": 1}},
            {"id": "D1", "kind": "distributor", "holding_cost": {"p": 0.5}},
            {"id": "C1", "kind": "customer", "demand": {"p": 4}, "shortage_penalty": {"p": 50},
             "due_time": {"p": 5}}
        ],
        "edges": [
            {"from": "S1", "to": "D1", "capacity": 10, "unit_cost": {"p": 1}, "lead_time": {"p": 3}},
            {"from": "D1", "to": "C1", "capacity": 10, "unit_cost": {"p": 1}, "lead_time": {"p": 4},
             "fixed_late_penalty": {"p": 7}, "unit_late_penalty": {"p": 2}}
        ]
    }"#;
    chainflow::instance::parse_instance(text, std::path::Path::new("line.json")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// With the binaries and readiness fixed, the linearization rows pin `a` to
    /// `(l + o) beta` and `w` to `z (fw cf + uw cu (a - t))`.
    #[test]
    fn linearization_is_exact(beta in 0u8..2, z in 0u8..2, frac in 0.0f64..=1.0,
                              uw in 0.0f64..3.0, fw in 0.0f64..600.0) {
        let inst = serial_line();
        let policy = LatenessPolicy::penalized(uw, fw).unwrap();
        let (program, index, big_m) = build_model(&inst, &policy).unwrap();
        let key: ArcProduct = ("D1".into(), "C1".into(), "p".into());
        let sub = linearization_rows(&program, "D1,C1,p");
        let (l, t, (cf, cu)) = (4.0, 5.0, (7.0, 2.0));
        let u = big_m.get(&key).unwrap().arrival;
        let o = frac * (u - l);
        let (cb, cz, ca, cv, cw) = (index.beta[&key], index.z[&key], index.a[&key], index.v[&key], index.w[&key]);
        let co = index.o[&("D1".into(), "p".into())];
        // w's own bounds belong to the original domain (w >= 0); drop them so only the
        // rows decide.
        let (mut lo, mut hi) = (program.lower_bounds(), program.upper_bounds());
        lo[cw] = -1e9;
        hi[cw] = 1e9;
        for (c, v) in [(cb, beta as f64), (cz, z as f64), (co, o)] {
            lo[c] = v;
            hi[c] = v;
        }
        let a = (l + o) * beta as f64;
        let w = z as f64 * (fw * cf + uw * cu * (a - t));
        for sign in [1.0, -1.0] {
            prop_assert!((extreme(&sub, &lo, &hi, ca, sign) - a).abs() <= 1e-9);
            prop_assert!((extreme(&sub, &lo, &hi, cv, sign) - z as f64 * a).abs() <= 1e-9);
            let got = extreme(&sub, &lo, &hi, cw, sign);
            prop_assert!((got - w).abs() <= 1e-9 * w.abs().max(1.0), "w {} vs {}", got, w);
        }
    }
}

/// Earliest schedule of an edge set, computed straight from the instance.
fn earliest_plan(inst: &SupplyChainInstance, policy: &LatenessPolicy, used: &BTreeMap<ArcProduct, bool>) -> FlowPlan {
    let topo = Topology::new(inst).unwrap();
    let mut plan = FlowPlan::default();
    let mut arrival: BTreeMap<ArcProduct, f64> = BTreeMap::new();
    for &j in &topo.order {
        let e = &inst.entities[j];
        for k in inst.dispatched(&e.id) {
            let o = if e.kind == EntityKind::Supplier {
                0.0
            } else {
                let req = inst.requirements_of(&e.id, &k).cloned().unwrap_or_default();
                arrival
                    .iter()
                    .filter(|((_, to, kk), _)| to == &e.id && req.contains(kk))
                    .map(|(_, &a)| a)
                    .fold(0.0, f64::max)
            };
            plan.o.insert((e.id.clone(), k.clone()), o);
            for edge in inst.edges.iter().filter(|x| x.from == e.id && x.carries(&k)) {
                let key = (edge.from.clone(), edge.to.clone(), k.clone());
                let b = used[&key];
                let a = if b { o + edge.lead_time_of(&k) } else { 0.0 };
                arrival.insert(key.clone(), a);
                plan.beta.insert(key.clone(), b as u8 as f64);
                plan.a.insert(key.clone(), a);
                let due = inst.entity(&edge.to).unwrap().due_time_of(&k);
                if let (Some(t), true) = (due, policy.is_penalized()) {
                    if b && a > t + 1e-9 {
                        let w = policy.fixed_weight * edge.fixed_late_penalty_of(&k)
                            + policy.unit_weight * edge.unit_late_penalty_of(&k) * (a - t);
                        plan.z.insert(key.clone(), 1.0);
                        plan.v.insert(key.clone(), a);
                        plan.w.insert(key.clone(), w);
                    }
                }
            }
        }
    }
    for e in &inst.entities {
        for (k, &d) in &e.demand {
            plan.delta.insert((e.id.clone(), k.clone()), d);
        }
        for (k, &i0) in &e.initial_inventory {
            plan.inventory.insert((e.id.clone(), k.clone()), i0);
        }
    }
    plan
}

/// Every edge-set schedule that satisfies the original constraints is a point of the
/// linearized program.
#[test]
fn big_m_values_cut_no_feasible_schedule() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0usize;
    for seed in 0..100u64 {
        let inst = random_instance_seeded(seed);
        let policy = random_policy(&mut rng);
        let (program, _, _) = build_model(&inst, &policy).unwrap();
        let keys: Vec<ArcProduct> = inst
            .edges
            .iter()
            .flat_map(|e| e.lead_time.keys().map(|k| (e.from.clone(), e.to.clone(), k.clone())))
            .collect();
        let masks: Vec<u64> = if keys.len() <= 8 {
            (0..1u64 << keys.len()).collect()
        } else {
            (0..256).map(|_| rng.random::<u64>()).collect()
        };
        for mask in masks {
            let used: BTreeMap<ArcProduct, bool> =
                keys.iter().enumerate().map(|(i, k)| (k.clone(), mask >> i & 1 == 1)).collect();
            let plan = earliest_plan(&inst, &policy, &used);
            let violations = check_feasibility(&inst, &policy, &plan, 1e-9).unwrap();
            assert!(violations.is_empty(), "seed {seed} mask {mask}: {violations:?}");
            let mut x = vec![0.0; program.num_columns()];
            for (name, v) in plan.to_named() {
                let col = program.column_by_name(&name).unwrap_or_else(|| panic!("no column {name}"));
                x[col] = v;
            }
            assert!(program.max_violation(&x) <= 1e-9, "seed {seed} mask {mask}: {}", program.max_violation(&x));
            checked += 1;
        }
    }
    assert!(checked > 1000, "{checked}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn objective_is_monotone_in_penalty_weights(seed in any::<u64>(), u1 in 0.0f64..2.0, du in 0.0f64..2.0,
                                                f1 in 0.0f64..500.0, df in 0.0f64..500.0) {
        let inst = random_instance_seeded(seed);
        let solve = |p: LatenessPolicy| {
            let sol = solve_instance(&inst, &p, Solver::BranchAndBound, &SolveOptions::default()).unwrap();
            prop_assert_eq!(sol.report.status, SolveStatus::Optimal);
            Ok(sol.report.objective.unwrap())
        };
        let none = solve(LatenessPolicy::NONE)?;
        let base = solve(LatenessPolicy::penalized(u1, f1).unwrap())?;
        let more_unit = solve(LatenessPolicy::penalized(u1 + du, f1).unwrap())?;
        let more_fixed = solve(LatenessPolicy::penalized(u1, f1 + df).unwrap())?;
        let slack = |v: f64| 1e-6 * v.abs().max(1.0);
        prop_assert!(none <= base + slack(base));
        prop_assert!(base <= more_unit + slack(more_unit), "{} > {}", base, more_unit);
        prop_assert!(base <= more_fixed + slack(more_fixed), "{} > {}", base, more_fixed);
    }
}
