//! Plan checks written against the original nonlinear model, independent of the
//! program rows: arrivals as `(l + o) beta` and penalties as `z (cf + cu (a - t))`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::names::format_name;
use super::plan::{get, FlowPlan, INTEGRALITY_TOL};
use super::policy::LatenessPolicy;
use super::sets::{ArcProduct, EntityProduct, IndexSets};
use crate::error::Result;
use crate::instance::{EntityKind, SupplyChainInstance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Transportation, production and holding.
    pub variable: f64,
    /// Route fixed costs and production opening costs.
    pub fixed: f64,
    /// Unmet-demand and late-delivery penalties.
    pub penalty: f64,
    pub total: f64,
}

impl fmt::Display for CostBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "variable {:.6}  fixed {:.6}  penalty {:.6}  total {:.6}",
            self.variable, self.fixed, self.penalty, self.total
        )
    }
}

/// Penalty owed on a flow that arrives at `a` against due time `t`.
fn late_penalty(policy: &LatenessPolicy, cf: f64, cu: f64, z: f64, a: f64, t: f64) -> f64 {
    z * (policy.fixed_weight * cf + policy.unit_weight * cu * (a - t))
}

/// Recomputes the three cost groups directly from plan values and instance data.
pub fn evaluate_objective(instance: &SupplyChainInstance, policy: &LatenessPolicy, plan: &FlowPlan) -> CostBreakdown {
    let mut variable = 0.0;
    let mut fixed = 0.0;
    let mut penalty = 0.0;
    for edge in &instance.edges {
        for k in edge.products() {
            let key = (edge.from.clone(), edge.to.clone(), k.clone());
            variable += edge.unit_cost_of(k) * get(&plan.y, &key);
            fixed += edge.fixed_cost * get(&plan.beta, &key);
            let Some(t) = instance.entity(&edge.to).and_then(|e| e.due_time_of(k)) else {
                continue;
            };
            if policy.is_penalized() {
                let o = get(&plan.o, &(edge.from.clone(), k.clone()));
                let a = (edge.lead_time_of(k) + o) * get(&plan.beta, &key);
                let cf = edge.fixed_late_penalty_of(k);
                let cu = edge.unit_late_penalty_of(k);
                penalty += late_penalty(policy, cf, cu, get(&plan.z, &key), a, t);
            }
        }
    }
    for e in &instance.entities {
        for (k, &h) in &e.holding_cost {
            variable += h * get(&plan.inventory, &(e.id.clone(), k.clone()));
        }
        for (k, &c) in &e.production_cost {
            variable += c * get(&plan.p, &(e.id.clone(), k.clone()));
        }
        fixed += e.open_cost * get(&plan.zeta, &e.id);
        for (k, &rho) in &e.shortage_penalty {
            penalty += rho * get(&plan.delta, &(e.id.clone(), k.clone()));
        }
    }
    CostBreakdown {
        variable,
        fixed,
        penalty,
        total: variable + fixed + penalty,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanViolation {
    /// Constraint group, e.g. `edge-capacity` or `arrival`.
    pub constraint: &'static str,
    /// Row or variable name in the model naming grammar.
    pub row: String,
    pub residual: f64,
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{:e}", self.constraint, self.row, self.residual)
    }
}

struct Checker {
    tol: f64,
    out: Vec<PlanViolation>,
}

impl Checker {
    /// Records `residual` when it exceeds `tol` scaled by the magnitude of the terms.
    fn check(&mut self, constraint: &'static str, row: impl FnOnce() -> String, residual: f64, scale: f64) {
        if residual > self.tol * scale.abs().max(1.0) || residual.is_nan() {
            self.out.push(PlanViolation {
                constraint,
                row: row(),
                residual,
            });
        }
    }
}

fn arc_row(prefix: &str, key: &ArcProduct) -> String {
    format_name(prefix, &[key.0.as_str(), key.1.as_str(), key.2.as_str()])
}

fn pair_row(prefix: &str, key: &EntityProduct) -> String {
    format_name(prefix, &[key.0.as_str(), key.1.as_str()])
}

/// Evaluates every constraint of the original model on `plan`, with residuals scaled by
/// `max(1, |largest term|)` before comparing against `tol`.
pub fn check_feasibility(
    instance: &SupplyChainInstance,
    policy: &LatenessPolicy,
    plan: &FlowPlan,
    tol: f64,
) -> Result<Vec<PlanViolation>> {
    let sets = IndexSets::new(instance)?;
    let ents = &instance.entities;
    let mut c = Checker { tol, out: Vec::new() };
    let keys: Vec<ArcProduct> = sets.arcs.iter().map(|a| sets.arc_key(instance, a)).collect();

    // Entries outside the model's index sets.
    let arc_set: BTreeSet<&ArcProduct> = keys.iter().collect();
    let mut pairs_stocked = BTreeSet::new();
    let mut pairs_made = BTreeSet::new();
    let mut pairs_ready = BTreeSet::new();
    let mut pairs_demand = BTreeSet::new();
    for (i, e) in ents.iter().enumerate() {
        pairs_stocked.extend(sets.stocked[i].iter().map(|k| (e.id.clone(), k.clone())));
        pairs_made.extend(sets.producible[i].iter().map(|k| (e.id.clone(), k.clone())));
        pairs_ready.extend(sets.dispatched[i].iter().map(|k| (e.id.clone(), k.clone())));
    }
    for (i, k, _) in &sets.demand {
        pairs_demand.insert((ents[*i].id.clone(), k.clone()));
    }
    let open: BTreeSet<_> = sets.open.iter().map(|&i| ents[i].id.clone()).collect();
    for (prefix, map) in [
        ("y", &plan.y),
        ("beta", &plan.beta),
        ("a", &plan.a),
        ("z", &plan.z),
        ("w", &plan.w),
        ("v", &plan.v),
    ] {
        for (key, &val) in map {
            if !arc_set.contains(key) && val != 0.0 {
                c.check("unknown-variable", || arc_row(prefix, key), val.abs(), 0.0);
            }
        }
    }
    for (prefix, map, valid) in [
        ("x", &plan.x, &pairs_demand),
        ("p", &plan.p, &pairs_made),
        ("I", &plan.inventory, &pairs_stocked),
        ("delta", &plan.delta, &pairs_demand),
        ("o", &plan.o, &pairs_ready),
    ] {
        for (key, &val) in map {
            if !valid.contains(key) && val != 0.0 {
                c.check("unknown-variable", || pair_row(prefix, key), val.abs(), 0.0);
            }
        }
    }
    for (id, &val) in &plan.zeta {
        if !open.contains(id) && val != 0.0 {
            c.check("unknown-variable", || format_name("zeta", &[id.as_str()]), val.abs(), 0.0);
        }
    }

    // Domains: nonnegativity and binary values.
    let all_arcs = [&plan.y, &plan.a, &plan.w, &plan.v];
    for (prefix, map) in ["y", "a", "w", "v"].into_iter().zip(all_arcs) {
        for (key, &val) in map {
            c.check("domain", || arc_row(prefix, key), -val, 0.0);
        }
    }
    for (prefix, map) in [
        ("x", &plan.x),
        ("p", &plan.p),
        ("I", &plan.inventory),
        ("delta", &plan.delta),
        ("o", &plan.o),
    ] {
        for (key, &val) in map {
            c.check("domain", || pair_row(prefix, key), -val, 0.0);
        }
    }
    let binary_gap = |v: f64| v.abs().min((v - 1.0).abs());
    for (prefix, map) in [("beta", &plan.beta), ("z", &plan.z)] {
        for (key, &val) in map {
            if binary_gap(val) > INTEGRALITY_TOL.max(tol) {
                c.check("integrality", || arc_row(prefix, key), binary_gap(val), 0.0);
            }
        }
    }
    for (id, &val) in &plan.zeta {
        if binary_gap(val) > INTEGRALITY_TOL.max(tol) {
            c.check("integrality", || format_name("zeta", &[id.as_str()]), binary_gap(val), 0.0);
        }
    }

    // Flow balance.
    for (i, e) in ents.iter().enumerate() {
        for k in &sets.stocked[i] {
            let key = (e.id.clone(), k.clone());
            let mut terms = Vec::new();
            for &a in &sets.outbound_arcs[i] {
                if &sets.arcs[a].product == k {
                    terms.push(get(&plan.y, &keys[a]));
                }
            }
            for &a in &sets.inbound_arcs[i] {
                if &sets.arcs[a].product == k {
                    terms.push(-get(&plan.y, &keys[a]));
                }
            }
            for rule in instance.bom.iter().filter(|r| &r.component == k) {
                if sets.producible[i].contains(&rule.successor) {
                    terms.push(rule.conversion_rate * get(&plan.p, &(e.id.clone(), rule.successor.clone())));
                }
            }
            terms.push(-get(&plan.p, &key));
            terms.push(get(&plan.x, &key));
            terms.push(get(&plan.inventory, &key));
            let start = e.initial_inventory.get(k).copied().unwrap_or(0.0);
            let lhs: f64 = terms.iter().sum();
            let scale = terms.iter().map(|t| t.abs()).fold(start.abs(), f64::max);
            c.check("balance", || pair_row("balance", &key), (lhs - start).abs(), scale);
        }
    }

    // Capacities.
    for (a, key) in keys.iter().enumerate() {
        let q = instance.edges[sets.arcs[a].edge].capacity;
        let (y, b) = (get(&plan.y, key), get(&plan.beta, key));
        c.check("edge-capacity", || arc_row("edge_cap", key), y - q * b, q);
    }
    for (ei, edge) in instance.edges.iter().enumerate() {
        let flow: f64 = (0..keys.len())
            .filter(|&a| sets.arcs[a].edge == ei)
            .map(|a| get(&plan.y, &keys[a]))
            .sum();
        c.check(
            "mixed-capacity",
            || format_name("mix_cap", &[edge.from.as_str(), edge.to.as_str()]),
            flow - edge.capacity,
            edge.capacity,
        );
    }
    for &i in &sets.open {
        let e = &ents[i];
        let made: f64 = sets.producible[i].iter().map(|k| get(&plan.p, &(e.id.clone(), k.clone()))).sum();
        let cap = e.production_capacity * get(&plan.zeta, &e.id);
        c.check(
            "production-capacity",
            || format_name("prod_cap", &[e.id.as_str()]),
            made - cap,
            e.production_capacity,
        );
    }
    for (i, e) in ents.iter().enumerate() {
        if sets.open.contains(&i) {
            continue;
        }
        for (key, &val) in plan.p.iter().filter(|((id, _), _)| id == &e.id) {
            c.check("production-capacity", || pair_row("p", key), val, 0.0);
        }
    }

    // Unmet demand.
    for (i, k, d) in &sets.demand {
        let key = (ents[*i].id.clone(), k.clone());
        let (s, delta) = (get(&plan.x, &key), get(&plan.delta, &key));
        c.check("shortage", || pair_row("shortage", &key), d - s - delta, *d);
        c.check("demand-cap", || pair_row("x", &key), s - d, *d);
    }

    // Arrivals and readiness.
    for (a, key) in keys.iter().enumerate() {
        let arc = &sets.arcs[a];
        let o = get(&plan.o, &(key.0.clone(), key.2.clone()));
        let expected = (arc.lead + o) * get(&plan.beta, key);
        let actual = get(&plan.a, key);
        c.check("arrival", || arc_row("a", key), (actual - expected).abs(), expected);
    }
    for (j, e) in ents.iter().enumerate() {
        for k in &sets.dispatched[j] {
            let key = (e.id.clone(), k.clone());
            let o = get(&plan.o, &key);
            if e.kind == EntityKind::Supplier {
                c.check("supplier-anchor", || pair_row("o", &key), o.abs(), 0.0);
                continue;
            }
            for a in sets.gating_arcs(instance, j, k) {
                let arr = get(&plan.a, &keys[a]);
                let in_key = &keys[a];
                c.check(
                    "readiness",
                    || format_name("ready", &[in_key.0.as_str(), in_key.1.as_str(), k.as_str(), in_key.2.as_str()]),
                    arr - o,
                    arr,
                );
            }
        }
    }

    // Lateness indicators and penalties.
    for (a, key) in keys.iter().enumerate() {
        let arc = &sets.arcs[a];
        let z = get(&plan.z, key);
        let w = get(&plan.w, key);
        let v = get(&plan.v, key);
        match arc.due {
            Some(t) if policy.is_penalized() => {
                let arr = get(&plan.a, key);
                if z < 0.5 {
                    c.check("lateness-indicator", || arc_row("late", key), arr - t, t);
                }
                let edge = &instance.edges[arc.edge];
                let cf = edge.fixed_late_penalty_of(&key.2);
                let cu = edge.unit_late_penalty_of(&key.2);
                let expected = late_penalty(policy, cf, cu, z, arr, t);
                c.check("late-penalty", || arc_row("w", key), (w - expected).abs(), expected.abs().max(w.abs()));
                c.check("late-product", || arc_row("v", key), (v - z * arr).abs(), arr);
            }
            _ => {
                for (prefix, val) in [("z", z), ("w", w), ("v", v)] {
                    c.check("lateness-disabled", || arc_row(prefix, key), val.abs(), 0.0);
                }
            }
        }
    }
    Ok(c.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::plan::normalize_schedule;
    use crate::testutil::single_edge;

    fn key() -> ArcProduct {
        ("S1".into(), "C1".into(), "widget".into())
    }

    /// Ships all 4 units on the single edge.
    fn shipping_plan() -> FlowPlan {
        let mut plan = FlowPlan::default();
        plan.y.insert(key(), 4.0);
        plan.beta.insert(key(), 1.0);
        plan.a.insert(key(), 4.0);
        plan.p.insert(("S1".into(), "widget".into()), 4.0);
        plan.zeta.insert("S1".into(), 1.0);
        plan.x.insert(("C1".into(), "widget".into()), 4.0);
        plan
    }

    #[test]
    fn null_plan_on_zero_demand_costs_nothing() {
        let mut inst = single_edge(None);
        inst.entities[1].demand.clear();
        let b = evaluate_objective(&inst, &LatenessPolicy::NONE, &FlowPlan::default());
        assert_eq!(b, CostBreakdown::default());
        assert!(check_feasibility(&inst, &LatenessPolicy::NONE, &FlowPlan::default(), 1e-6).unwrap().is_empty());
    }

    #[test]
    fn single_unit_shortage() {
        let mut inst = single_edge(None);
        inst.entities[1].shortage_penalty.insert("widget".into(), 10.0);
        let mut plan = FlowPlan::default();
        plan.delta.insert(("C1".into(), "widget".into()), 1.0);
        let b = evaluate_objective(&inst, &LatenessPolicy::NONE, &plan);
        assert_eq!((b.variable, b.fixed, b.penalty), (0.0, 0.0, 10.0));
    }

    #[test]
    fn shipping_plan_is_feasible_and_priced() {
        let inst = single_edge(None);
        let plan = shipping_plan();
        assert_eq!(check_feasibility(&inst, &LatenessPolicy::NONE, &plan, 1e-6).unwrap(), vec![]);
        let b = evaluate_objective(&inst, &LatenessPolicy::NONE, &plan);
        // 4 units at unit cost 2 plus production cost 1; route fixed cost 3
        assert_eq!((b.variable, b.fixed, b.penalty, b.total), (12.0, 3.0, 0.0, 15.0));
    }

    #[test]
    fn over_capacity_flow_is_reported() {
        let inst = single_edge(None);
        let mut plan = shipping_plan();
        plan.beta.insert(key(), 0.0);
        plan.a.insert(key(), 0.0);
        let v = check_feasibility(&inst, &LatenessPolicy::NONE, &plan, 1e-6).unwrap();
        let cap = v.iter().find(|v| v.constraint == "edge-capacity").expect("capacity violation");
        assert_eq!(cap.row, "edge_cap(S1,C1,widget)");
        assert_eq!(cap.residual, 4.0);
    }

    #[test]
    fn wrong_arrival_is_reported() {
        let inst = single_edge(None);
        let mut plan = shipping_plan();
        plan.a.insert(key(), 6.0);
        let v = check_feasibility(&inst, &LatenessPolicy::NONE, &plan, 1e-6).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].constraint, v[0].residual), ("arrival", 2.0));
    }

    #[test]
    fn late_delivery_is_penalized() {
        let inst = single_edge(Some(3.0));
        let policy = LatenessPolicy::penalized(1.0, 500.0).unwrap();
        let mut plan = shipping_plan();
        let v = check_feasibility(&inst, &policy, &plan, 1e-6).unwrap();
        assert!(v.iter().any(|v| v.constraint == "lateness-indicator"));
        normalize_schedule(&inst, &policy, &mut plan).unwrap();
        assert_eq!(check_feasibility(&inst, &policy, &plan, 1e-6).unwrap(), vec![]);
        let b = evaluate_objective(&inst, &policy, &plan);
        // fixed 500 * 7 plus one time unit at 7
        assert_eq!(b.penalty, 3507.0);
    }
}
