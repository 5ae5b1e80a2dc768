use std::collections::BTreeMap;

use super::bigm::{from_sets, BigMTable};
use super::names::{format_name, valid_id, Family};
use super::policy::LatenessPolicy;
use super::sets::{ArcProduct, EntityProduct, IndexSets};
use crate::error::{Error, Result};
use crate::instance::{validate, EntityId, EntityKind, SupplyChainInstance};
use crate::milp::{Integrality, MixedIntegerProgram, Sense};

/// Column of every model variable, per family.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VariableIndex {
    pub y: BTreeMap<ArcProduct, usize>,
    pub beta: BTreeMap<ArcProduct, usize>,
    pub x: BTreeMap<EntityProduct, usize>,
    pub p: BTreeMap<EntityProduct, usize>,
    pub zeta: BTreeMap<EntityId, usize>,
    pub inventory: BTreeMap<EntityProduct, usize>,
    pub delta: BTreeMap<EntityProduct, usize>,
    pub a: BTreeMap<ArcProduct, usize>,
    pub o: BTreeMap<EntityProduct, usize>,
    pub z: BTreeMap<ArcProduct, usize>,
    pub w: BTreeMap<ArcProduct, usize>,
    pub v: BTreeMap<ArcProduct, usize>,
}

impl VariableIndex {
    pub fn columns_of(&self, family: Family) -> Vec<usize> {
        match family {
            Family::Y => self.y.values().copied().collect(),
            Family::Beta => self.beta.values().copied().collect(),
            Family::X => self.x.values().copied().collect(),
            Family::P => self.p.values().copied().collect(),
            Family::Zeta => self.zeta.values().copied().collect(),
            Family::I => self.inventory.values().copied().collect(),
            Family::Delta => self.delta.values().copied().collect(),
            Family::A => self.a.values().copied().collect(),
            Family::O => self.o.values().copied().collect(),
            Family::Z => self.z.values().copied().collect(),
            Family::W => self.w.values().copied().collect(),
            Family::V => self.v.values().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        Family::ALL.iter().map(|&f| self.columns_of(f).len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn arc_name(prefix: &str, key: &ArcProduct) -> String {
    format_name(prefix, &[key.0.as_str(), key.1.as_str(), key.2.as_str()])
}

fn pair_name(prefix: &str, key: &EntityProduct) -> String {
    format_name(prefix, &[key.0.as_str(), key.1.as_str()])
}

/// Fails unless `instance` validates and every id fits the naming grammar.
pub(crate) fn require_valid(instance: &SupplyChainInstance) -> Result<()> {
    let violations = validate(instance);
    if !violations.is_empty() {
        let listed: Vec<String> = violations.iter().take(5).map(|v| v.to_string()).collect();
        return Err(Error::InvalidInstance(format!(
            "{} violation(s): {}",
            violations.len(),
            listed.join("; ")
        )));
    }
    let ids = instance
        .entities
        .iter()
        .map(|e| e.id.as_str())
        .chain(instance.products.iter().map(|p| p.id.as_str()));
    for id in ids {
        if !valid_id(id) {
            return Err(Error::InvalidInstance(format!(
                "id `{id}` may not be empty or contain blanks, commas, parentheses or `#`"
            )));
        }
    }
    Ok(())
}

/// Assembles the routing, production and lateness model for `instance` under `policy`.
pub fn build_model(
    instance: &SupplyChainInstance,
    policy: &LatenessPolicy,
) -> Result<(MixedIntegerProgram, VariableIndex, BigMTable)> {
    require_valid(instance)?;
    policy.check()?;
    let sets = IndexSets::new(instance)?;
    let big_m = from_sets(instance, &sets)?;
    let ents = &instance.entities;
    let mut prog = MixedIntegerProgram::new("chainflow");
    let mut idx = VariableIndex::default();
    let keys: Vec<ArcProduct> = sets.arcs.iter().map(|a| sets.arc_key(instance, a)).collect();
    let penalized = |a: usize| policy.is_penalized() && sets.arcs[a].due.is_some();

    use Integrality::{Binary, Continuous};
    for (a, key) in keys.iter().enumerate() {
        let edge = &instance.edges[sets.arcs[a].edge];
        let col = prog.add_column(arc_name("y", key), 0.0, edge.capacity, edge.unit_cost_of(&key.2), Continuous);
        idx.y.insert(key.clone(), col);
    }
    for (a, key) in keys.iter().enumerate() {
        let edge = &instance.edges[sets.arcs[a].edge];
        let col = prog.add_column(arc_name("beta", key), 0.0, 1.0, edge.fixed_cost, Binary);
        idx.beta.insert(key.clone(), col);
    }
    for (i, k, d) in &sets.demand {
        let key = (ents[*i].id.clone(), k.clone());
        let col = prog.add_column(pair_name("x", &key), 0.0, *d, 0.0, Continuous);
        idx.x.insert(key, col);
    }
    for (i, e) in ents.iter().enumerate() {
        for k in &sets.producible[i] {
            let key = (e.id.clone(), k.clone());
            let cost = e.production_cost[k];
            let col = prog.add_column(pair_name("p", &key), 0.0, e.production_capacity, cost, Continuous);
            idx.p.insert(key, col);
        }
    }
    for &i in &sets.open {
        let e = &ents[i];
        let col = prog.add_column(format_name("zeta", &[e.id.as_str()]), 0.0, 1.0, e.open_cost, Binary);
        idx.zeta.insert(e.id.clone(), col);
    }
    for (i, e) in ents.iter().enumerate() {
        for k in &sets.stocked[i] {
            let inflow: f64 = sets.inbound_arcs[i]
                .iter()
                .filter(|&&a| &sets.arcs[a].product == k)
                .map(|&a| instance.edges[sets.arcs[a].edge].capacity)
                .sum();
            let made = if sets.producible[i].contains(k) {
                e.production_capacity
            } else {
                0.0
            };
            let start = e.initial_inventory.get(k).copied().unwrap_or(0.0);
            let key = (e.id.clone(), k.clone());
            let cost = e.holding_cost.get(k).copied().unwrap_or(0.0);
            let col = prog.add_column(pair_name("I", &key), 0.0, start + inflow + made, cost, Continuous);
            idx.inventory.insert(key, col);
        }
    }
    for (i, k, d) in &sets.demand {
        let e = &ents[*i];
        let key = (e.id.clone(), k.clone());
        let rho = e.shortage_penalty.get(k).copied().unwrap_or(0.0);
        let col = prog.add_column(pair_name("delta", &key), 0.0, *d, rho, Continuous);
        idx.delta.insert(key, col);
    }
    for key in &keys {
        let col = prog.add_column(arc_name("a", key), 0.0, big_m.entries[key].arrival, 0.0, Continuous);
        idx.a.insert(key.clone(), col);
    }
    for (i, e) in ents.iter().enumerate() {
        let upper = if e.kind == EntityKind::Supplier {
            0.0
        } else {
            sets.longest[i]
        };
        for k in &sets.dispatched[i] {
            let key = (e.id.clone(), k.clone());
            let col = prog.add_column(pair_name("o", &key), 0.0, upper, 0.0, Continuous);
            idx.o.insert(key, col);
        }
    }
    for (a, key) in keys.iter().enumerate() {
        let upper = if penalized(a) { 1.0 } else { 0.0 };
        let col = prog.add_column(arc_name("z", key), 0.0, upper, 0.0, Binary);
        idx.z.insert(key.clone(), col);
    }
    for (a, key) in keys.iter().enumerate() {
        let (upper, cost) = if penalized(a) {
            let edge = &instance.edges[sets.arcs[a].edge];
            let t = sets.arcs[a].due.expect("penalized arcs have a due time");
            let late = (big_m.entries[key].arrival - t).max(0.0);
            let bound = policy.fixed_weight * edge.fixed_late_penalty_of(&key.2)
                + policy.unit_weight * edge.unit_late_penalty_of(&key.2) * late;
            (bound, 1.0)
        } else {
            (0.0, 0.0)
        };
        let col = prog.add_column(arc_name("w", key), 0.0, upper, cost, Continuous);
        idx.w.insert(key.clone(), col);
    }
    for (a, key) in keys.iter().enumerate() {
        let upper = if penalized(a) {
            big_m.entries[key].arrival
        } else {
            0.0
        };
        let col = prog.add_column(arc_name("v", key), 0.0, upper, 0.0, Continuous);
        idx.v.insert(key.clone(), col);
    }

    // Flow balance: out - in + consumption - production + satisfied + ending = initial.
    for (i, e) in ents.iter().enumerate() {
        for k in &sets.stocked[i] {
            let key = (e.id.clone(), k.clone());
            let mut coeffs = Vec::new();
            for &a in &sets.outbound_arcs[i] {
                if &sets.arcs[a].product == k {
                    coeffs.push((idx.y[&keys[a]], 1.0));
                }
            }
            for &a in &sets.inbound_arcs[i] {
                if &sets.arcs[a].product == k {
                    coeffs.push((idx.y[&keys[a]], -1.0));
                }
            }
            for rule in instance.bom.iter().filter(|r| &r.component == k) {
                if let Some(&col) = idx.p.get(&(e.id.clone(), rule.successor.clone())) {
                    coeffs.push((col, rule.conversion_rate));
                }
            }
            if let Some(&col) = idx.p.get(&key) {
                coeffs.push((col, -1.0));
            }
            if let Some(&col) = idx.x.get(&key) {
                coeffs.push((col, 1.0));
            }
            coeffs.push((idx.inventory[&key], 1.0));
            let start = e.initial_inventory.get(k).copied().unwrap_or(0.0);
            prog.add_row(pair_name("balance", &key), coeffs, Sense::Eq, start);
        }
    }
    for (a, key) in keys.iter().enumerate() {
        let q = instance.edges[sets.arcs[a].edge].capacity;
        prog.add_row(
            arc_name("edge_cap", key),
            vec![(idx.y[key], 1.0), (idx.beta[key], -q)],
            Sense::Le,
            0.0,
        );
    }
    for (ei, edge) in instance.edges.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = keys
            .iter()
            .enumerate()
            .filter(|(a, _)| sets.arcs[*a].edge == ei)
            .map(|(_, key)| (idx.y[key], 1.0))
            .collect();
        if !coeffs.is_empty() {
            let name = format_name("mix_cap", &[edge.from.as_str(), edge.to.as_str()]);
            prog.add_row(name, coeffs, Sense::Le, edge.capacity);
        }
    }
    for &i in &sets.open {
        let e = &ents[i];
        let mut coeffs: Vec<(usize, f64)> = sets.producible[i]
            .iter()
            .map(|k| (idx.p[&(e.id.clone(), k.clone())], 1.0))
            .collect();
        coeffs.push((idx.zeta[&e.id], -e.production_capacity));
        prog.add_row(format_name("prod_cap", &[e.id.as_str()]), coeffs, Sense::Le, 0.0);
    }
    for (i, k, d) in &sets.demand {
        let key = (ents[*i].id.clone(), k.clone());
        prog.add_row(
            pair_name("shortage", &key),
            vec![(idx.delta[&key], 1.0), (idx.x[&key], 1.0)],
            Sense::Ge,
            *d,
        );
    }
    // Arrival a = (l + o) beta, exact for binary beta and o <= U - l.
    for (a, key) in keys.iter().enumerate() {
        let arc = &sets.arcs[a];
        let u = big_m.entries[key].arrival;
        let (ca, cb) = (idx.a[key], idx.beta[key]);
        let co = idx.o[&(key.0.clone(), key.2.clone())];
        prog.add_row(arc_name("arr_ub", key), vec![(ca, 1.0), (cb, -u)], Sense::Le, 0.0);
        prog.add_row(
            arc_name("arr_link", key),
            vec![(ca, 1.0), (co, -1.0), (cb, -arc.lead)],
            Sense::Le,
            0.0,
        );
        prog.add_row(
            arc_name("arr_lb", key),
            vec![(ca, 1.0), (co, -1.0), (cb, -u)],
            Sense::Ge,
            arc.lead - u,
        );
    }
    for (j, e) in ents.iter().enumerate() {
        if e.kind == EntityKind::Supplier {
            continue;
        }
        for k in &sets.dispatched[j] {
            let co = idx.o[&(e.id.clone(), k.clone())];
            for a in sets.gating_arcs(instance, j, k) {
                let key = &keys[a];
                let name = format_name(
                    "ready",
                    &[key.0.as_str(), key.1.as_str(), k.as_str(), key.2.as_str()],
                );
                prog.add_row(name, vec![(co, 1.0), (idx.a[key], -1.0)], Sense::Ge, 0.0);
            }
        }
    }
    // Lateness indicator and penalty w = z (fw cf + uw cu (a - t)) through v = z a.
    for (a, key) in keys.iter().enumerate() {
        if !penalized(a) {
            continue;
        }
        let arc = &sets.arcs[a];
        let t = arc.due.expect("penalized arcs have a due time");
        let entry = big_m.entries[key];
        let m = entry.lateness.expect("due time implies a lateness big-M");
        let u = entry.arrival;
        let (ca, cz, cv, cw) = (idx.a[key], idx.z[key], idx.v[key], idx.w[key]);
        let edge = &instance.edges[arc.edge];
        let fixed = policy.fixed_weight * edge.fixed_late_penalty_of(&key.2);
        let unit = policy.unit_weight * edge.unit_late_penalty_of(&key.2);
        prog.add_row(arc_name("late", key), vec![(ca, 1.0), (cz, -m)], Sense::Le, t);
        prog.add_row(arc_name("v_ub", key), vec![(cv, 1.0), (cz, -u)], Sense::Le, 0.0);
        prog.add_row(arc_name("v_link", key), vec![(cv, 1.0), (ca, -1.0)], Sense::Le, 0.0);
        prog.add_row(
            arc_name("v_lb", key),
            vec![(cv, 1.0), (ca, -1.0), (cz, -u)],
            Sense::Ge,
            -u,
        );
        prog.add_row(
            arc_name("w_def", key),
            vec![(cw, 1.0), (cz, unit * t - fixed), (cv, -unit)],
            Sense::Eq,
            0.0,
        );
    }
    Ok((prog, idx, big_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{solve_lp_bounded, LpStatus, SimplexOptions};
    use crate::testutil::single_edge;
    use std::collections::BTreeSet;

    #[test]
    fn no_policy_fixes_lateness_columns() {
        let (prog, idx, _) = build_model(&single_edge(Some(2.0)), &LatenessPolicy::NONE).unwrap();
        for fam in [Family::Z, Family::W, Family::V] {
            for j in idx.columns_of(fam) {
                assert_eq!((prog.columns[j].lower, prog.columns[j].upper), (0.0, 0.0));
            }
        }
        assert!(prog.rows.iter().all(|r| !r.name.starts_with("late(") && !r.name.starts_with("w_def(")));
    }

    #[test]
    fn families_are_disjoint_and_cover_every_column() {
        let policy = LatenessPolicy::penalized(1.0, 500.0).unwrap();
        let (prog, idx, _) = build_model(&single_edge(Some(2.0)), &policy).unwrap();
        let all: Vec<usize> = Family::ALL.iter().flat_map(|&f| idx.columns_of(f)).collect();
        let unique: BTreeSet<usize> = all.iter().copied().collect();
        assert_eq!(all.len(), unique.len());
        assert_eq!(unique.len(), prog.num_columns());
        assert!(prog.has_finite_bounds());
    }

    #[test]
    fn used_edge_forces_arrival_equal_to_lead_time() {
        let (prog, idx, _) = build_model(&single_edge(None), &LatenessPolicy::NONE).unwrap();
        let key: ArcProduct = ("S1".into(), "C1".into(), "widget".into());
        let mut lo = prog.lower_bounds();
        let mut hi = prog.upper_bounds();
        lo[idx.beta[&key]] = 1.0;
        let col_a = idx.a[&key];
        for sign in [1.0, -1.0] {
            let mut p = prog.clone();
            for c in &mut p.columns {
                c.cost = 0.0;
            }
            p.columns[col_a].cost = sign;
            hi[idx.zeta[&"S1".into()]] = 1.0;
            let r = solve_lp_bounded(&p, &lo, &hi, &SimplexOptions::default()).unwrap();
            assert_eq!(r.status, LpStatus::Optimal);
            assert!((r.x[col_a] - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let mut inst = single_edge(None);
        inst.entities[1].production_capacity = 5.0;
        assert!(matches!(
            build_model(&inst, &LatenessPolicy::NONE),
            Err(Error::InvalidInstance(_))
        ));
    }
}
