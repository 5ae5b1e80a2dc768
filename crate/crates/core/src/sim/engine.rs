use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::lead_time::{sample_lead_time, LeadTimeModel};
use super::report::SimulationReport;
use crate::error::{Error, Result};
use crate::instance::{EntityKind, SupplyChainInstance};
use crate::model::{ArcProduct, EntityProduct, FlowPlan, IndexSets};

pub const DEFAULT_REPLICATIONS: usize = 300;

/// Realized times of one replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationResult {
    pub replication: u64,
    pub lead_times: BTreeMap<ArcProduct, f64>,
    pub arrivals: BTreeMap<ArcProduct, f64>,
    pub readiness: BTreeMap<EntityProduct, f64>,
    /// Per customer-product with a due time and at least one used inbound flow.
    pub lateness: BTreeMap<EntityProduct, f64>,
}

/// Sum that yields `+0.0` for an empty input, where `Iterator::sum` yields `-0.0`.
pub(crate) fn total<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(0.0, |s, v| s + v)
}

impl ReplicationResult {
    pub fn total_lateness(&self) -> f64 {
        total(self.lateness.values())
    }

    /// Record-per-entry JSON: `{"from", "to", "product", "value"}` for arcs and
    /// `{"entity", "product", "value"}` for readiness and lateness.
    pub fn to_json(&self) -> Value {
        let arcs = |m: &BTreeMap<ArcProduct, f64>| -> Vec<Value> {
            m.iter()
                .map(|((i, j, k), v)| json!({"from": i, "to": j, "product": k, "value": v}))
                .collect()
        };
        let pairs = |m: &BTreeMap<EntityProduct, f64>| -> Vec<Value> {
            m.iter().map(|((i, k), v)| json!({"entity": i, "product": k, "value": v})).collect()
        };
        json!({
            "replication": self.replication,
            "lead_times": arcs(&self.lead_times),
            "arrivals": arcs(&self.arrivals),
            "readiness": pairs(&self.readiness),
            "lateness": pairs(&self.lateness),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Simulation(format!("replication record: bad or missing `{what}`"));
        let text = |v: &Value, f: &str| v.get(f).and_then(Value::as_str).map(str::to_owned).ok_or_else(|| bad(f));
        let num = |v: &Value| v.get("value").and_then(Value::as_f64).ok_or_else(|| bad("value"));
        let list = |f: &str| value.get(f).and_then(Value::as_array).ok_or_else(|| bad(f));
        let arcs = |f: &str| -> Result<BTreeMap<ArcProduct, f64>> {
            list(f)?
                .iter()
                .map(|r| {
                    let key = (
                        text(r, "from")?.as_str().into(),
                        text(r, "to")?.as_str().into(),
                        text(r, "product")?.as_str().into(),
                    );
                    Ok((key, num(r)?))
                })
                .collect()
        };
        let pairs = |f: &str| -> Result<BTreeMap<EntityProduct, f64>> {
            list(f)?
                .iter()
                .map(|r| Ok(((text(r, "entity")?.as_str().into(), text(r, "product")?.as_str().into()), num(r)?)))
                .collect()
        };
        Ok(ReplicationResult {
            replication: value.get("replication").and_then(Value::as_u64).ok_or_else(|| bad("replication"))?,
            lead_times: arcs("lead_times")?,
            arrivals: arcs("arrivals")?,
            readiness: pairs("readiness")?,
            lateness: pairs("lateness")?,
        })
    }
}

/// The used part of a plan resolved against an instance, reusable across replications.
pub(crate) struct Replay<'a> {
    instance: &'a SupplyChainInstance,
    sets: IndexSets,
    keys: Vec<ArcProduct>,
    used: Vec<bool>,
}

impl<'a> Replay<'a> {
    pub fn new(instance: &'a SupplyChainInstance, plan: &FlowPlan) -> Result<Self> {
        let sets = IndexSets::new(instance)?;
        let keys: Vec<ArcProduct> = sets.arcs.iter().map(|a| sets.arc_key(instance, a)).collect();
        for key in plan.used_edges() {
            if !keys.contains(&key) {
                return Err(Error::Simulation(format!(
                    "plan uses {}->{} for `{}`, which the instance does not carry",
                    key.0, key.1, key.2
                )));
            }
        }
        let used = keys.iter().map(|k| plan.is_used(k)).collect();
        Ok(Replay {
            instance,
            sets,
            keys,
            used,
        })
    }

    /// Used arcs in canonical order (edge declaration order, products sorted).
    pub fn used_arcs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.keys.len()).filter(|&a| self.used[a])
    }

    pub fn draw(&self, model: &LeadTimeModel, rng: &mut impl Rng) -> Result<Vec<f64>> {
        let mut lead = vec![0.0; self.keys.len()];
        for a in self.used_arcs() {
            lead[a] = sample_lead_time(model, self.sets.arcs[a].lead, rng)?;
        }
        Ok(lead)
    }

    /// Propagates realized lead times through the used arcs in topological order.
    pub fn propagate(&self, replication: u64, lead: &[f64]) -> ReplicationResult {
        let inst = self.instance;
        let sets = &self.sets;
        let mut arrival = vec![0.0; self.keys.len()];
        let mut readiness = BTreeMap::new();
        for &j in &sets.topology.order {
            let e = &inst.entities[j];
            let mut ready_at = BTreeMap::new();
            for k in &sets.dispatched[j] {
                let o = if e.kind == EntityKind::Supplier {
                    0.0
                } else {
                    // An entity waits for every required upstream flow.
                    sets.gating_arcs(inst, j, k)
                        .filter(|&a| self.used[a])
                        .map(|a| arrival[a])
                        .fold(0.0, f64::max)
                };
                ready_at.insert(k, o);
                readiness.insert((e.id.clone(), k.clone()), o);
            }
            for &a in &sets.outbound_arcs[j] {
                if self.used[a] {
                    arrival[a] = ready_at[&sets.arcs[a].product] + lead[a];
                }
            }
        }

        let mut lateness = BTreeMap::new();
        for (j, e) in inst.entities.iter().enumerate() {
            if e.kind != EntityKind::Customer {
                continue;
            }
            for &a in &sets.inbound_arcs[j] {
                let arc = &sets.arcs[a];
                let (Some(t), true) = (arc.due, self.used[a]) else {
                    continue;
                };
                let late = (arrival[a] - t).max(0.0);
                let slot = lateness.entry((e.id.clone(), arc.product.clone())).or_insert(0.0_f64);
                *slot = slot.max(late);
            }
        }

        let mut lead_times = BTreeMap::new();
        let mut arrivals = BTreeMap::new();
        for a in self.used_arcs() {
            lead_times.insert(self.keys[a].clone(), lead[a]);
            arrivals.insert(self.keys[a].clone(), arrival[a]);
        }
        ReplicationResult {
            replication,
            lead_times,
            arrivals,
            readiness,
            lateness,
        }
    }
}

/// Generator for replication `replication`: ChaCha8 keyed by the master seed, one
/// stream per replication, so results do not depend on scheduling.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// One replication of `plan` with lead times drawn from `rng`.
pub fn simulate_once(
    instance: &SupplyChainInstance,
    plan: &FlowPlan,
    model: &LeadTimeModel,
    rng: &mut impl Rng,
) -> Result<ReplicationResult> {
    model.check()?;
    let replay = Replay::new(instance, plan)?;
    let lead = replay.draw(model, rng)?;
    Ok(replay.propagate(0, &lead))
}

/// Propagates the given realized lead times, one per used edge-product of `plan`.
pub fn replay_lead_times(
    instance: &SupplyChainInstance,
    plan: &FlowPlan,
    lead_times: &BTreeMap<ArcProduct, f64>,
) -> Result<ReplicationResult> {
    let replay = Replay::new(instance, plan)?;
    let mut lead = vec![0.0; replay.keys.len()];
    for a in replay.used_arcs() {
        let key = &replay.keys[a];
        lead[a] = match lead_times.get(key) {
            Some(&l) if l.is_finite() && l >= 0.0 => l,
            Some(&l) => {
                return Err(Error::Simulation(format!("lead time {l} on {}->{} `{}`", key.0, key.1, key.2)));
            }
            None => {
                return Err(Error::Simulation(format!("no lead time for {}->{} `{}`", key.0, key.1, key.2)));
            }
        };
    }
    Ok(replay.propagate(0, &lead))
}

pub fn run_replications(
    instance: &SupplyChainInstance,
    plan: &FlowPlan,
    model: &LeadTimeModel,
    n: usize,
    master_seed: u64,
) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::Simulation("replication count must be at least 1".into()));
    }
    model.check()?;
    let replay = Replay::new(instance, plan)?;
    let results: Vec<ReplicationResult> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(master_seed, r);
            let lead = replay.draw(model, &mut rng)?;
            Ok(replay.propagate(r, &lead))
        })
        .collect::<Result<_>>()?;
    Ok(SimulationReport::from_results(*model, master_seed, &results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{BomRule, Edge, Entity, Product};

    /// Two suppliers feed an OEM that needs both components, then one customer.
    fn join(lead_a: f64, lead_b: f64) -> (SupplyChainInstance, FlowPlan) {
        let mut s1 = Entity::new("S1", EntityKind::Supplier);
        s1.production_cost.insert("a".into(), 1.0);
        s1.production_capacity = 5.0;
        let mut s2 = Entity::new("S2", EntityKind::Supplier);
        s2.production_cost.insert("b".into(), 1.0);
        s2.production_capacity = 5.0;
        let mut a1 = Entity::new("A1", EntityKind::Oem);
        a1.production_cost.insert("c".into(), 1.0);
        a1.production_capacity = 5.0;
        let mut c1 = Entity::new("C1", EntityKind::Customer);
        c1.demand.insert("c".into(), 1.0);
        c1.due_time.insert("c".into(), 9.0);
        let edge = |f: &str, t: &str, k: &str, l: f64| {
            let mut e = Edge::new(f, t, 5.0);
            e.lead_time.insert(k.into(), l);
            e
        };
        let products = ["a", "b", "c"].map(|k| Product {
            id: k.into(),
            name: String::new(),
        });
        let bom = ["a", "b"]
            .map(|k| BomRule {
                component: k.into(),
                successor: "c".into(),
                conversion_rate: 1.0,
            })
            .to_vec();
        let inst = SupplyChainInstance::new(
            products.to_vec(),
            bom,
            vec![s1, s2, a1, c1],
            vec![
                edge("S1", "A1", "a", lead_a),
                edge("S2", "A1", "b", lead_b),
                edge("A1", "C1", "c", 2.0),
            ],
        );
        let mut plan = FlowPlan::default();
        for (f, t, k) in [("S1", "A1", "a"), ("S2", "A1", "b"), ("A1", "C1", "c")] {
            plan.beta.insert((f.into(), t.into(), k.into()), 1.0);
        }
        (inst, plan)
    }

    #[test]
    fn oem_waits_for_the_later_component() {
        let (inst, plan) = join(3.0, 8.0);
        let mut rng = replication_rng(0, 0);
        let r = simulate_once(&inst, &plan, &LeadTimeModel::deterministic(), &mut rng).unwrap();
        assert_eq!(r.readiness[&("A1".into(), "c".into())], 8.0);
        assert_eq!(r.arrivals[&("A1".into(), "C1".into(), "c".into())], 10.0);
        assert_eq!(r.lateness[&("C1".into(), "c".into())], 1.0);
    }

    #[test]
    fn unused_upstream_does_not_delay() {
        let (inst, mut plan) = join(3.0, 8.0);
        plan.beta.insert(("S2".into(), "A1".into(), "b".into()), 0.0);
        let mut rng = replication_rng(0, 0);
        let r = simulate_once(&inst, &plan, &LeadTimeModel::deterministic(), &mut rng).unwrap();
        assert_eq!(r.readiness[&("A1".into(), "c".into())], 3.0);
        assert_eq!(r.lateness[&("C1".into(), "c".into())], 0.0);
    }

    #[test]
    fn plan_edge_missing_from_instance_is_an_error() {
        let (inst, mut plan) = join(3.0, 8.0);
        plan.beta.insert(("S1".into(), "C1".into(), "a".into()), 1.0);
        let mut rng = replication_rng(0, 0);
        assert!(simulate_once(&inst, &plan, &LeadTimeModel::default(), &mut rng).is_err());
    }

    #[test]
    fn single_replication_report_matches_it() {
        let (inst, plan) = join(3.0, 8.0);
        let model = LeadTimeModel::default();
        let report = run_replications(&inst, &plan, &model, 1, 9).unwrap();
        let once = simulate_once(&inst, &plan, &model, &mut replication_rng(9, 0)).unwrap();
        assert_eq!(report.replications.len(), 1);
        assert_eq!(report.replications[0].total, once.total_lateness());
        assert_eq!(report.customers[0].mean, once.total_lateness());
        assert_eq!(report.customers[0].std, 0.0);
    }

    #[test]
    fn json_round_trip() {
        let (inst, plan) = join(3.0, 8.0);
        let r = simulate_once(&inst, &plan, &LeadTimeModel::default(), &mut replication_rng(5, 2)).unwrap();
        assert_eq!(ReplicationResult::from_json(&r.to_json()).unwrap(), r);
        assert!(ReplicationResult::from_json(&serde_json::json!({"replication": 0})).is_err());
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let (inst, plan) = join(3.0, 8.0);
        let model = LeadTimeModel::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_replications(&inst, &plan, &model, 64, 42).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
