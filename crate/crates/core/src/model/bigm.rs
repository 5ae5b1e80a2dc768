use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sets::{ArcProduct, IndexSets};
use crate::error::{Error, Result};
use crate::instance::SupplyChainInstance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigMEntry {
    /// Upper bound on the arrival time.
    pub arrival: f64,
    /// Coefficient of the late indicator; absent without a due time.
    pub lateness: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BigMTable {
    pub entries: BTreeMap<ArcProduct, BigMEntry>,
}

impl BigMTable {
    pub fn get(&self, key: &ArcProduct) -> Option<&BigMEntry> {
        self.entries.get(key)
    }
}

/// Per-arc bounds from the longest lead-time path into the sending entity.
pub fn compute_big_m(instance: &SupplyChainInstance) -> Result<BigMTable> {
    let sets = IndexSets::new(instance)?;
    from_sets(instance, &sets)
}

pub(crate) fn from_sets(instance: &SupplyChainInstance, sets: &IndexSets) -> Result<BigMTable> {
    let mut entries = BTreeMap::new();
    for arc in &sets.arcs {
        let key = sets.arc_key(instance, arc);
        let arrival = sets.arrival_bound(arc);
        if !arrival.is_finite() || arrival < 0.0 {
            return Err(Error::BigM(format!("{}->{} {}: arrival bound {arrival}", key.0, key.1, key.2)));
        }
        let lateness = match arc.due {
            None => None,
            Some(t) if t.is_finite() => Some((arrival - t).max(0.0) + 1.0),
            Some(t) => return Err(Error::BigM(format!("{}->{} {}: due time {t}", key.0, key.1, key.2))),
        };
        entries.insert(key, BigMEntry { arrival, lateness });
    }
    Ok(BigMTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Edge, Entity, EntityKind, Product, SupplyChainInstance};

    fn chain(due: Option<f64>) -> SupplyChainInstance {
        let k = "widget";
        let mut s = Entity::new("S", EntityKind::Supplier);
        s.production_capacity = 10.0;
        s.production_cost.insert(k.into(), 1.0);
        let a = Entity::new("A", EntityKind::Distributor);
        let mut d = Entity::new("D", EntityKind::Customer);
        d.demand.insert(k.into(), 5.0);
        if let Some(t) = due {
            d.due_time.insert(k.into(), t);
        }
        let mut e1 = Edge::new("S", "A", 10.0);
        e1.lead_time.insert(k.into(), 2.0);
        let mut e2 = Edge::new("A", "D", 10.0);
        e2.lead_time.insert(k.into(), 5.0);
        SupplyChainInstance::new(
            vec![Product {
                id: k.into(),
                name: String::new(),
            }],
            vec![],
            vec![s, a, d],
            vec![e1, e2],
        )
    }

    fn key(i: &str, j: &str) -> ArcProduct {
        (i.into(), j.into(), "widget".into())
    }

    #[test]
    fn supplier_edge_bound_is_its_lead_time() {
        let t = compute_big_m(&chain(None)).unwrap();
        assert_eq!(t.get(&key("S", "A")).unwrap().arrival, 2.0);
    }

    #[test]
    fn chain_accumulates_lead_times() {
        let t = compute_big_m(&chain(None)).unwrap();
        assert_eq!(t.get(&key("A", "D")).unwrap().arrival, 7.0);
        assert_eq!(t.get(&key("A", "D")).unwrap().lateness, None);
    }

    #[test]
    fn generous_due_time_keeps_unit_slack() {
        let t = compute_big_m(&chain(Some(9.0))).unwrap();
        assert_eq!(t.get(&key("A", "D")).unwrap().lateness, Some(1.0));
        let t = compute_big_m(&chain(Some(4.0))).unwrap();
        assert_eq!(t.get(&key("A", "D")).unwrap().lateness, Some(4.0));
    }
}
