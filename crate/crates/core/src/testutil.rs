//! Hand-built instances shared by unit tests.

use crate::instance::{Edge, Entity, EntityKind, Product, SupplyChainInstance};

/// `S1 -> C1` carrying one product: demand 4, lead time 4, shortage penalty 100.
pub fn single_edge(due: Option<f64>) -> SupplyChainInstance {
    let k = "widget";
    let mut s = Entity::new("S1", EntityKind::Supplier);
    s.production_capacity = 10.0;
    s.production_cost.insert(k.into(), 1.0);
    let mut c = Entity::new("C1", EntityKind::Customer);
    c.demand.insert(k.into(), 4.0);
    c.shortage_penalty.insert(k.into(), 100.0);
    if let Some(t) = due {
        c.due_time.insert(k.into(), t);
    }
    let mut e = Edge::new("S1", "C1", 10.0);
    e.fixed_cost = 3.0;
    e.unit_cost.insert(k.into(), 2.0);
    e.lead_time.insert(k.into(), 4.0);
    e.fixed_late_penalty.insert(k.into(), 7.0);
    e.unit_late_penalty.insert(k.into(), 7.0);
    SupplyChainInstance::new(
        vec![Product {
            id: k.into(),
            name: String::new(),
        }],
        vec![],
        vec![s, c],
        vec![e],
    )
}
