use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::{EntityKind, SupplyChainInstance, Topology};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    DuplicateProduct,
    DuplicateEntity,
    DuplicateEdge,
    SelfLoop,
    UnknownEntity,
    UnknownProduct,
    NonPositiveConversion,
    BomCycle,
    GraphNotDag,
    SupplierHasUpstream,
    SupplierHasDemand,
    CustomerHasDownstream,
    CustomerHasCapacity,
    NegativeParameter,
    RequirementsMismatch,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DuplicateProduct => "duplicate-product",
            ViolationCode::DuplicateEntity => "duplicate-entity",
            ViolationCode::DuplicateEdge => "duplicate-edge",
            ViolationCode::SelfLoop => "self-loop",
            ViolationCode::UnknownEntity => "unknown-entity",
            ViolationCode::UnknownProduct => "unknown-product",
            ViolationCode::NonPositiveConversion => "bom-nonpositive-rate",
            ViolationCode::BomCycle => "bom-cycle",
            ViolationCode::GraphNotDag => "graph-not-DAG",
            ViolationCode::SupplierHasUpstream => "supplier-has-upstream",
            ViolationCode::SupplierHasDemand => "supplier-has-demand",
            ViolationCode::CustomerHasDownstream => "customer-has-downstream",
            ViolationCode::CustomerHasCapacity => "customer-has-capacity",
            ViolationCode::NegativeParameter => "negative-parameter",
            ViolationCode::RequirementsMismatch => "requirements-mismatch",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub ids: Vec<String>,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, ids: Vec<String>, message: impl Into<String>) -> Self {
        Violation {
            code,
            ids,
            message: message.into(),
        }
    }
}

/// `CODE<TAB>ids<TAB>message`, ids comma-separated.
impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.code, self.ids.join(","), self.message)
    }
}

/// Checks every structural invariant of an instance. Violations are data; an empty
/// result means the instance is valid.
pub fn validate(instance: &SupplyChainInstance) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for p in &instance.products {
        if !seen.insert(&p.id) {
            out.push(Violation::new(DuplicateProduct, vec![p.id.0.clone()], "product id declared twice"));
        }
    }
    let mut seen = HashSet::new();
    for e in &instance.entities {
        if !seen.insert(&e.id) {
            out.push(Violation::new(DuplicateEntity, vec![e.id.0.clone()], "entity id declared twice"));
        }
    }

    let product_known = |k: &super::ProductId| instance.has_product(k);

    // BOM
    for r in &instance.bom {
        for k in [&r.component, &r.successor] {
            if !product_known(k) {
                out.push(Violation::new(UnknownProduct, vec![k.0.clone()], "bom rule references undeclared product"));
            }
        }
        if !(r.conversion_rate > 0.0) {
            out.push(Violation::new(
                NonPositiveConversion,
                vec![r.component.0.clone(), r.successor.0.clone()],
                format!("conversion rate {} must be positive", r.conversion_rate),
            ));
        }
    }
    if let Some(k) = bom_cycle(instance) {
        out.push(Violation::new(BomCycle, vec![k], "bill of materials is cyclic"));
    }

    // entities
    for e in &instance.entities {
        let id = e.id.0.clone();
        let maps = [
            ("production_cost", &e.production_cost),
            ("holding_cost", &e.holding_cost),
            ("initial_inventory", &e.initial_inventory),
            ("demand", &e.demand),
            ("shortage_penalty", &e.shortage_penalty),
            ("due_time", &e.due_time),
        ];
        for (field, map) in maps {
            for (k, &v) in map {
                if !product_known(k) {
                    out.push(Violation::new(UnknownProduct, vec![id.clone(), k.0.clone()], format!("{field} references undeclared product")));
                }
                if !(v >= 0.0) {
                    out.push(Violation::new(NegativeParameter, vec![id.clone(), k.0.clone()], format!("{field} = {v}")));
                }
            }
        }
        for (field, v) in [("production_capacity", e.production_capacity), ("open_cost", e.open_cost)] {
            if !(v >= 0.0) {
                out.push(Violation::new(NegativeParameter, vec![id.clone()], format!("{field} = {v}")));
            }
        }
        match e.kind {
            EntityKind::Supplier if !e.demand.is_empty() && e.demand.values().any(|&d| d > 0.0) => {
                out.push(Violation::new(SupplierHasDemand, vec![id.clone()], "suppliers do not consume products"));
            }
            EntityKind::Customer if e.production_capacity != 0.0 => {
                out.push(Violation::new(CustomerHasCapacity, vec![id.clone()], "customers have zero production capacity"));
            }
            _ => {}
        }
    }

    // edges
    let mut pairs = HashSet::new();
    for edge in &instance.edges {
        let ids = vec![edge.from.0.clone(), edge.to.0.clone()];
        if edge.from == edge.to {
            out.push(Violation::new(SelfLoop, ids.clone(), "edge starts and ends at the same entity"));
        }
        if !pairs.insert((&edge.from, &edge.to)) {
            out.push(Violation::new(DuplicateEdge, ids.clone(), "edge declared twice"));
        }
        let from = instance.entity(&edge.from);
        let to = instance.entity(&edge.to);
        for (end, found) in [(&edge.from, from), (&edge.to, to)] {
            if found.is_none() {
                out.push(Violation::new(UnknownEntity, vec![end.0.clone()], "edge endpoint not declared"));
            }
        }
        if let Some(to) = to {
            if to.kind == EntityKind::Supplier {
                out.push(Violation::new(SupplierHasUpstream, ids.clone(), format!("supplier {} has an inbound edge", to.id)));
            }
        }
        if let Some(from) = from {
            if from.kind == EntityKind::Customer {
                out.push(Violation::new(CustomerHasDownstream, ids.clone(), format!("customer {} has an outbound edge", from.id)));
            }
        }
        for (field, v) in [("capacity", edge.capacity), ("fixed_cost", edge.fixed_cost)] {
            if !(v >= 0.0) {
                out.push(Violation::new(NegativeParameter, ids.clone(), format!("{field} = {v}")));
            }
        }
        let maps = [
            ("lead_time", &edge.lead_time),
            ("unit_cost", &edge.unit_cost),
            ("fixed_late_penalty", &edge.fixed_late_penalty),
            ("unit_late_penalty", &edge.unit_late_penalty),
        ];
        for (field, map) in maps {
            for (k, &v) in map {
                let mut ids = ids.clone();
                ids.push(k.0.clone());
                if !product_known(k) {
                    out.push(Violation::new(UnknownProduct, ids.clone(), format!("{field} references undeclared product")));
                }
                if !(v >= 0.0) {
                    out.push(Violation::new(NegativeParameter, ids, format!("{field} = {v}")));
                }
            }
        }
    }

    // Only meaningful once every edge endpoint resolves.
    if !out.iter().any(|v| v.code == UnknownEntity) {
        if let Err(Error::Cycle(at)) = Topology::new(instance) {
            out.push(Violation::new(GraphNotDag, vec![at], "entity graph contains a directed cycle"));
        }
    }

    let derived = instance.derive_requirements();
    if derived != instance.requirements {
        let mut keys: BTreeSet<_> = derived.keys().collect();
        keys.extend(instance.requirements.keys());
        for key in keys {
            if derived.get(key) != instance.requirements.get(key) {
                out.push(Violation::new(
                    RequirementsMismatch,
                    vec![key.0 .0.clone(), key.1 .0.clone()],
                    "requirements differ from those implied by entity kind and bill of materials",
                ));
            }
        }
    }

    out
}

fn bom_cycle(instance: &SupplyChainInstance) -> Option<String> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in &instance.bom {
        succ.entry(r.component.as_str()).or_default().push(r.successor.as_str());
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(n: &'a str, succ: &BTreeMap<&'a str, Vec<&'a str>>, state: &mut BTreeMap<&'a str, u8>) -> Option<String> {
        match state.get(n) {
            Some(1) => return Some(n.to_owned()),
            Some(2) => return None,
            _ => {}
        }
        state.insert(n, 1);
        for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            if let Some(c) = visit(m, succ, state) {
                return Some(c);
            }
        }
        state.insert(n, 2);
        None
    }
    let roots: Vec<&str> = succ.keys().copied().collect();
    roots.into_iter().find_map(|n| visit(n, &succ, &mut state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{BomRule, Edge, Entity, Product, SupplyChainInstance};

    fn chain() -> SupplyChainInstance {
        let mut s1 = Entity::new("S1", EntityKind::Supplier);
        s1.production_cost.insert("k".into(), 1.0);
        s1.production_capacity = 5.0;
        let a1 = Entity::new("A1", EntityKind::Distributor);
        let mut c1 = Entity::new("C1", EntityKind::Customer);
        c1.demand.insert("k".into(), 3.0);
        let mut e1 = Edge::new("S1", "A1", 5.0);
        e1.lead_time.insert("k".into(), 1.0);
        let mut e2 = Edge::new("A1", "C1", 5.0);
        e2.lead_time.insert("k".into(), 1.0);
        SupplyChainInstance::new(
            vec![Product { id: "k".into(), name: String::new() }],
            vec![],
            vec![s1, a1, c1],
            vec![e1, e2],
        )
    }

    fn codes(inst: &SupplyChainInstance) -> Vec<ViolationCode> {
        validate(inst).into_iter().map(|v| v.code).collect()
    }

    #[test]
    fn valid_chain() {
        assert_eq!(validate(&chain()), vec![]);
    }

    #[test]
    fn cycle_through_supplier() {
        let mut inst = chain();
        let mut back = Edge::new("A1", "S1", 1.0);
        back.lead_time.insert("k".into(), 1.0);
        inst.edges.push(back);
        let found = codes(&inst);
        assert!(found.contains(&ViolationCode::GraphNotDag), "{found:?}");
        assert!(found.contains(&ViolationCode::SupplierHasUpstream));
    }

    #[test]
    fn supplier_with_inbound_edge() {
        let mut inst = chain();
        inst.entities.push(Entity::new("S2", EntityKind::Supplier));
        inst.edges.push(Edge::new("S1", "S2", 1.0));
        assert_eq!(codes(&inst), vec![ViolationCode::SupplierHasUpstream]);
    }

    #[test]
    fn customer_rules() {
        let mut inst = chain();
        inst.entities[2].production_capacity = 1.0;
        inst.entities.push(Entity::new("D9", EntityKind::Distributor));
        inst.edges.push(Edge::new("C1", "D9", 1.0));
        inst.requirements = inst.derive_requirements();
        let found = codes(&inst);
        assert!(found.contains(&ViolationCode::CustomerHasCapacity));
        assert!(found.contains(&ViolationCode::CustomerHasDownstream));
    }

    #[test]
    fn bom_rules() {
        let mut inst = chain();
        inst.products.push(Product { id: "m".into(), name: String::new() });
        inst.bom.push(BomRule { component: "k".into(), successor: "m".into(), conversion_rate: 0.0 });
        inst.bom.push(BomRule { component: "m".into(), successor: "k".into(), conversion_rate: 1.0 });
        let found = codes(&inst);
        assert!(found.contains(&ViolationCode::NonPositiveConversion));
        assert!(found.contains(&ViolationCode::BomCycle));
    }

    #[test]
    fn hand_edited_requirements_flagged() {
        let mut inst = chain();
        inst.requirements.clear();
        assert_eq!(codes(&inst), vec![ViolationCode::RequirementsMismatch]);
    }

    #[test]
    fn display_is_tab_separated() {
        let v = Violation::new(ViolationCode::SelfLoop, vec!["A".into(), "A".into()], "loop");
        assert_eq!(v.to_string(), "self-loop\tA,A\tloop");
    }
}
