use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Edge, Entity, EntityId, ProductId, SupplyChainInstance, Topology};
use crate::error::{Error, Result};

/// Lead-time (and optionally capacity) shock on every edge leaving one entity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disruption {
    pub entity: EntityId,
    pub lead_time_multiplier: f64,
    #[serde(default = "one")]
    pub capacity_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

impl Disruption {
    pub fn lead_time(entity: &str, multiplier: f64) -> Self {
        Disruption {
            entity: entity.into(),
            lead_time_multiplier: multiplier,
            capacity_multiplier: 1.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.lead_time_multiplier >= 1.0) || !self.lead_time_multiplier.is_finite() {
            return Err(Error::Config(format!(
                "lead_time_multiplier {} must be a finite value >= 1",
                self.lead_time_multiplier
            )));
        }
        if !(0.0..=1.0).contains(&self.capacity_multiplier) {
            return Err(Error::Config(format!(
                "capacity_multiplier {} must lie in [0, 1]",
                self.capacity_multiplier
            )));
        }
        Ok(())
    }
}

/// Scales lead times and capacity of every outbound edge of `d.entity`; the input is untouched.
pub fn apply_disruption(instance: &SupplyChainInstance, d: &Disruption) -> Result<SupplyChainInstance> {
    d.check()?;
    if instance.entity(&d.entity).is_none() {
        return Err(Error::UnknownReference {
            kind: "entity",
            id: d.entity.0.clone(),
            context: "disruption".into(),
        });
    }
    let mut out = instance.clone();
    for edge in out.edges.iter_mut().filter(|e| e.from == d.entity) {
        for l in edge.lead_time.values_mut() {
            *l *= d.lead_time_multiplier;
        }
        edge.capacity *= d.capacity_multiplier;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyVariant {
    Tree,
    ReverseTree,
    Chain,
}

impl TopologyVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            TopologyVariant::Tree => "tree",
            TopologyVariant::ReverseTree => "reverse_tree",
            TopologyVariant::Chain => "chain",
        }
    }
}

impl fmt::Display for TopologyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(TopologyVariant::Tree),
            "reverse_tree" | "reverse-tree" => Ok(TopologyVariant::ReverseTree),
            "chain" => Ok(TopologyVariant::Chain),
            other => Err(Error::Config(format!("unknown topology variant `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeCapacity {
    pub from: EntityId,
    pub to: EntityId,
    pub capacity: f64,
}

/// Structural edits turning one topology into another. Removals run first (removing an
/// entity drops its incident edges), then additions, then capacity reassignments.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantEdits {
    #[serde(default)]
    pub remove_entities: Vec<EntityId>,
    #[serde(default)]
    pub remove_edges: Vec<(EntityId, EntityId)>,
    #[serde(default)]
    pub add_entities: Vec<Entity>,
    #[serde(default)]
    pub add_edges: Vec<Edge>,
    #[serde(default)]
    pub production_capacity: BTreeMap<EntityId, f64>,
    #[serde(default)]
    pub edge_capacity: Vec<EdgeCapacity>,
}

impl VariantEdits {
    pub fn is_empty(&self) -> bool {
        *self == VariantEdits::default()
    }
}

pub fn load_variant_edits(path: impl AsRef<Path>) -> Result<VariantEdits> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path: path.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })
}

const CONSERVATION_TOL: f64 = 1e-9;

/// Applies `edits` and checks that per-product production capacity and per-product demand
/// are unchanged and that the result is still a DAG.
pub fn topology_variant(
    instance: &SupplyChainInstance,
    _variant: TopologyVariant,
    edits: &VariantEdits,
) -> Result<SupplyChainInstance> {
    let mut entities: Vec<Entity> = instance
        .entities
        .iter()
        .filter(|e| !edits.remove_entities.contains(&e.id))
        .cloned()
        .collect();
    for id in &edits.remove_entities {
        if instance.entity(id).is_none() {
            return Err(unknown_entity(id, "variant removal"));
        }
    }
    let mut edges: Vec<Edge> = instance
        .edges
        .iter()
        .filter(|e| {
            !edits.remove_entities.contains(&e.from)
                && !edits.remove_entities.contains(&e.to)
                && !edits.remove_edges.contains(&(e.from.clone(), e.to.clone()))
        })
        .cloned()
        .collect();
    entities.extend(edits.add_entities.iter().cloned());
    edges.extend(edits.add_edges.iter().cloned());

    for (id, &cap) in &edits.production_capacity {
        let entity = entities
            .iter_mut()
            .find(|e| &e.id == id)
            .ok_or_else(|| unknown_entity(id, "capacity reassignment"))?;
        entity.production_capacity = cap;
    }
    for ec in &edits.edge_capacity {
        let edge = edges
            .iter_mut()
            .find(|e| e.from == ec.from && e.to == ec.to)
            .ok_or_else(|| unknown_entity(&ec.from, &format!("edge capacity {}->{}", ec.from, ec.to)))?;
        edge.capacity = ec.capacity;
    }

    let out = SupplyChainInstance::new(instance.products.clone(), instance.bom.clone(), entities, edges);
    Topology::new(&out)?;

    let before = capacity_by_product(instance);
    let after = capacity_by_product(&out);
    for k in before.keys().chain(after.keys()) {
        let (b, a) = (before.get(k).copied().unwrap_or(0.0), after.get(k).copied().unwrap_or(0.0));
        if (a - b).abs() > CONSERVATION_TOL * b.abs().max(1.0) {
            return Err(Error::Conservation(format!(
                "production capacity for `{k}` changes from {b} to {a}"
            )));
        }
    }
    let before = demand_by_product(instance);
    let after = demand_by_product(&out);
    for k in before.keys().chain(after.keys()) {
        let (b, a) = (before.get(k).copied().unwrap_or(0.0), after.get(k).copied().unwrap_or(0.0));
        if (a - b).abs() > CONSERVATION_TOL * b.abs().max(1.0) {
            return Err(Error::Conservation(format!("demand for `{k}` changes from {b} to {a}")));
        }
    }
    Ok(out)
}

fn unknown_entity(id: &EntityId, context: &str) -> Error {
    Error::UnknownReference {
        kind: "entity",
        id: id.0.clone(),
        context: context.to_owned(),
    }
}

fn capacity_by_product(instance: &SupplyChainInstance) -> BTreeMap<ProductId, f64> {
    let mut out = BTreeMap::new();
    for e in &instance.entities {
        for k in e.producible() {
            *out.entry(k.clone()).or_insert(0.0) += e.production_capacity;
        }
    }
    out
}

fn demand_by_product(instance: &SupplyChainInstance) -> BTreeMap<ProductId, f64> {
    let mut out = BTreeMap::new();
    for e in &instance.entities {
        for (k, d) in &e.demand {
            *out.entry(k.clone()).or_insert(0.0) += d;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate, EntityKind, Product};

    fn fork() -> SupplyChainInstance {
        let mut s1 = Entity::new("S1", EntityKind::Supplier);
        s1.production_capacity = 6.0;
        s1.production_cost.insert("k".into(), 1.0);
        let mut s2 = s1.clone();
        s2.id = "S2".into();
        let mut c = Entity::new("C1", EntityKind::Customer);
        c.demand.insert("k".into(), 4.0);
        let mut e1 = Edge::new("S1", "C1", 5.0);
        e1.lead_time.insert("k".into(), 2.0);
        let mut e2 = Edge::new("S2", "C1", 5.0);
        e2.lead_time.insert("k".into(), 3.0);
        SupplyChainInstance::new(
            vec![Product { id: "k".into(), name: "k".into() }],
            vec![],
            vec![s1, s2, c],
            vec![e1, e2],
        )
    }

    #[test]
    fn disruption_scales_outbound_only() {
        let inst = fork();
        let out = apply_disruption(&inst, &Disruption::lead_time("S1", 2.0)).unwrap();
        assert_eq!(out.edges[0].lead_time_of(&"k".into()), 4.0);
        assert_eq!(out.edges[1], inst.edges[1]);
        assert_eq!(inst.edges[0].lead_time_of(&"k".into()), 2.0);
    }

    #[test]
    fn identity_disruption() {
        let inst = fork();
        assert_eq!(apply_disruption(&inst, &Disruption::lead_time("S2", 1.0)).unwrap(), inst);
    }

    #[test]
    fn disruption_domain_and_reference() {
        let inst = fork();
        assert!(matches!(apply_disruption(&inst, &Disruption::lead_time("S1", 0.5)), Err(Error::Config(_))));
        assert!(matches!(
            apply_disruption(&inst, &Disruption::lead_time("Q", 2.0)),
            Err(Error::UnknownReference { .. })
        ));
    }

    #[test]
    fn capacity_must_be_conserved() {
        let inst = fork();
        let edits = VariantEdits {
            remove_entities: vec!["S2".into()],
            ..Default::default()
        };
        assert!(matches!(
            topology_variant(&inst, TopologyVariant::Chain, &edits),
            Err(Error::Conservation(_))
        ));
        let edits = VariantEdits {
            remove_entities: vec!["S2".into()],
            production_capacity: BTreeMap::from([("S1".into(), 12.0)]),
            ..Default::default()
        };
        let out = topology_variant(&inst, TopologyVariant::Chain, &edits).unwrap();
        assert_eq!(out.entities.len(), 2);
        assert_eq!(out.edges.len(), 1);
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn empty_edits_are_identity() {
        let inst = fork();
        let out = topology_variant(&inst, TopologyVariant::Tree, &VariantEdits::default()).unwrap();
        assert_eq!(out, inst);
    }

    #[test]
    fn demand_must_be_conserved() {
        let inst = fork();
        let mut c2 = Entity::new("C2", EntityKind::Customer);
        c2.demand.insert("k".into(), 1.0);
        let edits = VariantEdits {
            add_entities: vec![c2],
            ..Default::default()
        };
        assert!(matches!(
            topology_variant(&inst, TopologyVariant::ReverseTree, &edits),
            Err(Error::Conservation(_))
        ));
    }

    #[test]
    fn cyclic_result_rejected() {
        let inst = fork();
        let d = Entity::new("D1", EntityKind::Distributor);
        let e = Entity::new("D2", EntityKind::Distributor);
        let edits = VariantEdits {
            add_entities: vec![d, e],
            add_edges: vec![Edge::new("D1", "D2", 1.0), Edge::new("D2", "D1", 1.0)],
            ..Default::default()
        };
        assert!(matches!(
            topology_variant(&inst, TopologyVariant::ReverseTree, &edits),
            Err(Error::Cycle(_))
        ));
    }
}
