//! Supply-chain network instances.
//!
//! An instance is a DAG of entities (suppliers, OEMs, distributors, customers) joined by
//! capacitated edges, with per-product costs, lead times and late-delivery penalties on
//! edges and per-product demand, inventory and cost data on entities. Instances are plain
//! values: every transform returns a new instance.

mod io;
mod transform;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_instance, parse_instance, save_instance, to_canonical_json};
pub use transform::{
    apply_disruption, load_variant_edits, topology_variant, Disruption, EdgeCapacity, TopologyVariant, VariantEdits,
};
pub use validate::{validate, Violation, ViolationCode};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProductId(pub String);

macro_rules! id_impls {
    ($t:ty) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
    };
}
id_impls!(EntityId);
id_impls!(ProductId);

/// `(from, to)` pair identifying an edge.
pub type EdgeKey = (EntityId, EntityId);

/// Per-product parameter map.
pub type ProductMap = BTreeMap<ProductId, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub id: ProductId,
    #[serde(default)]
    pub name: String,
}

/// `conversion_rate` units of `component` are consumed per unit of `successor` produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BomRule {
    pub component: ProductId,
    pub successor: ProductId,
    pub conversion_rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Supplier,
    Oem,
    Distributor,
    Customer,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Supplier => "supplier",
            EntityKind::Oem => "oem",
            EntityKind::Distributor => "distributor",
            EntityKind::Customer => "customer",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    /// Mixed-product production capacity.
    #[serde(default)]
    pub production_capacity: f64,
    /// Fixed cost of opening the production line.
    #[serde(default)]
    pub open_cost: f64,
    /// Unit production cost; the key set is the set of products this entity can make.
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub production_cost: ProductMap,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub holding_cost: ProductMap,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub initial_inventory: ProductMap,
    /// Demand, stored as a nonnegative quantity.
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub demand: ProductMap,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub shortage_penalty: ProductMap,
    /// Time by which the entity needs each product; absent means no deadline.
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub due_time: ProductMap,
}

impl Entity {
    pub fn new(id: &str, kind: EntityKind) -> Self {
        Entity {
            id: id.into(),
            kind,
            production_capacity: 0.0,
            open_cost: 0.0,
            production_cost: ProductMap::new(),
            holding_cost: ProductMap::new(),
            initial_inventory: ProductMap::new(),
            demand: ProductMap::new(),
            shortage_penalty: ProductMap::new(),
            due_time: ProductMap::new(),
        }
    }

    pub fn producible(&self) -> impl Iterator<Item = &ProductId> {
        self.production_cost.keys()
    }

    pub fn can_produce(&self, k: &ProductId) -> bool {
        self.production_cost.contains_key(k)
    }

    pub fn demand_of(&self, k: &ProductId) -> f64 {
        self.demand.get(k).copied().unwrap_or(0.0)
    }

    /// `None` is the unbounded sentinel.
    pub fn due_time_of(&self, k: &ProductId) -> Option<f64> {
        self.due_time.get(k).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: EntityId,
    pub to: EntityId,
    /// Mixed-flow capacity.
    pub capacity: f64,
    #[serde(default)]
    pub fixed_cost: f64,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub unit_cost: ProductMap,
    /// Lead time per carried product; the key set is the set of products the edge can carry.
    #[serde(default)]
    pub lead_time: ProductMap,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub fixed_late_penalty: ProductMap,
    #[serde(default, skip_serializing_if = "ProductMap::is_empty")]
    pub unit_late_penalty: ProductMap,
}

impl Edge {
    pub fn new(from: &str, to: &str, capacity: f64) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
            capacity,
            fixed_cost: 0.0,
            unit_cost: ProductMap::new(),
            lead_time: ProductMap::new(),
            fixed_late_penalty: ProductMap::new(),
            unit_late_penalty: ProductMap::new(),
        }
    }

    pub fn key(&self) -> EdgeKey {
        (self.from.clone(), self.to.clone())
    }

    pub fn products(&self) -> impl Iterator<Item = &ProductId> {
        self.lead_time.keys()
    }

    pub fn carries(&self, k: &ProductId) -> bool {
        self.lead_time.contains_key(k)
    }

    pub fn lead_time_of(&self, k: &ProductId) -> f64 {
        self.lead_time.get(k).copied().unwrap_or(0.0)
    }

    pub fn unit_cost_of(&self, k: &ProductId) -> f64 {
        self.unit_cost.get(k).copied().unwrap_or(0.0)
    }

    pub fn fixed_late_penalty_of(&self, k: &ProductId) -> f64 {
        self.fixed_late_penalty.get(k).copied().unwrap_or(0.0)
    }

    pub fn unit_late_penalty_of(&self, k: &ProductId) -> f64 {
        self.unit_late_penalty.get(k).copied().unwrap_or(0.0)
    }
}

/// Components an entity must have received before it can dispatch a product.
pub type Requirements = BTreeMap<(EntityId, ProductId), BTreeSet<ProductId>>;

#[derive(Clone, Debug, PartialEq)]
pub struct SupplyChainInstance {
    pub products: Vec<Product>,
    pub bom: Vec<BomRule>,
    pub entities: Vec<Entity>,
    pub edges: Vec<Edge>,
    pub requirements: Requirements,
}

impl SupplyChainInstance {
    /// Assembles an instance and derives its requirements map from entity kinds and the BOM.
    pub fn new(products: Vec<Product>, bom: Vec<BomRule>, entities: Vec<Entity>, edges: Vec<Edge>) -> Self {
        let mut instance = SupplyChainInstance {
            products,
            bom,
            entities,
            edges,
            requirements: Requirements::new(),
        };
        instance.requirements = instance.derive_requirements();
        instance
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.iter().find(|e| &e.id == id)
    }

    pub fn edge(&self, from: &EntityId, to: &EntityId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.from == from && &e.to == to)
    }

    pub fn has_product(&self, k: &ProductId) -> bool {
        self.products.iter().any(|p| &p.id == k)
    }

    pub fn entities_of_kind(&self, kind: EntityKind) -> impl Iterator<Item = &Entity> {
        self.entities.iter().filter(move |e| e.kind == kind)
    }

    /// Components consumed to make `k`.
    pub fn bom_predecessors(&self, k: &ProductId) -> BTreeSet<ProductId> {
        self.bom
            .iter()
            .filter(|r| &r.successor == k)
            .map(|r| r.component.clone())
            .collect()
    }

    /// Products `id` sends on at least one outbound edge.
    pub fn dispatched(&self, id: &EntityId) -> BTreeSet<ProductId> {
        self.edges
            .iter()
            .filter(|e| &e.from == id)
            .flat_map(|e| e.products().cloned())
            .collect()
    }

    pub fn received(&self, id: &EntityId) -> BTreeSet<ProductId> {
        self.edges
            .iter()
            .filter(|e| &e.to == id)
            .flat_map(|e| e.products().cloned())
            .collect()
    }

    /// Requirements implied by entity kinds: OEMs wait for the BOM components of what they
    /// dispatch or produce, distributors pass products through, suppliers and customers
    /// have none.
    pub fn derive_requirements(&self) -> Requirements {
        let mut req = Requirements::new();
        for entity in &self.entities {
            match entity.kind {
                EntityKind::Supplier | EntityKind::Customer => {}
                EntityKind::Oem => {
                    let mut products = self.dispatched(&entity.id);
                    products.extend(entity.producible().cloned());
                    for k in products {
                        req.insert((entity.id.clone(), k.clone()), self.bom_predecessors(&k));
                    }
                }
                EntityKind::Distributor => {
                    let mut products = self.dispatched(&entity.id);
                    products.extend(self.received(&entity.id));
                    for k in products {
                        req.insert((entity.id.clone(), k.clone()), BTreeSet::from([k]));
                    }
                }
            }
        }
        req
    }

    pub fn requirements_of(&self, j: &EntityId, k: &ProductId) -> Option<&BTreeSet<ProductId>> {
        self.requirements.get(&(j.clone(), k.clone()))
    }

    /// Total demand summed over all entities and products.
    pub fn total_demand(&self) -> f64 {
        self.entities.iter().flat_map(|e| e.demand.values()).sum()
    }
}

/// Index-based adjacency and a topological order over an instance's entities.
#[derive(Clone, Debug)]
pub struct Topology {
    index: HashMap<EntityId, usize>,
    pub order: Vec<usize>,
    pub inbound: Vec<Vec<usize>>,
    pub outbound: Vec<Vec<usize>>,
}

impl Topology {
    /// Fails with [`Error::Cycle`] if the entity graph is not a DAG and with
    /// [`Error::UnknownReference`] if an edge names a missing entity.
    pub fn new(instance: &SupplyChainInstance) -> Result<Self> {
        let n = instance.entities.len();
        let index: HashMap<EntityId, usize> = instance
            .entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let mut inbound = vec![Vec::new(); n];
        let mut outbound = vec![Vec::new(); n];
        for (ei, edge) in instance.edges.iter().enumerate() {
            let lookup = |id: &EntityId| {
                index.get(id).copied().ok_or_else(|| Error::UnknownReference {
                    kind: "entity",
                    id: id.0.clone(),
                    context: format!("edge {}->{}", edge.from, edge.to),
                })
            };
            let (u, v) = (lookup(&edge.from)?, lookup(&edge.to)?);
            outbound[u].push(ei);
            inbound[v].push(ei);
        }

        // Kahn's algorithm; ties resolved by entity declaration order.
        let mut indegree: Vec<usize> = inbound.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &ei in &outbound[u] {
                let v = index[&instance.edges[ei].to];
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
            return Err(Error::Cycle(instance.entities[stuck].id.0.clone()));
        }
        Ok(Topology {
            index,
            order,
            inbound,
            outbound,
        })
    }

    pub fn position(&self, id: &EntityId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Longest sum of lead times over any path ending at each entity, maximizing over the
    /// products an edge carries. Bounds every readiness time.
    pub fn longest_lead_path(&self, instance: &SupplyChainInstance) -> Vec<f64> {
        let mut longest = vec![0.0_f64; instance.entities.len()];
        for &u in &self.order {
            for &ei in &self.outbound[u] {
                let edge = &instance.edges[ei];
                let v = self.index[&edge.to];
                let lead = edge.lead_time.values().copied().fold(0.0, f64::max);
                longest[v] = longest[v].max(longest[u] + lead);
            }
        }
        longest
    }

    /// Longest path length, in edges, from each entity to any customer.
    pub fn depth_to_customer(&self, instance: &SupplyChainInstance) -> Vec<usize> {
        let mut depth = vec![0usize; instance.entities.len()];
        for &u in self.order.iter().rev() {
            for &ei in &self.outbound[u] {
                let v = self.index[&instance.edges[ei].to];
                depth[u] = depth[u].max(depth[v] + 1);
            }
        }
        depth
    }
}
