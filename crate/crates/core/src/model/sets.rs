//! Index sets of the flow model, shared by the builder, the plan checker and the simulator.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::instance::{EntityId, EntityKind, ProductId, SupplyChainInstance, Topology};

/// `(i, j, k)`: product `k` on edge `i -> j`.
pub type ArcProduct = (EntityId, EntityId, ProductId);
/// `(i, k)`.
pub type EntityProduct = (EntityId, ProductId);

/// One edge-product pair (an edge and a product it carries).
#[derive(Clone, Debug)]
pub(crate) struct Arc {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    pub product: ProductId,
    pub lead: f64,
    /// Due time of the product at the receiving entity.
    pub due: Option<f64>,
}

pub(crate) struct IndexSets {
    pub topology: Topology,
    /// Edges in declaration order, products sorted within each edge.
    pub arcs: Vec<Arc>,
    /// Products balanced at each entity.
    pub stocked: Vec<BTreeSet<ProductId>>,
    pub producible: Vec<BTreeSet<ProductId>>,
    /// Entities with at least one producible product.
    pub open: Vec<usize>,
    /// Positive demand `(entity, product, amount)`.
    pub demand: Vec<(usize, ProductId, f64)>,
    /// Products each entity dispatches; these carry a readiness time.
    pub dispatched: Vec<BTreeSet<ProductId>>,
    pub inbound_arcs: Vec<Vec<usize>>,
    pub outbound_arcs: Vec<Vec<usize>>,
    /// Longest lead-time path from any source to each entity.
    pub longest: Vec<f64>,
}

impl IndexSets {
    pub fn new(instance: &SupplyChainInstance) -> Result<Self> {
        let topology = Topology::new(instance)?;
        let n = instance.entities.len();
        let pos = |id: &EntityId| topology.position(id).expect("topology resolved every edge");

        let mut arcs = Vec::new();
        let mut inbound_arcs = vec![Vec::new(); n];
        let mut outbound_arcs = vec![Vec::new(); n];
        for (ei, edge) in instance.edges.iter().enumerate() {
            let (from, to) = (pos(&edge.from), pos(&edge.to));
            for (k, &lead) in &edge.lead_time {
                inbound_arcs[to].push(arcs.len());
                outbound_arcs[from].push(arcs.len());
                arcs.push(Arc {
                    edge: ei,
                    from,
                    to,
                    product: k.clone(),
                    lead,
                    due: instance.entities[to].due_time_of(k),
                });
            }
        }

        let mut stocked = vec![BTreeSet::new(); n];
        let mut producible = vec![BTreeSet::new(); n];
        let mut dispatched = vec![BTreeSet::new(); n];
        let mut demand = Vec::new();
        let mut open = Vec::new();
        for arc in &arcs {
            stocked[arc.from].insert(arc.product.clone());
            stocked[arc.to].insert(arc.product.clone());
            dispatched[arc.from].insert(arc.product.clone());
        }
        for (i, e) in instance.entities.iter().enumerate() {
            producible[i] = e.producible().cloned().collect();
            if !producible[i].is_empty() {
                open.push(i);
            }
            for k in &producible[i] {
                stocked[i].insert(k.clone());
                stocked[i].extend(instance.bom_predecessors(k));
            }
            for map in [&e.demand, &e.initial_inventory, &e.holding_cost] {
                stocked[i].extend(map.keys().cloned());
            }
            for (k, &d) in &e.demand {
                if d > 0.0 {
                    demand.push((i, k.clone(), d));
                }
            }
        }
        let longest = topology.longest_lead_path(instance);
        Ok(IndexSets {
            topology,
            arcs,
            stocked,
            producible,
            open,
            demand,
            dispatched,
            inbound_arcs,
            outbound_arcs,
            longest,
        })
    }

    pub fn arc_key(&self, instance: &SupplyChainInstance, arc: &Arc) -> ArcProduct {
        let e = &instance.edges[arc.edge];
        (e.from.clone(), e.to.clone(), arc.product.clone())
    }

    /// Components that must arrive before `entity` can dispatch `k`.
    pub fn required(&self, instance: &SupplyChainInstance, entity: usize, k: &ProductId) -> BTreeSet<ProductId> {
        let e = &instance.entities[entity];
        if e.kind == EntityKind::Supplier {
            return BTreeSet::new();
        }
        instance.requirements_of(&e.id, k).cloned().unwrap_or_default()
    }

    /// Inbound arcs of `entity` whose product gates readiness of `k`.
    pub fn gating_arcs<'s>(
        &'s self,
        instance: &SupplyChainInstance,
        entity: usize,
        k: &ProductId,
    ) -> impl Iterator<Item = usize> + 's {
        let req = self.required(instance, entity, k);
        self.inbound_arcs[entity]
            .iter()
            .copied()
            .filter(move |&a| req.contains(&self.arcs[a].product))
    }

    /// Upper bound on the arrival time of an arc.
    pub fn arrival_bound(&self, arc: &Arc) -> f64 {
        arc.lead + self.longest[arc.from]
    }
}
