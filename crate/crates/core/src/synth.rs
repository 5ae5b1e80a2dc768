//! Seeded random instances small enough for exhaustive enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{validate, BomRule, Edge, Entity, EntityKind, Product, ProductId, SupplyChainInstance};
use crate::model::{build_model, LatenessPolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub max_entities: usize,
    /// Upper bound on free binaries under a penalized policy (the most binaries any policy yields).
    pub max_binaries: usize,
    /// Integer lead times are drawn from this inclusive range; keep the lower end at 1 or more.
    pub lead_range: (u32, u32),
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            max_entities: 5,
            max_binaries: 12,
            lead_range: (1, 5),
        }
    }
}

fn product(id: &str) -> Product {
    Product {
        id: id.into(),
        name: String::new(),
    }
}

fn int(rng: &mut impl Rng, lo: u32, hi: u32) -> f64 {
    f64::from(rng.random_range(lo..=hi))
}

fn push_edge(edges: &mut Vec<Edge>, rng: &mut impl Rng, leads: (u32, u32), from: &str, to: &str, k: &str) {
    let lo = leads.0.max(1);
    let mut e = Edge::new(from, to, int(rng, 3, 15));
    e.fixed_cost = int(rng, 0, 8);
    e.unit_cost.insert(k.into(), int(rng, 1, 4));
    e.lead_time.insert(k.into(), int(rng, lo, leads.1.max(lo)));
    e.fixed_late_penalty.insert(k.into(), int(rng, 1, 5));
    e.unit_late_penalty.insert(k.into(), int(rng, 1, 5));
    edges.push(e);
}

/// One candidate layout; may exceed the binary budget.
fn candidate(rng: &mut impl Rng, opts: &SynthOptions) -> SupplyChainInstance {
    let assemble = rng.random_bool(0.6);
    let raws: Vec<&str> = if assemble && rng.random_bool(0.5) { vec!["r1", "r2"] } else { vec!["r1"] };
    let fin = if assemble { "f" } else { "r1" };
    let budget = opts.max_entities.max(2);

    let n_cust = if budget >= 4 && rng.random_bool(0.4) { 2 } else { 1 };
    let fixed = n_cust + usize::from(assemble);
    let n_sup = (raws.len().max(1) + usize::from(rng.random_bool(0.5))).min(budget.saturating_sub(fixed)).max(1);
    let use_dist = fixed + n_sup < budget && rng.random_bool(0.5);

    let mut entities = Vec::new();
    let mut suppliers = Vec::new();
    for s in 0..n_sup {
        let id = format!("S{}", s + 1);
        let mut e = Entity::new(&id, EntityKind::Supplier);
        let k = raws[s % raws.len()];
        e.production_capacity = int(rng, 4, 16);
        e.production_cost.insert(k.into(), int(rng, 1, 3));
        e.open_cost = int(rng, 0, 4);
        if rng.random_bool(0.3) {
            e.holding_cost.insert(k.into(), int(rng, 0, 1));
        }
        entities.push(e);
        suppliers.push((id, k));
    }
    let oem = assemble.then(|| {
        let mut e = Entity::new("A1", EntityKind::Oem);
        e.production_capacity = int(rng, 6, 20);
        e.production_cost.insert(fin.into(), int(rng, 1, 3));
        e.open_cost = int(rng, 0, 4);
        entities.push(e);
        "A1".to_owned()
    });
    let dist = use_dist.then(|| {
        let mut e = Entity::new("D1", EntityKind::Distributor);
        if rng.random_bool(0.3) {
            e.initial_inventory.insert(fin.into(), int(rng, 1, 3));
        }
        entities.push(e);
        "D1".to_owned()
    });
    let mut customers = Vec::new();
    for c in 0..n_cust {
        let id = format!("C{}", c + 1);
        let mut e = Entity::new(&id, EntityKind::Customer);
        e.demand.insert(fin.into(), int(rng, 2, 8));
        e.shortage_penalty.insert(fin.into(), int(rng, 15, 60));
        entities.push(e);
        customers.push(id);
    }

    let leads = opts.lead_range;
    let mut edges = Vec::new();
    // Products leave the supply side either through the OEM or directly.
    let sources: Vec<String> = match &oem {
        Some(a) => {
            for (s, k) in &suppliers {
                push_edge(&mut edges, rng, leads, s, a, k);
            }
            vec![a.clone()]
        }
        None => suppliers.iter().map(|(s, _)| s.clone()).collect(),
    };
    let mut dist_fed = false;
    for src in &sources {
        let mut linked = false;
        if let Some(d) = &dist {
            if rng.random_bool(0.7) {
                push_edge(&mut edges, rng, leads, src, d, fin);
                linked = true;
                dist_fed = true;
            }
        }
        for c in &customers {
            if !linked || rng.random_bool(0.4) {
                push_edge(&mut edges, rng, leads, src, c, fin);
                linked = true;
            }
        }
    }
    if let (Some(d), true) = (&dist, dist_fed) {
        for c in &customers {
            push_edge(&mut edges, rng, leads, d, c, fin);
        }
    }

    let mut bom = Vec::new();
    if assemble {
        for k in &raws {
            bom.push(BomRule {
                component: (*k).into(),
                successor: fin.into(),
                conversion_rate: int(rng, 1, 2),
            });
        }
    }
    let mut products: Vec<Product> = raws.iter().map(|k| product(k)).collect();
    if assemble {
        products.push(product(fin));
    }
    let mut inst = SupplyChainInstance::new(products, bom, entities, edges);

    // Due times near the longest lead path make lateness bind some of the time.
    let topo = crate::instance::Topology::new(&inst).expect("generated layouts are acyclic");
    let longest = topo.longest_lead_path(&inst);
    let fin: ProductId = fin.into();
    for c in &customers {
        let i = topo.position(&c.as_str().into()).expect("customer exists");
        let span = longest[i].max(1.0);
        let t = (span * rng.random_range(0.5..1.2)).round();
        inst.entities[i].due_time.insert(fin.clone(), t);
    }
    inst
}

/// A valid random instance whose model has at most `opts.max_binaries` free binaries.
pub fn random_instance(rng: &mut impl Rng, opts: &SynthOptions) -> SupplyChainInstance {
    let worst = LatenessPolicy::penalized(1.0, 1.0).expect("valid weights");
    loop {
        let inst = candidate(rng, opts);
        debug_assert!(validate(&inst).is_empty(), "{:?}", validate(&inst));
        let (program, _, _) = build_model(&inst, &worst).expect("generated instances are valid");
        if program.free_binaries().len() <= opts.max_binaries {
            return inst;
        }
    }
}

pub fn random_instance_seeded(seed: u64) -> SupplyChainInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &SynthOptions::default())
}

/// One of `none`, `1:0`, `1:w` or `u:w` with small integer weights.
pub fn random_policy(rng: &mut impl Rng) -> LatenessPolicy {
    match rng.random_range(0..4) {
        0 => LatenessPolicy::NONE,
        1 => LatenessPolicy::penalized(1.0, 0.0).expect("valid"),
        2 => LatenessPolicy::penalized(1.0, int(rng, 1, 50)).expect("valid"),
        _ => LatenessPolicy::penalized(int(rng, 0, 5), int(rng, 0, 20)).expect("valid"),
    }
}
