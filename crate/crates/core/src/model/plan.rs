use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::build::VariableIndex;
use super::names::{format_name, parse_name, Family};
use super::policy::LatenessPolicy;
use super::sets::{ArcProduct, EntityProduct, IndexSets};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::instance::{EntityId, EntityKind, SupplyChainInstance};
use crate::milp::MixedIntegerProgram;

/// Binaries farther than this from 0 or 1 are not accepted as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Arrivals this far past the due time count as late.
pub(crate) const LATE_EPS: f64 = 1e-9;

/// Values of every model variable, grouped by family. Absent entries read as 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowPlan {
    pub y: BTreeMap<ArcProduct, f64>,
    pub beta: BTreeMap<ArcProduct, f64>,
    pub x: BTreeMap<EntityProduct, f64>,
    pub p: BTreeMap<EntityProduct, f64>,
    pub zeta: BTreeMap<EntityId, f64>,
    pub inventory: BTreeMap<EntityProduct, f64>,
    pub delta: BTreeMap<EntityProduct, f64>,
    pub a: BTreeMap<ArcProduct, f64>,
    pub o: BTreeMap<EntityProduct, f64>,
    pub z: BTreeMap<ArcProduct, f64>,
    pub w: BTreeMap<ArcProduct, f64>,
    pub v: BTreeMap<ArcProduct, f64>,
}

pub(crate) fn get<K: Ord>(map: &BTreeMap<K, f64>, key: &K) -> f64 {
    map.get(key).copied().unwrap_or(0.0)
}

impl FlowPlan {
    /// Edge-product pairs with `beta = 1`.
    pub fn used_edges(&self) -> BTreeSet<ArcProduct> {
        self.beta
            .iter()
            .filter(|(_, &b)| b > 0.5)
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn is_used(&self, key: &ArcProduct) -> bool {
        get(&self.beta, key) > 0.5
    }

    /// Every stored value keyed by its column name.
    pub fn to_named(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let arcs = [
            (Family::Y, &self.y),
            (Family::Beta, &self.beta),
            (Family::A, &self.a),
            (Family::Z, &self.z),
            (Family::W, &self.w),
            (Family::V, &self.v),
        ];
        for (fam, map) in arcs {
            for ((i, j, k), &v) in map {
                out.insert(format_name(fam.prefix(), &[i.as_str(), j.as_str(), k.as_str()]), v);
            }
        }
        let pairs = [
            (Family::X, &self.x),
            (Family::P, &self.p),
            (Family::I, &self.inventory),
            (Family::Delta, &self.delta),
            (Family::O, &self.o),
        ];
        for (fam, map) in pairs {
            for ((i, k), &v) in map {
                out.insert(format_name(fam.prefix(), &[i.as_str(), k.as_str()]), v);
            }
        }
        for (i, &v) in &self.zeta {
            out.insert(format_name(Family::Zeta.prefix(), &[i.as_str()]), v);
        }
        out
    }

    pub fn from_named(values: &BTreeMap<String, f64>) -> Result<FlowPlan> {
        let mut plan = FlowPlan::default();
        for (name, &value) in values {
            let bad = |why: &str| Error::InvalidInstance(format!("plan entry `{name}`: {why}"));
            let (prefix, args) = parse_name(name).ok_or_else(|| bad("not of the form FAM(ids)"))?;
            let fam = Family::from_prefix(prefix).ok_or_else(|| bad("unknown variable family"))?;
            if args.len() != fam.arity() {
                return Err(bad("wrong number of indices"));
            }
            if !value.is_finite() {
                return Err(bad("value is not finite"));
            }
            let arc = || -> ArcProduct { (args[0].into(), args[1].into(), args[2].into()) };
            let pair = || -> EntityProduct { (args[0].into(), args[1].into()) };
            let previous = match fam {
                Family::Y => plan.y.insert(arc(), value),
                Family::Beta => plan.beta.insert(arc(), value),
                Family::A => plan.a.insert(arc(), value),
                Family::Z => plan.z.insert(arc(), value),
                Family::W => plan.w.insert(arc(), value),
                Family::V => plan.v.insert(arc(), value),
                Family::X => plan.x.insert(pair(), value),
                Family::P => plan.p.insert(pair(), value),
                Family::I => plan.inventory.insert(pair(), value),
                Family::Delta => plan.delta.insert(pair(), value),
                Family::O => plan.o.insert(pair(), value),
                Family::Zeta => plan.zeta.insert(args[0].into(), value),
            };
            if previous.is_some() {
                return Err(bad("listed twice"));
            }
        }
        Ok(plan)
    }
}

/// Groups a column assignment by family, rounding binaries that are within tolerance.
pub fn extract_solution(
    program: &MixedIntegerProgram,
    index: &VariableIndex,
    assignment: &[f64],
) -> Result<FlowPlan> {
    if assignment.len() != program.num_columns() {
        return Err(Error::Dimension(format!(
            "assignment has {} values, program has {} columns",
            assignment.len(),
            program.num_columns()
        )));
    }
    let value = |col: usize, binary: bool| -> Result<f64> {
        let v = assignment[col];
        if !binary {
            return Ok(v);
        }
        let r = v.round();
        if (v - r).abs() > INTEGRALITY_TOL || !(r == 0.0 || r == 1.0) {
            return Err(Error::Integrality {
                name: program.columns[col].name.clone(),
                value: v,
            });
        }
        Ok(r)
    };
    fn group<K: Ord + Clone>(
        cols: &BTreeMap<K, usize>,
        binary: bool,
        value: &dyn Fn(usize, bool) -> Result<f64>,
    ) -> Result<BTreeMap<K, f64>> {
        cols.iter().map(|(k, &c)| Ok((k.clone(), value(c, binary)?))).collect()
    }
    Ok(FlowPlan {
        y: group(&index.y, false, &value)?,
        beta: group(&index.beta, true, &value)?,
        x: group(&index.x, false, &value)?,
        p: group(&index.p, false, &value)?,
        zeta: group(&index.zeta, true, &value)?,
        inventory: group(&index.inventory, false, &value)?,
        delta: group(&index.delta, false, &value)?,
        a: group(&index.a, false, &value)?,
        o: group(&index.o, false, &value)?,
        z: group(&index.z, true, &value)?,
        w: group(&index.w, false, &value)?,
        v: group(&index.v, false, &value)?,
    })
}

/// Replaces readiness and arrival times with the earliest schedule the used edges allow,
/// then recomputes the late indicators and penalties from it.
///
/// Readiness carries no cost, so a solver may park it anywhere up to its bound; the
/// earliest schedule is what a replay of the plan produces. Arrivals only move earlier,
/// so no penalty grows and the objective never increases.
pub fn normalize_schedule(instance: &SupplyChainInstance, policy: &LatenessPolicy, plan: &mut FlowPlan) -> Result<()> {
    let sets = IndexSets::new(instance)?;
    let keys: Vec<ArcProduct> = sets.arcs.iter().map(|a| sets.arc_key(instance, a)).collect();
    let mut arrival = vec![0.0; sets.arcs.len()];
    let mut ready: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &j in &sets.topology.order {
        let e = &instance.entities[j];
        for (kk, k) in sets.dispatched[j].iter().enumerate() {
            let o = if e.kind == EntityKind::Supplier {
                0.0
            } else {
                sets.gating_arcs(instance, j, k)
                    .filter(|&a| plan.is_used(&keys[a]))
                    .map(|a| arrival[a])
                    .fold(0.0, f64::max)
            };
            ready.insert((j, kk), o);
            plan.o.insert((e.id.clone(), k.clone()), o);
        }
        for &a in &sets.outbound_arcs[j] {
            let arc = &sets.arcs[a];
            let kk = sets.dispatched[j].iter().position(|k| k == &arc.product).expect("dispatched");
            arrival[a] = if plan.is_used(&keys[a]) {
                ready[&(j, kk)] + arc.lead
            } else {
                0.0
            };
        }
    }
    for (a, key) in keys.iter().enumerate() {
        let arc = &sets.arcs[a];
        plan.a.insert(key.clone(), arrival[a]);
        let (z, w) = match arc.due {
            Some(t) if policy.is_penalized() && arrival[a] > t + LATE_EPS => {
                let edge = &instance.edges[arc.edge];
                let w = policy.fixed_weight * edge.fixed_late_penalty_of(&key.2)
                    + policy.unit_weight * edge.unit_late_penalty_of(&key.2) * (arrival[a] - t);
                (1.0, w)
            }
            _ => (0.0, 0.0),
        };
        plan.z.insert(key.clone(), z);
        plan.w.insert(key.clone(), w);
        plan.v.insert(key.clone(), z * arrival[a]);
    }
    Ok(())
}

pub const PLAN_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy: Option<LatenessPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    /// Informational; recomputed from `beta` on load.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    used_edges: Vec<String>,
    values: BTreeMap<String, f64>,
}

/// A plan together with the policy and objective it was solved under.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanDocument {
    pub plan: FlowPlan,
    pub policy: Option<LatenessPolicy>,
    pub objective: Option<f64>,
}

pub fn plan_to_json(doc: &PlanDocument) -> String {
    let file = PlanFile {
        schema: PLAN_SCHEMA,
        policy: doc.policy,
        objective: doc.objective,
        used_edges: doc
            .plan
            .used_edges()
            .iter()
            .map(|(i, j, k)| format!("{i}->{j}:{k}"))
            .collect(),
        values: doc.plan.to_named(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plan serializes");
    text.push('\n');
    text
}

pub fn parse_plan(text: &str, origin: &Path) -> Result<PlanDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: PlanFile = serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        Error::Parse {
            path: origin.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    if file.schema != PLAN_SCHEMA {
        return Err(Error::InvalidInstance(format!(
            "{}: unsupported plan schema {}",
            origin.display(),
            file.schema
        )));
    }
    Ok(PlanDocument {
        plan: FlowPlan::from_named(&file.values)?,
        policy: file.policy,
        objective: file.objective,
    })
}

pub fn save_plan(doc: &PlanDocument, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), plan_to_json(doc).as_bytes())
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<PlanDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_plan(&text, path)
}
