use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BomRule, Edge, Entity, Product, SupplyChainInstance};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    schema: u32,
    products: Vec<Product>,
    #[serde(default)]
    bom: Vec<BomRule>,
    entities: Vec<Entity>,
    #[serde(default)]
    edges: Vec<Edge>,
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<SupplyChainInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text, path)
}

/// Parses instance text; `origin` is only used in error messages.
pub fn parse_instance(text: &str, origin: &Path) -> Result<SupplyChainInstance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|err| {
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
    if file.schema != SCHEMA_VERSION {
        return Err(Error::InvalidInstance(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            file.schema
        )));
    }
    from_file(file)
}

fn from_file(file: InstanceFile) -> Result<SupplyChainInstance> {
    let products = file.products;
    let known_product = |id: &super::ProductId, context: &str| -> Result<()> {
        if products.iter().any(|p| &p.id == id) {
            Ok(())
        } else {
            Err(Error::UnknownReference {
                kind: "product",
                id: id.0.clone(),
                context: context.to_owned(),
            })
        }
    };

    for rule in &file.bom {
        known_product(&rule.component, "bom component")?;
        known_product(&rule.successor, "bom successor")?;
    }

    let mut entities = file.entities;
    for e in &mut entities {
        let context = format!("entity {}", e.id);
        for map in [
            &e.production_cost,
            &e.holding_cost,
            &e.initial_inventory,
            &e.demand,
            &e.shortage_penalty,
            &e.due_time,
        ] {
            for k in map.keys() {
                known_product(k, &context)?;
            }
        }
        // Demand may be written with the negative-outflow convention; store magnitudes.
        for d in e.demand.values_mut() {
            *d = d.abs();
        }
    }

    let edges = file.edges;
    for e in &edges {
        let context = format!("edge {}->{}", e.from, e.to);
        for end in [&e.from, &e.to] {
            if !entities.iter().any(|x| &x.id == end) {
                return Err(Error::UnknownReference {
                    kind: "entity",
                    id: end.0.clone(),
                    context,
                });
            }
        }
        for k in e.lead_time.keys() {
            known_product(k, &context)?;
        }
        for map in [&e.unit_cost, &e.fixed_late_penalty, &e.unit_late_penalty] {
            for k in map.keys() {
                known_product(k, &context)?;
                if !e.lead_time.contains_key(k) {
                    return Err(Error::InvalidInstance(format!(
                        "{context}: product `{k}` has cost data but no lead_time"
                    )));
                }
            }
        }
    }

    Ok(SupplyChainInstance::new(products, file.bom, entities, edges))
}

fn to_file(instance: &SupplyChainInstance) -> InstanceFile {
    InstanceFile {
        schema: SCHEMA_VERSION,
        products: instance.products.clone(),
        bom: instance.bom.clone(),
        entities: instance.entities.clone(),
        edges: instance.edges.clone(),
    }
}

/// Canonical pretty-printed JSON: sorted per-product maps, empty maps omitted.
pub fn to_canonical_json(instance: &SupplyChainInstance) -> String {
    let mut text = serde_json::to_string_pretty(&to_file(instance)).expect("instance serializes");
    text.push('\n');
    text
}

pub fn save_instance(instance: &SupplyChainInstance, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), to_canonical_json(instance).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "products": [{"id": "widget"}],
        "entities": [
            {"id": "S1", "kind": "supplier", "production_capacity": 10, "production_cost": {"widget": 1}},
            {"id": "C1", "kind": "customer", "demand": {"widget": -4}, "due_time": {"widget": 5}}
        ],
        "edges": [{"from": "S1", "to": "C1", "capacity": 10, "lead_time": {"widget": 2}}]
    }"#;

    #[test]
    fn minimal_two_node_instance() {
        let inst = parse_instance(MINIMAL, Path::new("mem")).unwrap();
        assert!(inst.bom.is_empty());
        assert_eq!(inst.entities.len(), 2);
        assert_eq!(inst.edges.len(), 1);
        // negative-convention demand is normalized
        assert_eq!(inst.entities[1].demand_of(&"widget".into()), 4.0);
        assert_eq!(inst.entities[0].due_time_of(&"widget".into()), None);
        assert!(inst.requirements.is_empty());
    }

    #[test]
    fn dangling_entity_is_named() {
        let text = MINIMAL.replace(r#""to": "C1""#, r#""to": "X9""#);
        let err = parse_instance(&text, Path::new("mem")).unwrap_err();
        assert!(matches!(&err, Error::UnknownReference { id, .. } if id == "X9"), "{err}");
    }

    #[test]
    fn missing_capacity_reports_field_and_line() {
        let text = MINIMAL.replace(r#""capacity": 10, "lead_time""#, r#""lead_time""#);
        match parse_instance(&text, Path::new("mem")).unwrap_err() {
            Error::Parse { line, field, message, .. } => {
                assert_eq!(line, 8);
                assert!(field.starts_with("edges[0]"), "{field}");
                assert!(message.contains("capacity"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn cost_without_lead_time_rejected() {
        let text = MINIMAL.replace(r#""lead_time": {"widget": 2}"#, r#""unit_cost": {"widget": 2}"#);
        assert!(matches!(
            parse_instance(&text, Path::new("mem")),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn canonical_round_trip() {
        let inst = parse_instance(MINIMAL, Path::new("mem")).unwrap();
        let text = to_canonical_json(&inst);
        let back = parse_instance(&text, Path::new("mem")).unwrap();
        assert_eq!(inst, back);
        assert_eq!(text, to_canonical_json(&back));
    }
}
