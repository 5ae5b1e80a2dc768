#![allow(dead_code)]

use std::path::PathBuf;

use chainflow::instance::{load_instance, load_variant_edits, topology_variant};
use chainflow::{SupplyChainInstance, TopologyVariant};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn auto14() -> SupplyChainInstance {
    load_instance(data("auto14.json")).unwrap()
}

pub fn auto14_variant(variant: TopologyVariant) -> SupplyChainInstance {
    let base = auto14();
    let file = match variant {
        TopologyVariant::Tree => return base,
        TopologyVariant::ReverseTree => "auto14_reverse_tree.json",
        TopologyVariant::Chain => "auto14_chain.json",
    };
    topology_variant(&base, variant, &load_variant_edits(data(file)).unwrap()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
