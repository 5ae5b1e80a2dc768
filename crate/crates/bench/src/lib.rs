//! Shared fixtures for the criterion benches.

use std::path::{Path, PathBuf};

use chainflow::instance::load_instance;
use chainflow::model::{load_plan, FlowPlan};
use chainflow::SupplyChainInstance;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn instance(name: &str) -> SupplyChainInstance {
    load_instance(data(name)).expect("bundled instance loads")
}

/// The bundled baseline plan for `auto14.json`.
pub fn baseline_plan() -> FlowPlan {
    load_plan(data("auto14_baseline_plan.json")).expect("bundled plan loads").plan
}
