//! Lead-time-aware supply-chain disruption response.
//!
//! The crate is organised bottom-up:
//!
//! - [`instance`]: network instances (entities, edges, products, bill of materials),
//!   loading, validation, disruptions and topology variants.
//! - [`milp`]: a self-contained dense bounded-variable simplex, branch-and-bound,
//!   a brute-force oracle, and MPS / solution-file interchange.
//! - [`model`]: assembly of the routing-and-scheduling MIP with exact linearizations
//!   of the arrival-time and lateness-penalty products, plus independent checkers.
//! - [`sim`]: out-of-sample replay of a fixed flow plan under log-normal lead times.
//! - [`lab`]: scenario sweeps over lateness policies, disruptions and topologies,
//!   with K/E/V/R response classification.
//! - [`synth`]: seeded random instance generation for property tests and benches.

pub mod error;
pub mod instance;
pub mod lab;
pub mod milp;
pub mod model;
pub mod sim;
pub mod synth;

mod fsutil;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use instance::{
    Disruption, EdgeKey, Entity, EntityId, EntityKind, Edge, ProductId, SupplyChainInstance,
    Topology, TopologyVariant, VariantEdits, Violation,
};

pub use lab::{ResponseLabel, StudyConfig, StudyReport};
pub use milp::{MixedIntegerProgram, SolveOptions, SolveReport, SolveStatus};
pub use model::{FlowPlan, LatenessPolicy, Solver, VariableIndex};
pub use sim::{LeadTimeModel, SimulationReport};

pub use fsutil::write_atomic;
