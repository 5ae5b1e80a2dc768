//! Replay of a fixed flow plan under stochastic lead times.

mod engine;
mod lead_time;
mod report;

pub use engine::{replay_lead_times, replication_rng, run_replications, simulate_once, ReplicationResult, DEFAULT_REPLICATIONS};
pub use lead_time::{sample_lead_time, LeadTimeFamily, LeadTimeModel, DEFAULT_SIGMA};
pub use report::{
    mean_and_std, CustomerStats, ReplicationRecord, SimulationReport, ON_TIME_TOL, REPLICATIONS_HEADER,
    SUMMARY_HEADER,
};
