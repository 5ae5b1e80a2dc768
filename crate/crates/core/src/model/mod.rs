//! The routing, production and lateness model over a supply-chain instance.

mod bigm;
mod build;
mod evaluate;
mod names;
mod plan;
mod policy;
mod sets;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bigm::{compute_big_m, BigMEntry, BigMTable};
pub use build::{build_model, VariableIndex};
pub use evaluate::{check_feasibility, evaluate_objective, CostBreakdown, PlanViolation};
pub use names::{format_name, parse_name, Family};
pub use plan::{
    extract_solution, load_plan, normalize_schedule, parse_plan, plan_to_json, save_plan, FlowPlan, PlanDocument,
    INTEGRALITY_TOL,
};
pub use policy::{LatenessPolicy, PolicyMode};
pub use sets::{ArcProduct, EntityProduct};

pub(crate) use sets::IndexSets;

use crate::error::{Error, Result};
use crate::instance::SupplyChainInstance;
use crate::milp::{brute_force_milp, solve_milp, MixedIntegerProgram, SolveOptions, SolveReport, DEFAULT_BINARY_LIMIT};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    BranchAndBound,
    BruteForce,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::BranchAndBound => "branch-and-bound",
            Solver::BruteForce => "brute-force",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "branch-and-bound" | "bnb" => Ok(Solver::BranchAndBound),
            "brute-force" => Ok(Solver::BruteForce),
            _ => Err(Error::Config(format!("unknown solver `{s}` (branch-and-bound or brute-force)"))),
        }
    }
}

/// Everything produced by one solve of one instance under one policy.
#[derive(Clone, Debug)]
pub struct Solution {
    pub program: MixedIntegerProgram,
    pub index: VariableIndex,
    pub big_m: BigMTable,
    pub report: SolveReport,
    /// Incumbent with its schedule normalized; `None` when no incumbent was found.
    pub plan: Option<FlowPlan>,
}

impl Solution {
    pub fn breakdown(&self, instance: &SupplyChainInstance, policy: &LatenessPolicy) -> Option<CostBreakdown> {
        self.plan.as_ref().map(|p| evaluate_objective(instance, policy, p))
    }
}

/// Builds, solves and extracts the plan for `instance` under `policy`.
pub fn solve_instance(
    instance: &SupplyChainInstance,
    policy: &LatenessPolicy,
    solver: Solver,
    options: &SolveOptions,
) -> Result<Solution> {
    let (program, index, big_m) = build_model(instance, policy)?;
    let report = match solver {
        Solver::BranchAndBound => solve_milp(&program, options)?,
        Solver::BruteForce => brute_force_milp(&program, DEFAULT_BINARY_LIMIT)?,
    };
    let plan = if report.has_incumbent() {
        let mut plan = extract_solution(&program, &index, &report.assignment)?;
        normalize_schedule(instance, policy, &mut plan)?;
        Some(plan)
    } else {
        None
    };
    Ok(Solution {
        program,
        index,
        big_m,
        report,
        plan,
    })
}
