use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{classify_response, ResponseLabel};
use super::config::StudyConfig;
use crate::error::{Error, Result};
use crate::instance::{apply_disruption, Disruption, SupplyChainInstance, Topology, TopologyVariant};
use crate::milp::SolveStatus;
use crate::model::{solve_instance, FlowPlan, LatenessPolicy};
use crate::sim::{mean_and_std, run_replications, SimulationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Solved,
    Infeasible,
    /// Search stopped at the node limit; the incumbent, if any, is kept but not aggregated.
    NodeLimit,
    Error,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Solved => "solved",
            CellStatus::Infeasible => "infeasible",
            CellStatus::NodeLimit => "node_limit",
            CellStatus::Error => "error",
        }
    }
}

/// One row of a study: a disrupted cell, or the undisrupted row of a variant when
/// `disruption` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyCell {
    pub variant: TopologyVariant,
    pub disruption: Option<Disruption>,
    /// Longest path, in edges, from the disrupted entity to a customer.
    pub depth: Option<usize>,
    pub policy: LatenessPolicy,
    pub status: CellStatus,
    pub message: Option<String>,
    pub label: Option<ResponseLabel>,
    pub baseline_objective: Option<f64>,
    pub response_objective: Option<f64>,
    pub baseline_plan: Option<FlowPlan>,
    pub response_plan: Option<FlowPlan>,
    pub simulation: Option<SimulationReport>,
}

impl StudyCell {
    pub fn is_baseline(&self) -> bool {
        self.disruption.is_none()
    }

    /// Whether the cell counts toward aggregates.
    pub fn succeeded(&self) -> bool {
        self.status == CellStatus::Solved && self.simulation.is_some()
    }

    /// Mean and standard deviation over replications of total customer lateness.
    pub fn lateness(&self) -> Option<(f64, f64)> {
        self.simulation.as_ref().map(|s| s.total_lateness_stats())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyReport {
    /// Per variant: its undisrupted row, then disruptions × policies in config order.
    pub cells: Vec<StudyCell>,
}

impl StudyReport {
    pub fn disrupted_cells(&self) -> impl Iterator<Item = &StudyCell> {
        self.cells.iter().filter(|c| !c.is_baseline())
    }

    pub fn baseline_rows(&self) -> impl Iterator<Item = &StudyCell> {
        self.cells.iter().filter(|c| c.is_baseline())
    }

    /// True when at least one cell solved and simulated.
    pub fn any_succeeded(&self) -> bool {
        self.cells.iter().any(StudyCell::succeeded)
    }

    /// Re-derives every stored label from the stored plans.
    pub fn labels_consistent(&self, tol: f64) -> bool {
        self.disrupted_cells().all(|c| match (&c.baseline_plan, &c.response_plan, &c.disruption) {
            (Some(b), Some(r), Some(d)) => classify_response(b, r, &d.entity, tol).ok() == c.label,
            _ => c.label.is_none(),
        })
    }
}

/// Result of one solve inside a study.
#[derive(Clone, Debug)]
struct Solved {
    status: CellStatus,
    objective: Option<f64>,
    plan: Option<FlowPlan>,
    message: Option<String>,
}

fn solve(config: &StudyConfig, instance: &SupplyChainInstance, policy: &LatenessPolicy) -> Solved {
    match solve_instance(instance, policy, config.solver, &config.options) {
        Ok(sol) => {
            let status = match sol.report.status {
                SolveStatus::Optimal | SolveStatus::GapReached => CellStatus::Solved,
                SolveStatus::Infeasible => CellStatus::Infeasible,
                SolveStatus::NodeLimit => CellStatus::NodeLimit,
            };
            Solved {
                status,
                objective: sol.report.objective,
                plan: sol.plan,
                message: None,
            }
        }
        Err(e) => Solved {
            status: CellStatus::Error,
            objective: None,
            plan: None,
            message: Some(e.to_string()),
        },
    }
}

fn simulate(config: &StudyConfig, instance: &SupplyChainInstance, plan: &FlowPlan) -> Result<SimulationReport> {
    run_replications(instance, plan, &config.simulation, config.replications, config.seed())
}

fn baseline_row(config: &StudyConfig, variant: TopologyVariant, inst: &SupplyChainInstance, base: &Solved) -> StudyCell {
    let mut cell = StudyCell {
        variant,
        disruption: None,
        depth: None,
        policy: config.baseline_policy(),
        status: base.status,
        message: base.message.clone(),
        label: None,
        baseline_objective: base.objective,
        response_objective: base.objective,
        baseline_plan: base.plan.clone(),
        response_plan: base.plan.clone(),
        simulation: None,
    };
    if let (CellStatus::Solved, Some(plan)) = (base.status, &base.plan) {
        match simulate(config, inst, plan) {
            Ok(r) => cell.simulation = Some(r),
            Err(e) => fail(&mut cell, e),
        }
    }
    cell
}

fn fail(cell: &mut StudyCell, e: Error) {
    cell.status = CellStatus::Error;
    cell.message = Some(e.to_string());
}

struct CellInput<'a> {
    variant: TopologyVariant,
    instance: &'a SupplyChainInstance,
    depth: Vec<usize>,
    topology: Topology,
    disruption: &'a Disruption,
    policy: LatenessPolicy,
    baseline: &'a Solved,
}

fn disrupted_cell(config: &StudyConfig, input: CellInput<'_>) -> StudyCell {
    let d = input.disruption;
    let base = input.baseline;
    let mut cell = StudyCell {
        variant: input.variant,
        disruption: Some(d.clone()),
        depth: input.topology.position(&d.entity).map(|i| input.depth[i]),
        policy: input.policy,
        status: CellStatus::Solved,
        message: None,
        label: None,
        baseline_objective: base.objective,
        response_objective: None,
        baseline_plan: base.plan.clone(),
        response_plan: None,
        simulation: None,
    };
    let disrupted = match apply_disruption(input.instance, d) {
        Ok(inst) => inst,
        Err(e) => {
            fail(&mut cell, e);
            return cell;
        }
    };
    let resp = solve(config, &disrupted, &input.policy);
    cell.status = resp.status;
    cell.message = resp.message;
    cell.response_objective = resp.objective;
    cell.response_plan = resp.plan;
    match (&cell.baseline_plan, &cell.response_plan) {
        (Some(b), Some(r)) => match classify_response(b, r, &d.entity, config.classify_tolerance) {
            Ok(label) => cell.label = Some(label),
            Err(e) => fail(&mut cell, e),
        },
        (None, _) if cell.status == CellStatus::Solved => {
            cell.status = base.status;
            cell.message = Some(format!("baseline: {}", base.message.as_deref().unwrap_or(base.status.as_str())));
        }
        _ => {}
    }
    if cell.status == CellStatus::Solved {
        // Out-of-sample replay is centred on the disrupted lead times.
        if let Some(plan) = &cell.response_plan {
            match simulate(config, &disrupted, plan) {
                Ok(r) => cell.simulation = Some(r),
                Err(e) => fail(&mut cell, e),
            }
        }
    }
    cell
}

/// Loads the configured variants and runs the study on them.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.check()?;
    let variants = config.load_variants()?;
    run_study_on(config, &variants)
}

/// Runs the study on already-built variant instances; `config.instance` and the variant
/// edit paths are not read.
///
/// Every variant is solved undisrupted under each policy; each disrupted cell is compared
/// with the undisrupted plan of its own policy. Cells run in parallel, and the report is
/// assembled in config order.
pub fn run_study_on(config: &StudyConfig, variants: &[(TopologyVariant, SupplyChainInstance)]) -> Result<StudyReport> {
    config.check()?;
    let mut policies = config.policies.clone();
    if !policies.contains(&config.baseline_policy()) {
        policies.push(config.baseline_policy());
    }
    let jobs: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..policies.len()).map(move |p| (v, p)))
        .collect();
    let baselines: BTreeMap<(usize, usize), Solved> = jobs
        .par_iter()
        .map(|&(v, p)| ((v, p), solve(config, &variants[v].1, &policies[p])))
        .collect();
    let policy_slot = |p: &LatenessPolicy| policies.iter().position(|q| q == p).expect("policy listed");

    let mut tasks: Vec<(usize, Option<(usize, usize)>)> = Vec::new();
    for v in 0..variants.len() {
        tasks.push((v, None));
        for d in 0..config.disruptions.len() {
            for p in 0..config.policies.len() {
                tasks.push((v, Some((d, p))));
            }
        }
    }
    let cells = tasks
        .par_iter()
        .map(|&(v, cell)| {
            let (variant, inst) = (&variants[v].0, &variants[v].1);
            match cell {
                None => {
                    let base = &baselines[&(v, policy_slot(&config.baseline_policy()))];
                    Ok(baseline_row(config, *variant, inst, base))
                }
                Some((d, p)) => {
                    let topology = Topology::new(inst)?;
                    let policy = config.policies[p];
                    Ok(disrupted_cell(
                        config,
                        CellInput {
                            variant: *variant,
                            instance: inst,
                            depth: topology.depth_to_customer(inst),
                            topology,
                            disruption: &config.disruptions[d],
                            policy,
                            baseline: &baselines[&(v, policy_slot(&policy))],
                        },
                    ))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyReport { cells })
}

/// Pooled lateness of the given cells: mean and population standard deviation of the
/// per-cell mean lateness.
pub(crate) fn pooled<'a>(cells: impl Iterator<Item = &'a StudyCell>) -> Option<(f64, f64, usize)> {
    let means: Vec<f64> = cells.filter(|c| c.succeeded()).filter_map(|c| c.lateness()).map(|l| l.0).collect();
    if means.is_empty() {
        return None;
    }
    let (m, s) = mean_and_std(&means);
    Some((m, s, means.len()))
}
