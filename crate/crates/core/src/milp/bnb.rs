use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::program::MixedIntegerProgram;
use super::simplex::{solve_lp_bounded, LpStatus, SimplexOptions};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Relative gap `(incumbent - bound) / max(1, |incumbent|)` at which search stops.
    pub gap_tolerance: f64,
    pub integrality_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub node_limit: u64,
    /// The search is sequential either way; kept so callers can record intent.
    pub deterministic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gap_tolerance: 1e-6,
            integrality_tolerance: 1e-6,
            feasibility_tolerance: 1e-7,
            node_limit: 1_000_000,
            deterministic: true,
        }
    }
}

impl SolveOptions {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("gap_tolerance", self.gap_tolerance),
            ("integrality_tolerance", self.integrality_tolerance),
            ("feasibility_tolerance", self.feasibility_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.node_limit == 0 {
            return Err(Error::Config("node_limit must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            feasibility_tol: self.feasibility_tolerance,
            ..SimplexOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    GapReached,
}

impl SolveStatus {
    pub fn has_incumbent_guarantee(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapReached)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Column values of the incumbent; empty when none was found.
    pub assignment: Vec<f64>,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    /// Global lower bound each time it moved.
    pub bound_history: Vec<f64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Equality ignores wall time so reports of repeated runs compare equal.
impl PartialEq for SolveReport {
    fn eq(&self, other: &Self) -> bool {
        self.status == other.status
            && self.assignment == other.assignment
            && self.objective == other.objective
            && self.best_bound == other.best_bound
            && self.gap == other.gap
            && self.nodes == other.nodes
            && self.bound_history == other.bound_history
    }
}

impl SolveReport {
    pub(crate) fn infeasible(nodes: u64, wall_time: Duration) -> Self {
        SolveReport {
            status: SolveStatus::Infeasible,
            assignment: Vec::new(),
            objective: None,
            best_bound: None,
            gap: None,
            nodes,
            bound_history: Vec::new(),
            wall_time,
        }
    }

    pub fn has_incumbent(&self) -> bool {
        !self.assignment.is_empty()
    }
}

pub(crate) fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

struct Node {
    id: u64,
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    /// Reversed so the max-heap pops the smallest bound, then the smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.id.cmp(&self.id))
    }
}

/// Most fractional binary, ties to the lowest column.
fn branching_column(program: &MixedIntegerProgram, x: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in program.binary_columns() {
        let frac = x[j] - x[j].floor();
        let dist = frac.min(1.0 - frac);
        if dist > tol && best.is_none_or(|(_, d)| dist > d) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

/// Snaps near-integral binaries to exact values and clamps into column bounds.
pub(crate) fn polish(program: &MixedIntegerProgram, x: &mut [f64]) {
    for (j, c) in program.columns.iter().enumerate() {
        if c.integrality == super::Integrality::Binary {
            x[j] = x[j].round();
        }
        x[j] = x[j].clamp(c.lower, c.upper);
    }
}

/// Best-bound branch-and-bound over the binary columns of `program`.
pub fn solve_milp(program: &MixedIntegerProgram, options: &SolveOptions) -> Result<SolveReport> {
    options.check()?;
    let start = Instant::now();
    let simplex = options.simplex();
    let cutoff = |inc: f64| inc - 1e-9 * inc.abs().max(1.0);

    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    let mut dive = Some(Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        lower: program.lower_bounds(),
        upper: program.upper_bounds(),
    });
    let mut plunging = true;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0u64;
    let mut history: Vec<f64> = Vec::new();
    let mut status = None;

    loop {
        let inc = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        // Lazily discard open nodes that can no longer improve.
        while heap.peek().is_some_and(|n: &Node| n.bound >= cutoff(inc)) {
            heap.pop();
        }
        let open_min = heap
            .peek()
            .map(|n: &Node| n.bound)
            .into_iter()
            .chain(dive.as_ref().map(|n| n.bound))
            .fold(f64::INFINITY, f64::min);
        let global = open_min.min(inc);
        if global.is_finite() {
            let bound = history.last().map_or(global, |&b: &f64| b.max(global));
            if history.last() != Some(&bound) {
                history.push(bound);
            }
        }
        if dive.is_none() && heap.is_empty() {
            break;
        }
        if inc.is_finite() && relative_gap(inc, open_min) <= options.gap_tolerance {
            status = Some(SolveStatus::GapReached);
            break;
        }
        if nodes >= options.node_limit {
            status = Some(SolveStatus::NodeLimit);
            break;
        }

        let node = match dive.take() {
            Some(n) => n,
            None => heap.pop().expect("heap nonempty"),
        };
        nodes += 1;
        let lp = solve_lp_bounded(program, &node.lower, &node.upper, &simplex)?;
        match lp.status {
            LpStatus::Infeasible => {
                plunging = false;
                continue;
            }
            LpStatus::Unbounded => return Err(Error::Unbounded),
            LpStatus::Optimal => {}
        }
        // Children never have a smaller bound than their parent.
        let bound = lp.objective.max(node.bound);
        if bound >= cutoff(inc) {
            plunging = false;
            continue;
        }
        match branching_column(program, &lp.x, options.integrality_tolerance) {
            None => {
                let mut x = lp.x;
                polish(program, &mut x);
                let value = program.objective(&x);
                if value < inc {
                    incumbent = Some((value, x));
                    plunging = true;
                } else {
                    plunging = false;
                }
            }
            Some(j) => {
                let mut down = Node {
                    id: next_id,
                    bound,
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                down.upper[j] = 0.0;
                let mut up = Node {
                    id: next_id + 1,
                    bound,
                    lower: node.lower,
                    upper: node.upper,
                };
                up.lower[j] = 1.0;
                next_id += 2;
                if plunging {
                    let (first, second) = if lp.x[j] >= 0.5 { (up, down) } else { (down, up) };
                    dive = Some(first);
                    heap.push(second);
                } else {
                    heap.push(down);
                    heap.push(up);
                }
            }
        }
    }

    let wall_time = start.elapsed();
    let Some((objective, assignment)) = incumbent else {
        let mut report = SolveReport::infeasible(nodes, wall_time);
        if status == Some(SolveStatus::NodeLimit) {
            report.status = SolveStatus::NodeLimit;
            report.best_bound = history.last().copied();
        }
        report.bound_history = history;
        return Ok(report);
    };
    let status = status.unwrap_or(SolveStatus::Optimal);
    let best_bound = match status {
        SolveStatus::Optimal => objective,
        _ => history.last().copied().unwrap_or(f64::NEG_INFINITY).min(objective),
    };
    if status == SolveStatus::Optimal && history.last() != Some(&objective) {
        history.push(objective.max(*history.last().unwrap_or(&objective)));
    }
    Ok(SolveReport {
        status,
        assignment,
        objective: Some(objective),
        best_bound: Some(best_bound),
        gap: Some(relative_gap(objective, best_bound)),
        nodes,
        bound_history: history,
        wall_time,
    })
}
