use std::time::Instant;

use rayon::prelude::*;

use super::bnb::{polish, SolveOptions, SolveReport, SolveStatus};
use super::program::MixedIntegerProgram;
use super::simplex::{solve_lp_bounded, LpStatus};
use crate::error::{Error, Result};

pub const DEFAULT_BINARY_LIMIT: usize = 20;

/// Exhaustive oracle: one LP per 0/1 assignment of the free binaries.
///
/// Assignments are enumerated as bit masks (bit `b` sets the `b`-th free binary);
/// on equal objectives the lowest mask wins, so parallel evaluation stays deterministic.
pub fn brute_force_milp(program: &MixedIntegerProgram, binary_limit: usize) -> Result<SolveReport> {
    let start = Instant::now();
    let free = program.free_binaries();
    if free.len() > binary_limit {
        return Err(Error::TooManyBinaries {
            limit: binary_limit,
            actual: free.len(),
        });
    }
    let simplex = SolveOptions::default().simplex();
    let base_lo = program.lower_bounds();
    let base_hi = program.upper_bounds();
    let count = 1u64 << free.len();

    let results: Vec<Option<(f64, u64, Vec<f64>)>> = (0..count)
        .into_par_iter()
        .map(|mask| {
            let mut lo = base_lo.clone();
            let mut hi = base_hi.clone();
            for (b, &j) in free.iter().enumerate() {
                let v = ((mask >> b) & 1) as f64;
                lo[j] = v;
                hi[j] = v;
            }
            let lp = solve_lp_bounded(program, &lo, &hi, &simplex)?;
            Ok(match lp.status {
                LpStatus::Optimal => {
                    let mut x = lp.x;
                    polish(program, &mut x);
                    Some((program.objective(&x), mask, x))
                }
                LpStatus::Infeasible => None,
                LpStatus::Unbounded => return Err(Error::Unbounded),
            })
        })
        .collect::<Result<_>>()?;

    let best = results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let wall_time = start.elapsed();
    Ok(match best {
        None => SolveReport::infeasible(count, wall_time),
        Some((objective, _, assignment)) => SolveReport {
            status: SolveStatus::Optimal,
            assignment,
            objective: Some(objective),
            best_bound: Some(objective),
            gap: Some(0.0),
            nodes: count,
            bound_history: vec![objective],
            wall_time,
        },
    })
}
