//! Desk-scale mixed-integer programming.

mod bnb;
mod brute;
mod mps;
mod program;
mod simplex;
mod solution;

pub use bnb::{solve_milp, SolveOptions, SolveReport, SolveStatus};
pub use brute::{brute_force_milp, DEFAULT_BINARY_LIMIT};
pub use mps::{parse_mps, to_mps_string, write_mps};
pub use program::{Column, Integrality, MixedIntegerProgram, Row, Sense};
pub use simplex::{solve_lp, solve_lp_bounded, BasisStatus, LpStatus, SimplexOptions, SimplexResult};
pub use solution::{parse_external_solution, read_external_solution, ExternalSolution};
