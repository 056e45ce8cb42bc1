//! Small dense convex solvers.

mod bvls;
mod chebyshev;
mod lp;
mod minnorm;

pub use bvls::{bounded_least_squares, QpResult};
pub use chebyshev::{chebyshev_center, cone_interior_point, ConeInterior, Halfspace};
pub use lp::{solve_lp, Goal, LinearProgram, LpOutcome, LpSolution, Sense};
pub use minnorm::{min_norm_point, MinNormResult};

use serde::{Deserialize, Serialize};

/// Tolerances and iteration budgets for every solver in this module.
///
/// Iteration caps are `iteration_factor * (variables + constraints)`, never
/// less than 50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub feasibility: f64,
    pub kkt: f64,
    pub iteration_factor: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { feasibility: 1e-9, kkt: 1e-9, iteration_factor: 10 }
    }
}

impl SolverConfig {
    pub(crate) fn cap(&self, size: usize) -> usize {
        (self.iteration_factor * size).max(50)
    }
}
