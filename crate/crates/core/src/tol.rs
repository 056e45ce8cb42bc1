//! Numerical tolerances shared by the geometry, distance and descent code.

use serde::{Deserialize, Serialize};

/// Tolerances for every predicate in the crate.
///
/// Defaults:
///
/// | field              | default | meaning                                                      |
/// |--------------------|---------|--------------------------------------------------------------|
/// | `feasibility`      | 1e-9    | LP / QP primal feasibility                                   |
/// | `kkt`              | 1e-9    | KKT residual of the projection solvers                       |
/// | `general_position` | 1e-10   | relative minor magnitude for general position                |
/// | `active`           | 1e-7    | relative band for pairs achieving the Hausdorff distance     |
/// | `strict`           | 1e-8    | strictness of Hausdorff stability coefficients               |
/// | `cone_margin`      | 1e-8    | optimal `t*` below which a cone counts as having no interior |
/// | `boundary`         | 1e-9    | on-boundary / on-facet tests, relative to the body's scale   |
/// | `lift`             | 1e-10   | a lift coordinate within this of 0 or 1 is at its bound      |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub feasibility: f64,
    pub kkt: f64,
    pub general_position: f64,
    pub active: f64,
    pub strict: f64,
    pub cone_margin: f64,
    pub boundary: f64,
    pub lift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-9,
            kkt: 1e-9,
            general_position: 1e-10,
            active: 1e-7,
            strict: 1e-8,
            cone_margin: 1e-8,
            boundary: 1e-9,
            lift: 1e-10,
        }
    }
}

/// Everything the geometry and descent code needs besides its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub tol: Tolerances,
    pub solver: crate::solvers::SolverConfig,
    /// Largest rank accepted by brute-force vertex enumeration.
    pub rank_cap: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol: Tolerances::default(), solver: Default::default(), rank_cap: crate::geom::DEFAULT_RANK_CAP }
    }
}
