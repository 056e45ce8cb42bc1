//! Approximate a convex polytope by a zonotope of fixed rank, minimising the
//! Hausdorff distance with a cone-guided subgradient method.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod descent;
pub mod error;
pub mod geom;
pub mod hausdorff;
pub mod io;
pub mod linalg;
pub mod solvers;
pub mod subgrad;
pub mod tol;
pub mod warmstart;

pub use error::{Error, Result};
pub use tol::{Settings, Tolerances};
