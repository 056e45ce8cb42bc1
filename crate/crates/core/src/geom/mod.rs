//! Polytopes, zonotopes, their faces, lifts and pushforwards.

mod face;
pub mod hull2d;
mod polytope;
mod zonotope;

pub use face::{AffineHull, FaceDescriptor, FaceKind};
pub use polytope::{Facet, Polytope};
pub use zonotope::{bits_to_vector, BitVector, LiftPoint, Zonotope, ZonotopeFacet, DEFAULT_RANK_CAP};
